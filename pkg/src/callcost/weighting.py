"""Term-weighting formulas: basic tf-idf, BM25 and the padded BM25 variant.

The ``*_core`` functions are the bare arithmetic with no argument checks;
they are what the call-form kernels invoke. The public ``*_weight``
functions validate their inputs and then delegate to the same core, so a
validated weight is bitwise equal to the kernel's.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isfinite, log

from .errors import DomainError

DEFAULT_K1 = 1.2
DEFAULT_B = 0.2
DEFAULT_PAD = 100.0


@dataclass(frozen=True)
class Bm25Params:
    k1: float = DEFAULT_K1
    b: float = DEFAULT_B

    def __post_init__(self):
        if not (isfinite(self.k1) and self.k1 > 0):
            raise DomainError(f"k1 must be a positive finite number, got {self.k1!r}")
        if not 0 <= self.b <= 1:
            raise DomainError(f"b must lie in [0, 1], got {self.b!r}")


def tfidf_core(tf, df, d):
    return (1 + log(tf)) * log(d / df + 1)


def bm25_core(tf, df, d, dl, avdl, k1, b):
    mul = ((k1 + 1) * tf) / (k1 * (1 - b + b * (dl / avdl)) + tf)
    idf = log(1 + (d / df))
    return mul * idf


def bm25_modified_core(tf, df, d, dl, avdl, k1, b, pad):
    mul = ((k1 + 1) * tf) / (k1 * (1 - b + b * (dl / avdl)) + tf)
    idf = log(1 + (d / df))
    return ((mul * pad) / pad) * ((idf * pad) / pad)


def _check_counts(tf, df, d):
    if tf < 1:
        raise DomainError(f"tf must be >= 1, got {tf!r}")
    if df < 1:
        raise DomainError(f"df must be >= 1, got {df!r}")
    if d < df:
        raise DomainError(f"d must be >= df, got d={d!r}, df={df!r}")


def _check_lengths(dl, avdl):
    if not dl > 0:
        raise DomainError(f"dl must be positive, got {dl!r}")
    if not avdl > 0:
        raise DomainError(f"avdl must be positive, got {avdl!r}")


def tfidf_weight(tf, df, d) -> float:
    """``(1 + ln tf) * ln(d/df + 1)``."""
    _check_counts(tf, df, d)
    return tfidf_core(tf, df, d)


def bm25_weight(tf, df, d, dl, avdl, params: Bm25Params = Bm25Params()) -> float:
    """Okapi BM25 document-side weight with natural-log idf ``ln(1 + d/df)``.

    >>> bm25_weight(1, 5, 10, 80, 80) == log(1 + 10 / 5)
    True
    """
    _check_counts(tf, df, d)
    _check_lengths(dl, avdl)
    return bm25_core(tf, df, d, dl, avdl, params.k1, params.b)


def bm25_modified_weight(tf, df, d, dl, avdl, params: Bm25Params = Bm25Params(),
                         pad=DEFAULT_PAD) -> float:
    """BM25 with both factors multiplied and then divided by ``pad``.

    The result equals :func:`bm25_weight` up to rounding; the extra four
    operations are the point. ``pad`` must arrive as a runtime value.
    """
    _check_counts(tf, df, d)
    _check_lengths(dl, avdl)
    if pad == 0 or not isfinite(pad):
        raise DomainError(f"pad must be a non-zero finite number, got {pad!r}")
    return bm25_modified_core(tf, df, d, dl, avdl, params.k1, params.b, pad)
