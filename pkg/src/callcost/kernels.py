"""The six measurement kernels: {tf-idf, BM25, padded BM25} x {inline, call}.

Every kernel walks all postings of an index in iteration order and sums the
weights into a checksum. The inline kernels spell the arithmetic out in the
loop body; the call kernels hand the same operands to the ``*_core``
routines in :mod:`callcost.weighting`.

Keeping the call boundary real
------------------------------
CPython compiles each function to its own code object and executes every
call through the interpreter's call protocol; there is no inliner, cloner or
interprocedural constant propagation, so the call form always pays for the
call. The remaining guards are ours to keep:

* both forms resolve ``log`` and the weighting routine as module globals,
  so the only difference between them is the call itself;
* ``pad`` is a plain function argument, never a literal, so the compiler's
  constant folder cannot see ``(x * 100) / 100``;
* the checksum is returned and handed to :func:`sink` by the timing code.

To confirm the call survives, disassemble a call kernel
(``dis.dis(kernels.bm25_call)``) and look for ``CALL_FUNCTION`` on
``bm25_core`` inside the loop.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from math import log

from .corpus import CorpusStats, InvertedIndex
from .errors import CorpusError, EquivalenceError
from .weighting import DEFAULT_PAD, Bm25Params, bm25_core, bm25_modified_core, tfidf_core

EQUIVALENCE_RTOL = 1e-9


class Model(enum.Enum):
    TFIDF = "tfidf"
    BM25 = "bm25"
    BM25_MODIFIED = "bm25mod"


class Form(enum.Enum):
    INLINE = "inline"
    CALL = "call"


@dataclass(frozen=True)
class KernelId:
    model: Model
    form: Form

    @classmethod
    def all(cls) -> list["KernelId"]:
        return [cls(m, f) for m in Model for f in Form]

    def __str__(self) -> str:
        return f"{self.model.value}/{self.form.value}"


@dataclass(frozen=True)
class KernelOutcome:
    checksum: float
    weight_count: int


# -- kernels ------------------------------------------------------------------
# Shared signature: (entries, doc_lengths, d, avdl, k1, b, pad) -> (checksum, count)

def tfidf_inline(entries, doc_lengths, d, avdl, k1, b, pad):
    checksum = 0.0
    count = 0
    for entry in entries:
        df = entry.df
        postings = entry.postings
        for doc_id, tf in postings.items():
            w_ij = (1 + log(tf)) * log(d / df + 1)
            checksum += w_ij
        count += len(postings)
    return checksum, count


def tfidf_call(entries, doc_lengths, d, avdl, k1, b, pad):
    checksum = 0.0
    count = 0
    for entry in entries:
        df = entry.df
        postings = entry.postings
        for doc_id, tf in postings.items():
            w_ij = tfidf_core(tf, df, d)
            checksum += w_ij
        count += len(postings)
    return checksum, count


def bm25_inline(entries, doc_lengths, d, avdl, k1, b, pad):
    checksum = 0.0
    count = 0
    for entry in entries:
        df = entry.df
        postings = entry.postings
        for doc_id, tf in postings.items():
            dl = doc_lengths[doc_id]
            mul = ((k1 + 1) * tf) / (k1 * (1 - b + b * (dl / avdl)) + tf)
            idf = log(1 + (d / df))
            w_ij = mul * idf
            checksum += w_ij
        count += len(postings)
    return checksum, count


def bm25_call(entries, doc_lengths, d, avdl, k1, b, pad):
    checksum = 0.0
    count = 0
    for entry in entries:
        df = entry.df
        postings = entry.postings
        for doc_id, tf in postings.items():
            dl = doc_lengths[doc_id]
            w_ij = bm25_core(tf, df, d, dl, avdl, k1, b)
            checksum += w_ij
        count += len(postings)
    return checksum, count


def bm25_modified_inline(entries, doc_lengths, d, avdl, k1, b, pad):
    checksum = 0.0
    count = 0
    for entry in entries:
        df = entry.df
        postings = entry.postings
        for doc_id, tf in postings.items():
            dl = doc_lengths[doc_id]
            mul = ((k1 + 1) * tf) / (k1 * (1 - b + b * (dl / avdl)) + tf)
            idf = log(1 + (d / df))
            w_ij = ((mul * pad) / pad) * ((idf * pad) / pad)
            checksum += w_ij
        count += len(postings)
    return checksum, count


def bm25_modified_call(entries, doc_lengths, d, avdl, k1, b, pad):
    checksum = 0.0
    count = 0
    for entry in entries:
        df = entry.df
        postings = entry.postings
        for doc_id, tf in postings.items():
            dl = doc_lengths[doc_id]
            w_ij = bm25_modified_core(tf, df, d, dl, avdl, k1, b, pad)
            checksum += w_ij
        count += len(postings)
    return checksum, count


KERNELS = {
    KernelId(Model.TFIDF, Form.INLINE): tfidf_inline,
    KernelId(Model.TFIDF, Form.CALL): tfidf_call,
    KernelId(Model.BM25, Form.INLINE): bm25_inline,
    KernelId(Model.BM25, Form.CALL): bm25_call,
    KernelId(Model.BM25_MODIFIED, Form.INLINE): bm25_modified_inline,
    KernelId(Model.BM25_MODIFIED, Form.CALL): bm25_modified_call,
}

_sink_value = 0.0


def sink(value: float) -> None:
    """Consume a checksum so the work that produced it is observable."""
    global _sink_value
    _sink_value = value


def check_inputs(index: InvertedIndex, stats: CorpusStats) -> None:
    if not len(index):
        raise CorpusError("kernels need a non-empty index")
    lengths = stats.doc_lengths
    for word, entry in index.items():
        for doc_id in entry.postings:
            if doc_id not in lengths:
                raise CorpusError(f"posting {word!r}/{doc_id!r} has no document length")


def prepare_kernel(kernel_id: KernelId, index: InvertedIndex, stats: CorpusStats,
                   params: Bm25Params = Bm25Params(), pad=DEFAULT_PAD, check=True):
    """Return a zero-argument callable that runs one full traversal.

    All lookups and validation happen here, so timing the returned callable
    covers only the traversal. The callable returns ``(checksum, count)``.
    """
    if check:
        check_inputs(index, stats)
    fn = KERNELS[kernel_id]
    args = (tuple(index.entries.values()), stats.doc_lengths, stats.d, stats.avdl,
            params.k1, params.b, pad)

    def invoke():
        return fn(*args)

    return invoke


def run_kernel(kernel_id: KernelId, index: InvertedIndex, stats: CorpusStats,
               params: Bm25Params = Bm25Params(), pad=DEFAULT_PAD) -> KernelOutcome:
    checksum, count = prepare_kernel(kernel_id, index, stats, params, pad)()
    sink(checksum)
    return KernelOutcome(checksum, count)


def relative_difference(a: float, b: float) -> float:
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


@dataclass(frozen=True)
class EquivalenceReport:
    model: Model
    inline: KernelOutcome
    call: KernelOutcome
    relative_diff: float


def kernel_pair_equivalence(model: Model, index: InvertedIndex, stats: CorpusStats,
                            params: Bm25Params = Bm25Params(), pad=DEFAULT_PAD,
                            rtol: float = EQUIVALENCE_RTOL) -> EquivalenceReport:
    """Run both forms of ``model`` once, untimed, and insist they agree."""
    inline = run_kernel(KernelId(model, Form.INLINE), index, stats, params, pad)
    call = run_kernel(KernelId(model, Form.CALL), index, stats, params, pad)
    diff = relative_difference(inline.checksum, call.checksum)
    total = index.total_postings()
    if inline.weight_count != call.weight_count or inline.weight_count != total:
        raise EquivalenceError(
            f"{model.value}: weight counts differ (inline {inline.weight_count}, "
            f"call {call.weight_count}, postings {total})", inline, call)
    if not (math.isfinite(inline.checksum) and math.isfinite(call.checksum)) or diff > rtol:
        raise EquivalenceError(
            f"{model.value}: checksums differ (inline {inline.checksum!r}, "
            f"call {call.checksum!r}, relative diff {diff:.3g})", inline, call)
    return EquivalenceReport(model, inline, call, diff)
