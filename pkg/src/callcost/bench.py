"""Timing engine: repetitions, averaging, overhead and the scaling study."""

from __future__ import annotations

import gc
import logging
import math
import statistics
import time
from dataclasses import dataclass, field

from .corpus import CorpusStats, InvertedIndex, replicate_index
from .errors import ClockError, DegenerateFitError, DomainError, ScalingError
from .kernels import (
    Form,
    KernelId,
    Model,
    kernel_pair_equivalence,
    prepare_kernel,
    sink,
)
from .weighting import DEFAULT_PAD, Bm25Params

log = logging.getLogger(__name__)

DEFAULT_REPS = 3
DEFAULT_WARMUP = 1
DEFAULT_FACTORS = (1, 5, 10, 15, 20)
MONOTONE_ALLOWANCE = 0.05

clock_ns = time.perf_counter_ns
CLOCK_NAME = "perf_counter"


def clock_resolution_ns() -> float:
    return time.get_clock_info(CLOCK_NAME).resolution * 1e9


def time_once(fn, disable_gc: bool = True):
    """Run ``fn()`` once and return ``(elapsed_ns, result)``.

    Only the call itself is inside the clock reads; the caller consumes the
    result afterwards.
    """
    gc_was_enabled = gc.isenabled()
    if disable_gc:
        gc.disable()
    try:
        start = clock_ns()
        result = fn()
        end = clock_ns()
    finally:
        if disable_gc and gc_was_enabled:
            gc.enable()
    if end < start:
        raise ClockError(f"clock went backwards: start={start} end={end}")
    return end - start, result


@dataclass(frozen=True)
class Measurement:
    kernel: KernelId
    times: tuple  # ns, one per repetition
    mean: float
    minimum: float
    median: float

    @classmethod
    def from_times(cls, kernel: KernelId, times) -> "Measurement":
        times = tuple(times)
        if not times:
            raise ValueError("a measurement needs at least one repetition")
        return cls(kernel, times, math.fsum(times) / len(times), min(times),
                   statistics.median(times))


def overhead_pct(inline_mean: float, call_mean: float) -> float:
    """Relative slowdown of the call form, in percent of the inline time."""
    if not inline_mean > 0:
        raise DomainError(f"inline mean must be positive, got {inline_mean!r}")
    return 100.0 * (call_mean - inline_mean) / inline_mean


@dataclass(frozen=True)
class ComparisonResult:
    model: Model
    inline: Measurement
    call: Measurement
    overhead_pct: float
    per_call_cost: float  # ns per weight computation
    weight_count: int
    checksum: float = math.nan
    factor: int = 1
    element_count: int = 0
    warmup: int = 0

    @classmethod
    def build(cls, model: Model, inline: Measurement, call: Measurement, weight_count: int,
              **extra) -> "ComparisonResult":
        per_call = (call.mean - inline.mean) / weight_count if weight_count else math.nan
        result = cls(model, inline, call, overhead_pct(inline.mean, call.mean), per_call,
                     weight_count, **extra)
        result.check()
        return result

    def check(self) -> None:
        """Re-verify the derived fields against the stored means."""
        expected = overhead_pct(self.inline.mean, self.call.mean)
        if abs(self.overhead_pct - expected) > 1e-9:
            raise AssertionError(f"overhead_pct {self.overhead_pct} != {expected}")
        if self.weight_count:
            per_call = (self.call.mean - self.inline.mean) / self.weight_count
            if not math.isclose(self.per_call_cost, per_call, rel_tol=1e-12, abs_tol=1e-12):
                raise AssertionError(f"per_call_cost {self.per_call_cost} != {per_call}")
        for m in (self.inline, self.call):
            if abs(m.mean - math.fsum(m.times) / len(m.times)) > 1:
                raise AssertionError(f"{m.kernel}: mean does not match times")


def _repeat(fn, reps: int) -> list:
    times = []
    for _ in range(reps):
        elapsed, (checksum, _count) = time_once(fn)
        sink(checksum)
        times.append(elapsed)
    return times


def run_comparison(model: Model, index: InvertedIndex, stats: CorpusStats,
                   params: Bm25Params = Bm25Params(), reps: int = DEFAULT_REPS,
                   warmup: int = DEFAULT_WARMUP, pad=DEFAULT_PAD, interleave: bool = False,
                   factor: int = 1) -> ComparisonResult:
    """Time the inline and call forms of ``model`` over ``index``.

    The equivalence gate runs first and its failure propagates. By default
    all inline repetitions run before all call repetitions; ``interleave``
    alternates them instead, for spotting drift.
    """
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    if warmup < 0:
        raise ValueError(f"warmup must be >= 0, got {warmup}")
    report = kernel_pair_equivalence(model, index, stats, params, pad)
    inline_id, call_id = KernelId(model, Form.INLINE), KernelId(model, Form.CALL)
    inline_fn = prepare_kernel(inline_id, index, stats, params, pad, check=False)
    call_fn = prepare_kernel(call_id, index, stats, params, pad, check=False)

    _repeat(inline_fn, warmup)
    _repeat(call_fn, warmup)
    if interleave:
        inline_times, call_times = [], []
        for _ in range(reps):
            inline_times += _repeat(inline_fn, 1)
            call_times += _repeat(call_fn, 1)
    else:
        inline_times = _repeat(inline_fn, reps)
        call_times = _repeat(call_fn, reps)

    return ComparisonResult.build(
        model,
        Measurement.from_times(inline_id, inline_times),
        Measurement.from_times(call_id, call_times),
        report.inline.weight_count,
        checksum=report.inline.checksum,
        factor=factor,
        element_count=len(index),
        warmup=warmup,
    )


# -- scaling ------------------------------------------------------------------

@dataclass(frozen=True)
class ScalingPoint:
    factor: int
    element_count: int
    mean_time: float  # ns


@dataclass(frozen=True)
class ScalingFit:
    slope: float  # ns per element
    intercept: float  # ns
    r2: float
    n: int
    constant: bool = False  # all y equal; r2 defined as 1
    degenerate: bool = False  # fewer than two distinct x; slope undefined


def linear_fit(points) -> ScalingFit:
    """Ordinary least squares of y on x with ``r2 = 1 - SS_res/SS_tot``."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 2 or len({x for x, _ in pts}) < 2:
        raise DegenerateFitError("need at least two points with distinct x")
    n = len(pts)
    mx = math.fsum(x for x, _ in pts) / n
    my = math.fsum(y for _, y in pts) / n
    sxx = math.fsum((x - mx) ** 2 for x, _ in pts)
    sxy = math.fsum((x - mx) * (y - my) for x, y in pts)
    slope = sxy / sxx
    intercept = my - slope * mx
    ss_tot = math.fsum((y - my) ** 2 for _, y in pts)
    if ss_tot == 0:
        return ScalingFit(slope, intercept, 1.0, n, constant=True)
    ss_res = math.fsum((y - (intercept + slope * x)) ** 2 for x, y in pts)
    r2 = min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return ScalingFit(slope, intercept, r2, n)


def fit_points(points) -> ScalingFit:
    """Like :func:`linear_fit` but a single-x series yields a flagged fit."""
    pts = [(p.element_count, p.mean_time) for p in points]
    if len({x for x, _ in pts}) < 2:
        mean_y = math.fsum(y for _, y in pts) / len(pts) if pts else math.nan
        return ScalingFit(math.nan, mean_y, 1.0, len(pts), degenerate=True)
    return linear_fit(pts)


@dataclass
class ScalingReport:
    model: Model
    comparisons: list = field(default_factory=list)
    points: dict = field(default_factory=lambda: {Form.INLINE: [], Form.CALL: []})
    fits: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def series(self) -> list[tuple[int, float, float]]:
        """``(element_count, inline_mean, call_mean)`` sorted by element count."""
        rows = [(c.element_count, c.inline.mean, c.call.mean) for c in self.comparisons]
        return sorted(rows)


def run_scaling(model: Model, index: InvertedIndex, stats: CorpusStats,
                params: Bm25Params = Bm25Params(), factors=DEFAULT_FACTORS,
                reps: int = DEFAULT_REPS, warmup: int = DEFAULT_WARMUP,
                pad=DEFAULT_PAD) -> ScalingReport:
    """Replicate the index by each factor, compare forms, and fit time vs size."""
    factors = list(factors)
    if not factors or any(int(f) != f or f < 1 for f in factors):
        raise ValueError(f"factors must be a non-empty list of integers >= 1, got {factors}")
    report = ScalingReport(model)
    for f in factors:
        try:
            replica = replicate_index(index, f)
            result = run_comparison(model, replica, stats, params, reps, warmup, pad, factor=f)
        except Exception as exc:
            raise ScalingError(f"scaling aborted at factor {f}: {exc}",
                               partial=list(report.comparisons)) from exc
        del replica
        report.comparisons.append(result)
        report.points[Form.INLINE].append(ScalingPoint(f, result.element_count, result.inline.mean))
        report.points[Form.CALL].append(ScalingPoint(f, result.element_count, result.call.mean))
        log.info("factor %d: %d elements, inline %.0f ns, call %.0f ns", f,
                 result.element_count, result.inline.mean, result.call.mean)

    for form, pts in report.points.items():
        report.fits[form] = fit_points(pts)
        ordered = sorted(pts, key=lambda p: p.element_count)
        for prev, cur in zip(ordered, ordered[1:]):
            if cur.mean_time < prev.mean_time * (1 - MONOTONE_ALLOWANCE):
                msg = (f"{form.value}: mean time fell from {prev.mean_time:.0f} ns "
                       f"(x{prev.factor}) to {cur.mean_time:.0f} ns (x{cur.factor})")
                report.warnings.append(msg)
                log.warning(msg)
    if report.fits[Form.INLINE].degenerate:
        report.warnings.append("single dataset size: linear fit is degenerate")
    return report
