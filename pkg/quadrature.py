"""Numerical integration for densities and entropy integrands.

Provides a vectorised adaptive Simpson rule driven by a panel worklist, a
piecewise driver that splits at discontinuities, and a dense trapezoid rule
used as an independent cross-check.
"""

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import trapezoid

from errors import ConfigError, QuadratureError
from settings import DENSE_TRAPEZOID_POINTS, QUADRATURE

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]
Interval = Tuple[float, float]


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and budget for adaptive integration.

    Attributes:
        rel_tol: Relative tolerance against the integral of |f|.
        abs_tol: Absolute tolerance floor.
        initial_panels: Uniform panels per piece before refinement.
        max_evaluations: Integrand evaluations allowed per piece.
        edge_inset: Endpoints are evaluated this fraction of the piece width
            inside the piece, so steps at the bounds use one-sided limits.
        interval: Optional explicit integration window; it must cover the
            supports the caller needs.
    """

    rel_tol: float = QUADRATURE['rel_tol']
    abs_tol: float = QUADRATURE['abs_tol']
    initial_panels: int = QUADRATURE['initial_panels']
    max_evaluations: int = QUADRATURE['max_evaluations']
    edge_inset: float = QUADRATURE['edge_inset']
    interval: Optional[Interval] = None

    def __post_init__(self) -> None:
        if not (self.rel_tol >= 0 and self.abs_tol > 0):
            raise ConfigError("quadrature tolerances must be positive")
        if self.initial_panels < 1 or self.max_evaluations < 5 * self.initial_panels:
            raise ConfigError("quadrature budget too small")
        if not 0 <= self.edge_inset < 0.5:
            raise ConfigError("edge_inset must lie in [0, 0.5)")
        if self.interval is not None and not self.interval[0] < self.interval[1]:
            raise ConfigError("quadrature interval must be increasing")


def merge_intervals(intervals: Iterable[Interval]) -> List[Interval]:
    """Union of closed intervals as a sorted list of disjoint intervals."""
    merged: List[List[float]] = []
    for lo, hi in sorted((float(a), float(b)) for a, b in intervals):
        if hi <= lo:
            continue
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(lo, hi) for lo, hi in merged]


def pieces(intervals: Iterable[Interval], breakpoints: Iterable[float] = ()) -> List[Interval]:
    """Split the union of intervals at every breakpoint falling inside it."""
    cuts = sorted({float(b) for b in breakpoints})
    result = []
    for lo, hi in merge_intervals(intervals):
        inner = [b for b in cuts if lo < b < hi]
        edges = [lo, *inner, hi]
        result.extend(zip(edges[:-1], edges[1:]))
    return result


def _nudged(func: Integrand, lo: float, hi: float, inset: float) -> Integrand:
    """Evaluate func with abscissae clipped a small distance inside [lo, hi]."""
    if inset == 0:
        return func
    delta = inset * (hi - lo)
    inner_lo, inner_hi = lo + delta, hi - delta

    def clipped(y: np.ndarray) -> np.ndarray:
        return func(np.clip(y, inner_lo, inner_hi))

    return clipped


def adaptive_simpson(func: Integrand, a: float, b: float,
                     spec: QuadratureSpec = QuadratureSpec()) -> Tuple[float, float]:
    """
    Adaptive Simpson integration of a vectorised integrand over [a, b].

    Each pass evaluates the two quarter points of every open panel in a single
    call. A panel is accepted when its Richardson error estimate is within its
    width-proportional share of max(abs_tol, rel_tol * integral of |f|).

    Args:
        func: Integrand taking and returning 1-d float arrays
        a: Lower bound
        b: Upper bound (must exceed a)
        spec: Tolerances and evaluation budget

    Returns:
        Tuple of (integral_value, error_estimate)

    Raises:
        QuadratureError: Budget exhausted or panels shrank to rounding level
    """
    if not b > a:
        raise ConfigError(f"integration bounds must be increasing, got [{a}, {b}]")

    span = b - a
    edges = np.linspace(a, b, spec.initial_panels + 1)
    lo, hi = edges[:-1], edges[1:]
    mid = 0.5 * (lo + hi)
    f_edges = np.asarray(func(edges), dtype=np.float64)
    f_lo, f_hi = f_edges[:-1], f_edges[1:]
    f_mid = np.asarray(func(mid), dtype=np.float64)
    whole = (hi - lo) / 6.0 * (f_lo + 4.0 * f_mid + f_hi)
    evaluations = edges.size + mid.size

    accepted: List[np.ndarray] = []
    accepted_abs = 0.0
    error = 0.0
    passes = 0
    min_width = span * 2.0**-45

    while lo.size:
        passes += 1
        evaluations += 2 * lo.size
        if evaluations > spec.max_evaluations:
            raise QuadratureError(
                f"no convergence on [{a:g}, {b:g}] within {spec.max_evaluations} "
                f"evaluations ({lo.size} panels open)"
            )

        quarter_left = 0.5 * (lo + mid)
        quarter_right = 0.5 * (mid + hi)
        f_quarters = np.asarray(func(np.concatenate((quarter_left, quarter_right))),
                                dtype=np.float64)
        f_ql, f_qr = f_quarters[: lo.size], f_quarters[lo.size:]

        left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_ql + f_mid)
        right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_qr + f_hi)
        refined = left + right
        delta = refined - whole

        scale = max(spec.abs_tol,
                    spec.rel_tol * (accepted_abs + float(np.sum(np.abs(left) + np.abs(right)))))
        share = scale * (hi - lo) / span
        done = np.abs(delta) <= 15.0 * share

        if np.any(~done & (hi - lo < min_width)):
            raise QuadratureError(f"panels collapsed below resolution on [{a:g}, {b:g}]")

        if np.any(done):
            accepted.append(refined[done] + delta[done] / 15.0)
            accepted_abs += float(np.sum(np.abs(refined[done])))
            error += float(np.sum(np.abs(delta[done]))) / 15.0

        keep = ~done
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        f_lo, f_mid, f_hi = f_lo[keep], f_mid[keep], f_hi[keep]
        f_ql, f_qr = f_ql[keep], f_qr[keep]
        left, right = left[keep], right[keep]

        # Each open panel becomes two children
        lo, hi = np.concatenate((lo, mid)), np.concatenate((mid, hi))
        f_lo, f_hi = np.concatenate((f_lo, f_mid)), np.concatenate((f_mid, f_hi))
        f_mid = np.concatenate((f_ql, f_qr))
        whole = np.concatenate((left, right))
        mid = 0.5 * (lo + hi)

    logger.debug("adaptive_simpson [%g, %g]: %d passes, %d evaluations",
                 a, b, passes, evaluations)
    value = math.fsum(np.concatenate(accepted).tolist()) if accepted else 0.0
    return value, error


def integrate(func: Integrand, intervals: Sequence[Interval],
              breakpoints: Iterable[float] = (),
              spec: QuadratureSpec = QuadratureSpec()) -> float:
    """
    Integrate over the union of intervals, piecewise between breakpoints.

    The integrand is assumed to vanish outside the intervals. Every piece is
    integrated with its endpoints nudged inward by spec.edge_inset of its
    width, so jump discontinuities at breakpoints are handled exactly.

    Args:
        func: Vectorised integrand
        intervals: Support intervals; overlapping ones are merged
        breakpoints: Points where func may jump
        spec: Tolerances and budget

    Returns:
        The integral value
    """
    parts = []
    for lo, hi in pieces(intervals, breakpoints):
        value, _ = adaptive_simpson(_nudged(func, lo, hi, spec.edge_inset), lo, hi, spec)
        parts.append(value)
    return math.fsum(parts)


def dense_trapezoid(func: Integrand, intervals: Sequence[Interval],
                    breakpoints: Iterable[float] = (),
                    points: int = DENSE_TRAPEZOID_POINTS,
                    edge_inset: float = QUADRATURE['edge_inset']) -> float:
    """
    Trapezoid rule on a dense uniform grid per piece.

    Shares no refinement logic with adaptive_simpson, which makes it the
    independent scheme for cross-checking oracle values.
    """
    parts = []
    for lo, hi in pieces(intervals, breakpoints):
        grid = np.linspace(lo, hi, points)
        values = _nudged(func, lo, hi, edge_inset)(grid)
        parts.append(float(trapezoid(values, grid)))
    return math.fsum(parts)


def check_covers(spec: QuadratureSpec, intervals: Sequence[Interval]) -> List[Interval]:
    """
    Clip support intervals to spec.interval after checking it covers them.

    Returns the intervals unchanged when the spec has no explicit window.

    Raises:
        ConfigError: The explicit window does not cover every interval
    """
    if spec.interval is None:
        return list(intervals)
    lo, hi = spec.interval
    for a, b in intervals:
        if a < lo or b > hi:
            raise ConfigError(
                f"quadrature interval [{lo:g}, {hi:g}] does not cover support [{a:g}, {b:g}]"
            )
    return list(intervals)
