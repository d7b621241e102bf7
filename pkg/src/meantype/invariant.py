"""Gauss iteration to the invariant mean of a mean-type mapping.

For a continuous weakly contractive mapping M the iterates M^n(v)
converge pointwise to a constant vector (K(v), ..., K(v)), and K is the
unique continuous mean satisfying K o M = K.  This engine computes K(v)
by plain iteration, stopping when the diameter of the iterate falls
below a tolerance; the limit, when it exists, is bracketed by the final
iterate, so reading out its midpoint bounds the error by half the final
diameter.

Convergence is a hypothesis, not a guarantee the engine can check:
mappings that never mix coordinates (pure projections) simply report
``max_iter_reached``.  No rate is assumed; the step count is reported as
observed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import InvalidMapping, MeanTypeError
from .mapping import IterationTrace, MeanTypeMapping, TraceStep, diameter, sample_vectors
from .means import Interval, Vector

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10000

READOUTS = ("mid", "min", "max", "first")

CONVERGED = "converged"
MAX_ITER_REACHED = "max_iter_reached"


def _read(v: Vector, readout: str) -> float:
    if readout == "mid":
        return 0.5 * (max(v) + min(v))
    if readout == "min":
        return min(v)
    if readout == "max":
        return max(v)
    if readout == "first":
        return v[0]
    raise InvalidMapping(f"unknown readout {readout!r}; available: {READOUTS}")


@dataclass(frozen=True)
class InvariantEstimate:
    """Outcome of one Gauss iteration run.

    ``value`` lies in [min(v), max(v)] of the starting vector, and within
    ``final_diameter`` of every coordinate of the final iterate.  When
    ``status`` is ``converged`` the true common limit (if the mapping has
    one) differs from the midpoint readout by at most final_diameter / 2.
    """

    value: float
    steps: int
    final_diameter: float
    status: str
    trace: IterationTrace | None = None

    @property
    def converged(self) -> bool:
        return self.status == CONVERGED


def gauss_iterate(
    mapping: MeanTypeMapping,
    v: Sequence[float],
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    readout: str = "mid",
    relative: bool = False,
    keep_trace: bool = False,
) -> InvariantEstimate:
    """Iterate M until the diameter falls below ``tol`` (or ``max_iter``).

    The stopping rule is absolute by default; with ``relative=True`` the
    diameter is compared against tol * |midpoint| instead, which suits
    domains far from zero.  Constant input is a fixed point and returns
    immediately with zero steps.  Hitting ``max_iter`` is a reported
    status, not an error: convergence holds for continuous weakly
    contractive mappings but cannot be assumed for arbitrary input.
    """
    if tol <= 0.0:
        raise InvalidMapping(f"tol must be positive, got {tol!r}")
    if max_iter < 1:
        raise InvalidMapping(f"max_iter must be >= 1, got {max_iter}")
    if readout not in READOUTS:
        raise InvalidMapping(f"unknown readout {readout!r}; available: {READOUTS}")

    current = tuple(float(x) for x in v)
    d = diameter(current)
    steps = [TraceStep(0, current, d)] if keep_trace else None

    def stopped(dd: float, vec: Vector) -> bool:
        if relative:
            return dd < tol * abs(0.5 * (max(vec) + min(vec)))
        return dd < tol

    n = 0
    if d != 0.0 and not stopped(d, current):
        for n in range(1, max_iter + 1):
            current = mapping.apply(current)
            d = diameter(current)
            if keep_trace:
                steps.append(TraceStep(n, current, d))
            if stopped(d, current):
                break

    status = CONVERGED if (d == 0.0 or stopped(d, current)) else MAX_ITER_REACHED
    trace = IterationTrace(mapping, steps) if keep_trace else None
    value = current[0] if d == 0.0 else _read(current, readout)
    return InvariantEstimate(value, n, d, status, trace)


class InvariantMean:
    """The invariant mean K of a mapping, as a callable mean of arity p.

    Each call runs :func:`gauss_iterate` from scratch; ``K(v)`` is the
    configured readout of the final iterate.  ``estimate(v)`` exposes the
    full run (steps, final diameter, status) for callers that need to see
    whether the iteration actually converged.
    """

    def __init__(
        self,
        mapping: MeanTypeMapping,
        tol: float = DEFAULT_TOL,
        max_iter: int = DEFAULT_MAX_ITER,
        readout: str = "mid",
        relative: bool = False,
    ):
        if readout not in READOUTS:
            raise InvalidMapping(f"unknown readout {readout!r}; available: {READOUTS}")
        self.mapping = mapping
        self.tol = tol
        self.max_iter = max_iter
        self.readout = readout
        self.relative = relative

    @property
    def arity(self) -> int:
        return self.mapping.p

    def estimate(self, v: Sequence[float], keep_trace: bool = False) -> InvariantEstimate:
        return gauss_iterate(
            self.mapping, v,
            tol=self.tol, max_iter=self.max_iter,
            readout=self.readout, relative=self.relative,
            keep_trace=keep_trace,
        )

    def __call__(self, v: Sequence[float]) -> float:
        return self.estimate(v).value

    def __repr__(self) -> str:
        return (
            f"InvariantMean({self.mapping}, tol={self.tol!r}, "
            f"max_iter={self.max_iter}, readout={self.readout!r})"
        )


def invariant_mean(
    mapping: MeanTypeMapping,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    readout: str = "mid",
    relative: bool = False,
) -> InvariantMean:
    """Wrap Gauss iteration as a mean object K with K(v) = the limit readout.

    When the mapping is continuous and weakly contractive this is the one
    continuous mean invariant under it; for anything else the object is
    still well-defined per call but carries no uniqueness claim.
    """
    return InvariantMean(mapping, tol=tol, max_iter=max_iter, readout=readout,
                         relative=relative)


# ---------------------------------------------------------------------------
# Residual and uniqueness probes
# ---------------------------------------------------------------------------

MeanFn = Callable[[Sequence[float]], float]


def invariance_residual(
    k: MeanFn,
    mapping: MeanTypeMapping,
    sample_count: int = 1000,
    seed: int = 42,
) -> float:
    """max over samples of |K(M(v)) - K(v)|: zero iff K is invariant there.

    Samples come from the mapping module's sampler (stress vectors plus
    uniform).  An evaluation error aborts the probe, re-raised with the
    offending sample attached.
    """
    if sample_count < 1:
        raise InvalidMapping(f"sample_count must be >= 1, got {sample_count}")
    worst = 0.0
    for idx, v in enumerate(sample_vectors(mapping.domain, mapping.p, sample_count, seed)):
        try:
            residual = abs(k(mapping.apply(v)) - k(v))
        except MeanTypeError as exc:
            raise type(exc)(f"sample {idx} {list(v)}: {exc}") from exc
        if residual > worst:
            worst = residual
    return worst


def uniqueness_probe(
    k1: MeanFn,
    k2: MeanFn,
    domain: Interval,
    p: int,
    sample_count: int = 100,
    seed: int = 42,
) -> float:
    """max over samples of |K1(v) - K2(v)|.

    Two continuous means invariant under the same weakly contractive
    mapping coincide, so for such a pair this should be at the level of
    the iteration tolerance; larger values witness that the two are
    genuinely different means.
    """
    if sample_count < 1:
        raise InvalidMapping(f"sample_count must be >= 1, got {sample_count}")
    worst = 0.0
    for idx, v in enumerate(sample_vectors(domain, p, sample_count, seed)):
        try:
            difference = abs(k1(v) - k2(v))
        except MeanTypeError as exc:
            raise type(exc)(f"sample {idx} {list(v)}: {exc}") from exc
        if difference > worst:
            worst = difference
    return worst
