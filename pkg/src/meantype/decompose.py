"""Decomposition of invariant functions through the invariant mean.

A continuous F: I^p -> R invariant under a weakly contractive mean-type
mapping M (that is, F o M = F) factors as F = phi o K, where K is the
continuous invariant mean of M and phi(x) = F(x, ..., x) is F restricted
to the diagonal.  This module checks both halves numerically: the
invariance residual |F(M(v)) - F(v)| and the decomposition residual
|phi(K(v)) - F(v)|, each maximized over a shared sample set.

Residual magnitudes are all the probes report; none of this proves
invariance, and when the hypothesis fails (F not invariant, or K not
converging) the report says so through large residuals and flags rather
than a verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import InvalidMapping, MeanTypeError, ParseError
from .invariant import DEFAULT_MAX_ITER, DEFAULT_TOL, MAX_ITER_REACHED, InvariantMean
from .mapping import MeanTypeMapping, sample_vectors
from .means import eval_mean, parse_mean


@dataclass(frozen=True)
class InvariantFunction:
    """A named continuous function I^p -> R, the F of the probes."""

    name: str
    arity: int
    fn: Callable[[Sequence[float]], float]

    def __call__(self, v: Sequence[float]) -> float:
        return self.fn(v)

    def __str__(self) -> str:
        return self.name


def product_function(p: int) -> InvariantFunction:
    return InvariantFunction("product", p, lambda v: math.prod(v))


def sum_function(p: int) -> InvariantFunction:
    return InvariantFunction("sum", p, lambda v: math.fsum(v))


def coordinate_function(index: int, p: int) -> InvariantFunction:
    if not 1 <= index <= p:
        raise InvalidMapping(f"coordinate index must lie in 1..{p}, got {index}")
    return InvariantFunction(f"coord:{index}", p, lambda v: float(v[index - 1]))


def constant_function(value: float, p: int) -> InvariantFunction:
    return InvariantFunction(f"const:{value!r}", p, lambda v: value)


def mean_function(mapping: MeanTypeMapping, text: str) -> InvariantFunction:
    """A catalog mean, evaluated on the mapping's domain, as an F."""
    spec = parse_mean(text, mapping.p)
    return InvariantFunction(
        f"mean:{spec.canonical()}", mapping.p,
        lambda v: eval_mean(spec, v, mapping.domain),
    )


def compose(outer_name: str, outer: Callable[[float], float],
            inner: InvariantFunction) -> InvariantFunction:
    """The composition outer o inner, for building F = psi o K fixtures."""
    return InvariantFunction(
        f"{outer_name}@{inner.name}", inner.arity,
        lambda v: outer(inner(v)),
    )


_UNARY: dict[str, Callable[[float], float]] = {
    "identity": lambda x: x,
    "square": lambda x: x * x,
    "sqrt": math.sqrt,
    "log": math.log,
    "exp": math.exp,
    "abs": abs,
    "neg": lambda x: -x,
}


def parse_function(text: str, mapping: MeanTypeMapping) -> InvariantFunction:
    """Parse the tiny function catalog used by the CLI.

    Grammar: ``product`` | ``sum`` | ``coord:<k>`` | ``const:<c>`` |
    ``mean:<mean spec>`` | ``<unary>@<function>`` with unary one of
    identity, square, sqrt, log, exp, abs, neg.
    """
    token = text.strip()
    if not token:
        raise ParseError("empty function specification", token=text)
    head, sep, rest = token.partition("@")
    if sep:
        key = head.strip().lower()
        if key not in _UNARY:
            raise ParseError(
                f"unknown unary {head.strip()!r}; available: {sorted(_UNARY)}",
                token=head.strip(),
            )
        return compose(key, _UNARY[key], parse_function(rest, mapping))
    lowered = token.lower()
    if lowered == "product":
        return product_function(mapping.p)
    if lowered == "sum":
        return sum_function(mapping.p)
    if lowered.startswith("coord:"):
        try:
            index = int(token.split(":", 1)[1])
        except ValueError:
            raise ParseError(f"bad coordinate index in {token!r}", token=token) from None
        return coordinate_function(index, mapping.p)
    if lowered.startswith("const:"):
        try:
            value = float(token.split(":", 1)[1])
        except ValueError:
            raise ParseError(f"bad constant in {token!r}", token=token) from None
        return constant_function(value, mapping.p)
    if lowered.startswith("mean:"):
        return mean_function(mapping, token.split(":", 1)[1])
    # bare mean strings double as functions: "geometric", "power:2", ...
    try:
        return mean_function(mapping, token)
    except ParseError:
        raise ParseError(f"unknown function {token!r}", token=token) from None


def diagonal_restriction(f: InvariantFunction) -> Callable[[float], float]:
    """phi(x) = F(x, ..., x): F pinned to the diagonal, exactly.

    A thin adaptor with no approximation; every continuous invariant F
    equals phi o K with this phi.
    """
    def phi(x: float) -> float:
        return f(tuple([float(x)] * f.arity))

    phi.__name__ = f"diagonal_{f.name}"
    return phi


def check_invariance(
    f: InvariantFunction,
    mapping: MeanTypeMapping,
    sample_count: int = 1000,
    seed: int = 42,
) -> float:
    """max over samples of |F(M(v)) - F(v)|; zero for an invariant F."""
    if sample_count < 1:
        raise InvalidMapping(f"sample_count must be >= 1, got {sample_count}")
    worst = 0.0
    for idx, v in enumerate(sample_vectors(mapping.domain, mapping.p, sample_count, seed)):
        try:
            residual = abs(f(mapping.apply(v)) - f(v))
        except MeanTypeError as exc:
            raise type(exc)(f"sample {idx} {list(v)}: {exc}") from exc
        if residual > worst:
            worst = residual
    return worst


@dataclass(frozen=True)
class DecompositionReport:
    """Both residuals of F = phi o K over one shared sample set."""

    fixture: str
    mapping: MeanTypeMapping
    invariance_residual: float
    decomposition_residual: float
    samples: int
    tol: float
    k_steps_min: int
    k_steps_max: int
    k_steps_mean: float
    max_iter_hits: int  # K runs that stopped on max_iter rather than tol

    @property
    def k_converged(self) -> bool:
        return self.max_iter_hits == 0

    def to_json_dict(self) -> dict:
        return {
            "fixture": self.fixture,
            "mapping": self.mapping.describe(),
            "invariance_residual": self.invariance_residual,
            "decomposition_residual": self.decomposition_residual,
            "samples": self.samples,
            "tol": self.tol,
            "K_steps": {
                "min": self.k_steps_min,
                "max": self.k_steps_max,
                "mean": self.k_steps_mean,
            },
            "max_iter_hits": self.max_iter_hits,
        }


def verify_decomposition(
    f: InvariantFunction,
    mapping: MeanTypeMapping,
    tol: float = DEFAULT_TOL,
    sample_count: int = 100,
    seed: int = 42,
    max_iter: int = DEFAULT_MAX_ITER,
) -> DecompositionReport:
    """Measure |F(M(v)) - F(v)| and |phi(K(v)) - F(v)| on one sample set.

    K is computed by Gauss iteration per sample; runs that hit ``max_iter``
    are counted in the report (the factorization claim assumes a
    convergent K, so a nonzero count downgrades the residuals to
    diagnostics).  Large invariance residual means the hypothesis F o M = F
    itself fails, and the decomposition residual is then expected to be
    large as well.
    """
    if sample_count < 1:
        raise InvalidMapping(f"sample_count must be >= 1, got {sample_count}")
    k = InvariantMean(mapping, tol=tol, max_iter=max_iter)
    phi = diagonal_restriction(f)

    worst_inv = 0.0
    worst_dec = 0.0
    steps: list[int] = []
    max_iter_hits = 0
    for idx, v in enumerate(sample_vectors(mapping.domain, mapping.p, sample_count, seed)):
        try:
            fv = f(v)
            worst_inv = max(worst_inv, abs(f(mapping.apply(v)) - fv))
            est = k.estimate(v)
            worst_dec = max(worst_dec, abs(phi(est.value) - fv))
        except MeanTypeError as exc:
            raise type(exc)(f"sample {idx} {list(v)}: {exc}") from exc
        steps.append(est.steps)
        if est.status == MAX_ITER_REACHED:
            max_iter_hits += 1

    return DecompositionReport(
        fixture=f.name,
        mapping=mapping,
        invariance_residual=worst_inv,
        decomposition_residual=worst_dec,
        samples=sample_count,
        tol=tol,
        k_steps_min=min(steps),
        k_steps_max=max(steps),
        k_steps_mean=math.fsum(steps) / len(steps),
        max_iter_hits=max_iter_hits,
    )
