"""Catalog of means on an interval.

A mean is a function M: I^p -> I with the internality property

    min(v) <= M(v) <= max(v)        for every v in I^p,

which forces M(c, ..., c) = c.  This module supplies the concrete
building blocks used everywhere else: the interval domain, a declarative
description of a single mean (:class:`MeanSpec`), evaluation, a textual
form for config files and the CLI, and a sampling probe that checks
internality numerically.

All evaluation is pure and stateless; everything here may be called
concurrently without synchronization.
"""

from __future__ import annotations

import math
import random
import statistics
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import (
    ArityMismatch,
    DomainViolation,
    InvalidInterval,
    InvalidMeanSpec,
    NonFiniteInput,
    ParseError,
)

Vector = tuple[float, ...]

#: Absolute tolerance used when asserting internality numerically.  Exact
#: internality can fail by an ulp under floating-point rounding; anything
#: beyond this slack counts as a genuine violation.
INTERNALITY_TOL = 1e-12

#: Exponents closer to zero than this evaluate through the geometric-mean
#: formula (the analytic limit of the power mean), avoiding cancellation.
POWER_ZERO_CUTOFF = 1e-8

_WEIGHT_SUM_TOL = 1e-12


# ---------------------------------------------------------------------------
# Interval
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    """A nondegenerate subinterval of the reals, endpoints possibly infinite.

    ``lower_closed`` / ``upper_closed`` control whether the finite
    endpoints belong to the interval.  Infinite endpoints are always open.
    """

    lower: float = -math.inf
    upper: float = math.inf
    lower_closed: bool = False
    upper_closed: bool = False

    def __post_init__(self):
        if math.isnan(self.lower) or math.isnan(self.upper):
            raise InvalidInterval("interval endpoints must not be NaN")
        if not self.lower < self.upper:
            raise InvalidInterval(
                f"interval endpoints must satisfy lower < upper, got "
                f"[{self.lower}, {self.upper}]"
            )
        if math.isinf(self.lower) and self.lower_closed:
            raise InvalidInterval("-inf endpoint cannot be closed")
        if math.isinf(self.upper) and self.upper_closed:
            raise InvalidInterval("+inf endpoint cannot be closed")

    def contains(self, x: float) -> bool:
        """Membership test consistent with the closedness flags."""
        if math.isnan(x) or math.isinf(x):
            return False
        if x < self.lower or (x == self.lower and not self.lower_closed):
            return False
        if x > self.upper or (x == self.upper and not self.upper_closed):
            return False
        return True

    def sampling_box(self, extent: float = 100.0) -> tuple[float, float]:
        """A compact [a, b] strictly inside the interval, for random probes.

        Infinite endpoints are cut at ``extent``; open finite endpoints are
        inset by a small fraction of the resulting span so that sampled
        points genuinely belong to the interval.
        """
        lo = -extent if math.isinf(self.lower) else self.lower
        hi = extent if math.isinf(self.upper) else self.upper
        if hi <= lo:  # finite endpoint beyond the cut
            if math.isinf(self.upper):
                hi = lo + 2.0 * extent
            else:
                lo = hi - 2.0 * extent
        span = hi - lo
        inset = 1e-4 * span
        if not self.lower_closed or math.isinf(self.lower):
            lo += inset
        if not self.upper_closed or math.isinf(self.upper):
            hi -= inset
        return lo, hi

    def __str__(self) -> str:
        left = "[" if self.lower_closed else "("
        right = "]" if self.upper_closed else ")"
        return f"{left}{_fmt_endpoint(self.lower)}, {_fmt_endpoint(self.upper)}{right}"


def _fmt_endpoint(x: float) -> str:
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return repr(x)


def parse_interval(text: str) -> Interval:
    """Parse ``(0, inf)`` / ``[1, 10]`` / ``[0.5, 100)`` bracket notation."""
    s = text.strip()
    if len(s) < 2 or s[0] not in "([" or s[-1] not in ")]":
        raise ParseError(f"interval {text!r} must be bracketed, e.g. (0, inf)", token=s)
    lower_closed = s[0] == "["
    upper_closed = s[-1] == "]"
    parts = s[1:-1].split(",")
    if len(parts) != 2:
        raise ParseError(f"interval {text!r} must have two endpoints", token=s)
    lo = _parse_endpoint(parts[0])
    hi = _parse_endpoint(parts[1])
    try:
        return Interval(lo, hi, lower_closed, upper_closed)
    except InvalidInterval as exc:
        raise ParseError(f"interval {text!r}: {exc}", token=s) from exc


def _parse_endpoint(token: str) -> float:
    t = token.strip().lower()
    if t in ("inf", "+inf", "infinity", "+infinity"):
        return math.inf
    if t in ("-inf", "-infinity"):
        return -math.inf
    try:
        return float(t)
    except ValueError:
        raise ParseError(f"bad interval endpoint {token.strip()!r}", token=token.strip()) from None


#: The whole real line; default domain when none is given.
REALS = Interval()

#: The positive half-line, natural domain of geometric-type means.
POSITIVE_REALS = Interval(0.0, math.inf)


# ---------------------------------------------------------------------------
# Generators for quasi-arithmetic means
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Generator:
    """A strictly monotone continuous bijection with a known inverse.

    A quasi-arithmetic mean evaluates g^{-1}(average of g(x_i)); the
    generator's ``domain`` is the natural domain of its argument.  Two
    generators are equal when name and parameter agree (the catalog is
    fixed, so those determine the functions).
    """

    name: str
    fn: Callable[[float], float] = field(compare=False)
    inverse: Callable[[float], float] = field(compare=False)
    domain: Interval = field(compare=False)
    parameter: float | None = None

    def canonical(self) -> str:
        if self.parameter is None:
            return self.name
        return f"{self.name}:{self.parameter!r}"


def _power_generator(q: float) -> Generator:
    if q == 0 or not math.isfinite(q):
        raise InvalidMeanSpec(f"power generator exponent must be finite and nonzero, got {q}")
    return Generator(
        "power",
        fn=lambda x, q=q: x**q,
        inverse=lambda y, q=q: y ** (1.0 / q),
        domain=POSITIVE_REALS,
        parameter=q,
    )


GENERATORS: dict[str, Callable[..., Generator]] = {
    "identity": lambda: Generator("identity", lambda x: x, lambda y: y, REALS),
    "log": lambda: Generator("log", math.log, math.exp, POSITIVE_REALS),
    "exp": lambda: Generator("exp", math.exp, math.log, REALS),
    "power": _power_generator,
}


def make_generator(name: str, parameter: float | None = None) -> Generator:
    """Look up a generator from the fixed catalog by name."""
    key = name.strip().lower()
    if key not in GENERATORS:
        raise InvalidMeanSpec(
            f"unknown generator {name!r}; available: {sorted(GENERATORS)}"
        )
    if key == "power":
        if parameter is None:
            raise InvalidMeanSpec("power generator requires an exponent, e.g. power:2")
        return GENERATORS[key](parameter)
    if parameter is not None:
        raise InvalidMeanSpec(f"generator {name!r} takes no parameter")
    return GENERATORS[key]()


# ---------------------------------------------------------------------------
# MeanSpec
# ---------------------------------------------------------------------------

KINDS = (
    "arithmetic",
    "geometric",
    "harmonic",
    "power",
    "quasi_arithmetic",
    "median",
    "min",
    "max",
    "projection",
    "weighted_arithmetic",
)

#: Kinds whose natural domain is the strictly positive reals.
_POSITIVE_ONLY = {"geometric", "harmonic", "power"}


@dataclass(frozen=True)
class MeanSpec:
    """Declarative description of a single mean of arity ``arity``.

    Use the classmethod constructors (``MeanSpec.arithmetic(3)``,
    ``MeanSpec.power(0.5, 2)``, ...) or :func:`parse_mean` rather than
    filling fields by hand.
    """

    kind: str
    arity: int
    exponent: float | None = None
    generator: Generator | None = None
    index: int | None = None
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidMeanSpec(f"unknown mean kind {self.kind!r}; available: {KINDS}")
        if not isinstance(self.arity, int) or self.arity < 1:
            raise InvalidMeanSpec(f"arity must be a positive integer, got {self.arity!r}")
        if self.kind == "power":
            if self.exponent is None or not math.isfinite(self.exponent):
                raise InvalidMeanSpec("power mean requires a finite exponent")
        if self.kind == "quasi_arithmetic" and self.generator is None:
            raise InvalidMeanSpec("quasi-arithmetic mean requires a generator")
        if self.kind == "projection":
            if self.index is None or not 1 <= self.index <= self.arity:
                raise InvalidMeanSpec(
                    f"projection index must lie in 1..{self.arity}, got {self.index!r}"
                )
        if self.kind == "weighted_arithmetic":
            w = self.weights
            if w is None or len(w) != self.arity:
                raise InvalidMeanSpec(
                    f"weighted_arithmetic requires {self.arity} weights, got {w!r}"
                )
            if any(wi < 0 or not math.isfinite(wi) for wi in w):
                raise InvalidMeanSpec(f"weights must be finite and nonnegative, got {w!r}")
            if abs(math.fsum(w) - 1.0) > _WEIGHT_SUM_TOL:
                raise InvalidMeanSpec(f"weights must sum to 1, got sum {math.fsum(w)!r}")

    # -- constructors -------------------------------------------------------

    @classmethod
    def arithmetic(cls, arity: int) -> MeanSpec:
        return cls("arithmetic", arity)

    @classmethod
    def geometric(cls, arity: int) -> MeanSpec:
        return cls("geometric", arity)

    @classmethod
    def harmonic(cls, arity: int) -> MeanSpec:
        return cls("harmonic", arity)

    @classmethod
    def power(cls, exponent: float, arity: int) -> MeanSpec:
        return cls("power", arity, exponent=float(exponent))

    @classmethod
    def quasi_arithmetic(cls, generator: Generator | str, arity: int,
                         parameter: float | None = None) -> MeanSpec:
        if isinstance(generator, str):
            generator = make_generator(generator, parameter)
        return cls("quasi_arithmetic", arity, generator=generator)

    @classmethod
    def median(cls, arity: int) -> MeanSpec:
        return cls("median", arity)

    @classmethod
    def minimum(cls, arity: int) -> MeanSpec:
        return cls("min", arity)

    @classmethod
    def maximum(cls, arity: int) -> MeanSpec:
        return cls("max", arity)

    @classmethod
    def projection(cls, index: int, arity: int) -> MeanSpec:
        return cls("projection", arity, index=index)

    @classmethod
    def weighted_arithmetic(cls, weights: Sequence[float], arity: int | None = None) -> MeanSpec:
        w = tuple(float(x) for x in weights)
        return cls("weighted_arithmetic", arity if arity is not None else len(w), weights=w)

    # -- properties ---------------------------------------------------------

    @property
    def requires_positive(self) -> bool:
        """True when the mean's natural domain is the strictly positive reals."""
        if self.kind in _POSITIVE_ONLY:
            return True
        if self.kind == "quasi_arithmetic":
            return self.generator.domain is POSITIVE_REALS or self.generator.domain.lower >= 0
        return False

    def canonical(self) -> str:
        """Canonical textual form, parseable by :func:`parse_mean`."""
        if self.kind == "power":
            return f"power:{self.exponent!r}"
        if self.kind == "quasi_arithmetic":
            return f"quasi:{self.generator.canonical()}"
        if self.kind == "projection":
            return f"projection:{self.index}"
        if self.kind == "weighted_arithmetic":
            return "weighted:" + ",".join(repr(w) for w in self.weights)
        return self.kind

    def __str__(self) -> str:
        return self.canonical()


def parse_mean(text: str, arity: int) -> MeanSpec:
    """Parse the canonical textual form of a mean.

    Accepted forms (case-insensitive): ``arithmetic``, ``geometric``,
    ``harmonic``, ``median``, ``min``, ``max``, ``power:<exponent>``,
    ``projection:<index>``, ``quasi:<generator>`` (generators ``identity``,
    ``log``, ``exp``, ``power:<q>``), ``weighted:<w1>,...,<wp>``.
    """
    token = text.strip().lower()
    if not token:
        raise ParseError("empty mean specification", token=text)
    head, _, rest = token.partition(":")
    try:
        if head in ("arithmetic", "geometric", "harmonic", "median", "min", "max"):
            if rest:
                raise ParseError(f"mean {head!r} takes no parameter: {text.strip()!r}", token=rest)
            return MeanSpec(head, arity)
        if head == "power":
            return MeanSpec.power(_parse_number(rest, text), arity)
        if head == "projection":
            try:
                index = int(rest)
            except ValueError:
                raise ParseError(f"bad projection index {rest!r}", token=rest) from None
            return MeanSpec.projection(index, arity)
        if head == "quasi":
            gen_name, _, gen_param = rest.partition(":")
            param = _parse_number(gen_param, text) if gen_param else None
            return MeanSpec.quasi_arithmetic(gen_name, arity, parameter=param)
        if head == "weighted":
            if not rest:
                raise ParseError(f"weighted mean needs weights: {text.strip()!r}", token=token)
            weights = [_parse_number(w, text) for w in rest.split(",")]
            return MeanSpec.weighted_arithmetic(weights, arity)
    except InvalidMeanSpec as exc:
        raise ParseError(f"bad mean {text.strip()!r}: {exc}", token=token) from exc
    raise ParseError(f"unknown mean {head!r} in {text.strip()!r}", token=head)


def _parse_number(token: str, context: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(
            f"bad numeric token {token!r} in mean {context.strip()!r}", token=token
        ) from None


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def eval_mean(spec: MeanSpec, v: Sequence[float], domain: Interval = REALS) -> float:
    """Evaluate the mean described by ``spec`` at the vector ``v``.

    Raises :class:`ArityMismatch`, :class:`NonFiniteInput`, or
    :class:`DomainViolation` when the vector is unusable; otherwise the
    result satisfies internality up to rounding.
    """
    v = tuple(float(x) for x in v)
    if len(v) != spec.arity:
        raise ArityMismatch(
            f"mean {spec} has arity {spec.arity}, got vector of length {len(v)}"
        )
    _check_coordinates(v, domain)
    if spec.requires_positive:
        _check_positive(v, spec)
    return _dispatch(spec, v)


def _check_coordinates(v: Vector, domain: Interval) -> None:
    for i, x in enumerate(v):
        if not math.isfinite(x):
            raise NonFiniteInput(f"coordinate {i + 1} is {x!r}")
        if not domain.contains(x):
            raise DomainViolation(f"coordinate {i + 1} = {x!r} outside domain {domain}")


def _check_positive(v: Vector, spec: MeanSpec) -> None:
    for i, x in enumerate(v):
        if x <= 0.0:
            raise DomainViolation(
                f"mean {spec} requires strictly positive coordinates; "
                f"coordinate {i + 1} = {x!r}"
            )


def _geometric(v: Vector) -> float:
    return math.exp(math.fsum(math.log(x) for x in v) / len(v))


def _power_mean(v: Vector, t: float) -> float:
    if abs(t) < POWER_ZERO_CUTOFF:
        return _geometric(v)
    # Work in log space so large |t| cannot overflow: the mean of x^t is
    # exp(t*L_max) * mean(exp(t*(L_i - L_max))).
    logs = [t * math.log(x) for x in v]
    top = max(logs)
    acc = math.fsum(math.exp(l - top) for l in logs) / len(v)
    return math.exp((top + math.log(acc)) / t)


def _quasi(v: Vector, gen: Generator) -> float:
    if gen.name == "log":
        return _geometric(v)
    if gen.name == "exp":
        # log of the average of exp(x_i), stabilized against overflow.
        top = max(v)
        return top + math.log(math.fsum(math.exp(x - top) for x in v) / len(v))
    if gen.name == "power":
        return _power_mean(v, gen.parameter)
    images = [gen.fn(x) for x in v]
    return gen.inverse(math.fsum(images) / len(images))


def _dispatch(spec: MeanSpec, v: Vector) -> float:
    # Constant vectors are exact fixed points of every mean; returning the
    # coordinate directly keeps reflexivity free of rounding.
    if all(x == v[0] for x in v):
        return v[0]
    kind = spec.kind
    if kind == "arithmetic":
        return math.fsum(v) / len(v)
    if kind == "geometric":
        return _geometric(v)
    if kind == "harmonic":
        return len(v) / math.fsum(1.0 / x for x in v)
    if kind == "power":
        return _power_mean(v, spec.exponent)
    if kind == "quasi_arithmetic":
        return _quasi(v, spec.generator)
    if kind == "median":
        return float(statistics.median(v))
    if kind == "min":
        return min(v)
    if kind == "max":
        return max(v)
    if kind == "projection":
        return v[spec.index - 1]
    if kind == "weighted_arithmetic":
        return math.fsum(w * x for w, x in zip(spec.weights, v))
    raise InvalidMeanSpec(f"unknown mean kind {kind!r}")  # unreachable


def mean_callable(spec: MeanSpec, domain: Interval = REALS) -> Callable[[Sequence[float]], float]:
    """Bind a spec and domain into a plain ``f(v) -> float`` callable."""
    def fn(v: Sequence[float]) -> float:
        return eval_mean(spec, v, domain)

    fn.__name__ = f"mean_{spec.canonical()}"
    return fn


# ---------------------------------------------------------------------------
# Internality probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InternalityViolation:
    vector: Vector
    value: float
    excess: float  # how far outside [min(v), max(v)] the value fell


@dataclass
class InternalityReport:
    """Outcome of sampling a mean for internality violations."""

    spec: MeanSpec
    domain: Interval
    sample_count: int
    violations: list[InternalityViolation] = field(default_factory=list)
    error_count: int = 0

    @property
    def violation_count(self) -> int:
        return len(self.violations)

    @property
    def worst(self) -> InternalityViolation | None:
        if not self.violations:
            return None
        return max(self.violations, key=lambda viol: viol.excess)


def internality_probe(
    spec: MeanSpec,
    domain: Interval,
    sample_count: int = 1000,
    seed: int = 42,
) -> InternalityReport:
    """Sample random vectors and record every internality violation.

    Evaluation errors on individual samples (e.g. a geometric mean probed
    on a domain containing zero) are counted, never raised: the probe
    always completes.  Deterministic for a fixed seed.
    """
    if sample_count < 1:
        raise InvalidMeanSpec(f"sample_count must be >= 1, got {sample_count}")
    rng = random.Random(seed)
    lo, hi = domain.sampling_box()
    report = InternalityReport(spec, domain, sample_count)
    for _ in range(sample_count):
        v = tuple(rng.uniform(lo, hi) for _ in range(spec.arity))
        try:
            value = eval_mean(spec, v, domain)
        except (ArityMismatch, DomainViolation, NonFiniteInput):
            report.error_count += 1
            continue
        excess = max(min(v) - value, value - max(v))
        if excess > INTERNALITY_TOL:
            report.violations.append(InternalityViolation(v, value, excess))
    return report
