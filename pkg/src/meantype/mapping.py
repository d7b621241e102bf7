"""Mean-type mappings and their diameter dynamics.

A mean-type mapping M = (M_1, ..., M_p) applies p means of arity p
coordinate-wise, giving a self-map of I^p.  Internality of the components
makes the diameter max(v) - min(v) nonincreasing along iterates; this
module provides the iteration machinery and the probes built on it:

* ``is_contractive_at`` / ``probe_contractivity`` -- does one application
  strictly shrink the diameter?
* ``find_n0`` -- the smallest n with diam(M^n(v)) < diam(v), the
  per-vector index of weak contractivity.
* ``star_apply`` -- the derived map v -> M^{n0(v)}(v), which shrinks the
  diameter in a single (compound) step wherever n0 exists.

Everything is pure; probes are sequential loops, deterministic per seed.
"""

from __future__ import annotations

import csv
import io
import math
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import (
    ConstantVector,
    EmptyVector,
    InvalidMapping,
    MeanTypeError,
    NonFiniteInput,
    NotFoundWithinCap,
    ParseError,
)
from .means import (
    Interval,
    MeanSpec,
    Vector,
    eval_mean,
    parse_interval,
    parse_mean,
)

#: Sampled vectors with diameter at or below this are treated as constant
#: noise and skipped by the contractivity probe.
NEGLIGIBLE_DIAMETER = 1e-9

DEFAULT_CAP = 1000


def diameter(v: Sequence[float]) -> float:
    """max(v) - min(v); zero exactly when the vector is constant."""
    if len(v) == 0:
        raise EmptyVector("diameter of an empty vector is undefined")
    for i, x in enumerate(v):
        if not math.isfinite(x):
            raise NonFiniteInput(f"coordinate {i + 1} is {x!r}")
    return max(v) - min(v)


@dataclass(frozen=True)
class MeanTypeMapping:
    """An ordered tuple of p means of arity p over a shared interval."""

    components: tuple[MeanSpec, ...]
    domain: Interval
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        p = len(self.components)
        if p < 2:
            raise InvalidMapping(f"a mean-type mapping needs p >= 2 components, got {p}")
        for i, spec in enumerate(self.components):
            if spec.arity != p:
                raise InvalidMapping(
                    f"component {i + 1} ({spec}) has arity {spec.arity}, expected {p}"
                )

    @property
    def p(self) -> int:
        return len(self.components)

    def apply(self, v: Sequence[float]) -> Vector:
        """One application: (M_1(v), ..., M_p(v)).

        Component evaluation errors are re-raised with the failing
        component index prepended.
        """
        v = tuple(float(x) for x in v)
        out = []
        for i, spec in enumerate(self.components):
            try:
                out.append(eval_mean(spec, v, self.domain))
            except MeanTypeError as exc:
                raise _annotate(exc, f"component {i + 1} ({spec})") from exc
        return tuple(out)

    def iterate(self, v: Sequence[float], n: int) -> IterationTrace:
        """Trace of v, M(v), ..., M^n(v) with per-step diameters."""
        if n < 0:
            raise InvalidMapping(f"iteration count must be >= 0, got {n}")
        v = tuple(float(x) for x in v)
        steps = [TraceStep(0, v, diameter(v))]
        for k in range(1, n + 1):
            try:
                v = self.apply(v)
            except MeanTypeError as exc:
                raise _annotate(exc, f"step {k}") from exc
            steps.append(TraceStep(k, v, diameter(v)))
        return IterationTrace(self, steps)

    def describe(self) -> dict:
        """JSON-ready description: p, domain, component strings."""
        return {
            "p": self.p,
            "domain": str(self.domain),
            "components": [spec.canonical() for spec in self.components],
        }

    def __str__(self) -> str:
        comps = ", ".join(spec.canonical() for spec in self.components)
        return f"({comps}) on {self.domain}"


def _annotate(exc: MeanTypeError, context: str) -> MeanTypeError:
    new = type(exc)(f"{context}: {exc}")
    new.__dict__.update(exc.__dict__)
    return new


@dataclass(frozen=True)
class TraceStep:
    step: int
    vector: Vector
    diameter: float


@dataclass(frozen=True)
class IterationTrace:
    """Iterates of a mapping together with their diameters."""

    mapping: MeanTypeMapping
    steps: list[TraceStep]

    @property
    def last(self) -> TraceStep:
        return self.steps[-1]

    def __len__(self) -> int:
        return len(self.steps)

    def to_json_dict(self) -> dict:
        return {
            "mapping": self.mapping.describe(),
            "steps": [
                {"step": s.step, "vector": list(s.vector), "diameter": s.diameter}
                for s in self.steps
            ],
        }

    def to_csv(self) -> str:
        """CSV with fixed column order: step, x1..xp, diameter."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["step"] + [f"x{i + 1}" for i in range(self.mapping.p)] + ["diameter"])
        for s in self.steps:
            writer.writerow([s.step] + [repr(x) for x in s.vector] + [repr(s.diameter)])
        return buf.getvalue()


# ---------------------------------------------------------------------------
# Contractivity
# ---------------------------------------------------------------------------

def is_contractive_at(mapping: MeanTypeMapping, v: Sequence[float]) -> bool:
    """True iff one application strictly decreases the diameter at v.

    Strictness is an exact floating comparison: a mapping that merely
    preserves the diameter (a permutation of coordinates, say) must not
    pass.  Defined only for nonconstant v.
    """
    d = diameter(v)
    if d == 0.0:
        raise ConstantVector("contractivity at a constant vector is undefined")
    return diameter(mapping.apply(v)) < d


@dataclass(frozen=True)
class ContractivityVerdict:
    """Result of sampling for a contractivity counterexample.

    Sampling can refute the for-all-v definition, never prove it: a
    ``counterexample`` of None means only that no witness was found.
    """

    mapping: MeanTypeMapping
    counterexample: Vector | None
    samples_tested: int
    skipped: int

    @property
    def found(self) -> bool:
        return self.counterexample is not None

    def __str__(self) -> str:
        if self.found:
            return f"counterexample {list(self.counterexample)}"
        return "no counterexample found"


def probe_contractivity(
    mapping: MeanTypeMapping,
    sample_count: int = 1000,
    seed: int = 42,
) -> ContractivityVerdict:
    """Search sampled vectors for one where the diameter fails to shrink.

    The sample stream starts with deterministic stress vectors
    (near-constant, one-outlier, alternating extremes) and continues
    uniformly on a compact sub-box of the domain.  Vectors of negligible
    diameter and samples that raise evaluation errors are skipped and
    counted.
    """
    if sample_count < 1:
        raise InvalidMapping(f"sample_count must be >= 1, got {sample_count}")
    skipped = 0
    tested = 0
    for v in sample_vectors(mapping.domain, mapping.p, sample_count, seed):
        if diameter(v) <= NEGLIGIBLE_DIAMETER:
            skipped += 1
            continue
        try:
            contractive = is_contractive_at(mapping, v)
        except MeanTypeError:
            skipped += 1
            continue
        tested += 1
        if not contractive:
            return ContractivityVerdict(mapping, v, tested, skipped)
    return ContractivityVerdict(mapping, None, tested, skipped)


def find_n0(mapping: MeanTypeMapping, v: Sequence[float], cap: int = DEFAULT_CAP) -> int:
    """Smallest n in [1, cap] with diam(M^n(v)) < diam(v), strictly.

    Diameters are nonincreasing under mean-type mappings, so once the
    strict drop happens at n it persists for every later iterate; checking
    the first drop therefore settles the per-vector condition.  Raises
    :class:`ConstantVector` for constant v and :class:`NotFoundWithinCap`
    (with the full trace attached) when no iterate within the cap drops --
    which diagnoses, but does not disprove, weak contractivity.
    """
    n0, _ = _search_n0(mapping, v, cap)
    return n0


def star_apply(mapping: MeanTypeMapping, v: Sequence[float], cap: int = DEFAULT_CAP) -> Vector:
    """The derived mapping M*: v -> M^{n0(v)}(v).

    Strictly decreases the diameter whenever n0 is found.  Constant
    vectors are fixed points of every mean-type mapping and are returned
    unchanged (n0 is undefined for them).
    """
    v = tuple(float(x) for x in v)
    if diameter(v) == 0.0:
        return v
    _, image = _search_n0(mapping, v, cap)
    return image


def _search_n0(mapping: MeanTypeMapping, v: Sequence[float], cap: int) -> tuple[int, Vector]:
    if cap < 1:
        raise InvalidMapping(f"cap must be >= 1, got {cap}")
    v = tuple(float(x) for x in v)
    d0 = diameter(v)
    if d0 == 0.0:
        raise ConstantVector("n0 is defined only for nonconstant vectors")
    steps = [TraceStep(0, v, d0)]
    current = v
    for n in range(1, cap + 1):
        current = mapping.apply(current)
        dn = diameter(current)
        steps.append(TraceStep(n, current, dn))
        if dn < d0:
            return n, current
    trace = IterationTrace(mapping, steps)
    raise NotFoundWithinCap(
        f"no diameter decrease within {cap} iterations "
        f"(start diameter {d0!r}, final {steps[-1].diameter!r})",
        trace=trace,
        cap=cap,
    )


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def sample_vectors(
    domain: Interval,
    p: int,
    count: int,
    seed: int = 42,
    stress: bool = True,
) -> Iterator[Vector]:
    """Yield ``count`` vectors in domain^p: stress vectors, then uniform.

    The three stress vectors are deterministic functions of the domain
    (contractivity failures tend to live at structured vectors):
    near-constant, one-outlier, and alternating extremes.  The remainder
    is coordinate-wise uniform on the domain's sampling box, deterministic
    for a fixed seed.
    """
    lo, hi = domain.sampling_box()
    produced = 0
    if stress:
        for v in _stress_vectors(lo, hi, p):
            if produced >= count:
                return
            produced += 1
            yield v
    rng = random.Random(seed)
    while produced < count:
        produced += 1
        yield tuple(rng.uniform(lo, hi) for _ in range(p))


def _stress_vectors(lo: float, hi: float, p: int) -> list[Vector]:
    mid = 0.5 * (lo + hi)
    wiggle = 1e-6 * (hi - lo)
    near_constant = tuple(mid + (wiggle if i % 2 else 0.0) for i in range(p))
    one_outlier = tuple(hi if i == p - 1 else lo for i in range(p))
    alternating = tuple(hi if i % 2 else lo for i in range(p))
    return [near_constant, one_outlier, alternating]


# ---------------------------------------------------------------------------
# Built-in mapping families
# ---------------------------------------------------------------------------

def agm_mapping(domain: Interval | None = None) -> MeanTypeMapping:
    """(arithmetic, geometric) on the positive half-line: the AGM pair."""
    dom = domain if domain is not None else Interval(0.0, math.inf)
    return MeanTypeMapping(
        (MeanSpec.arithmetic(2), MeanSpec.geometric(2)), dom, name="agm"
    )


def arithmetic_harmonic_mapping(domain: Interval | None = None) -> MeanTypeMapping:
    """(arithmetic, harmonic) pair; its invariant mean is sqrt(x*y)."""
    dom = domain if domain is not None else Interval(0.0, math.inf)
    return MeanTypeMapping(
        (MeanSpec.arithmetic(2), MeanSpec.harmonic(2)), dom, name="arithmetic-harmonic"
    )


def shift_average_mapping(p: int = 3, domain: Interval | None = None) -> MeanTypeMapping:
    """p-1 coordinate shifts plus an arithmetic mean: weakly contractive.

    Components: (projection 2, projection 3, ..., projection p,
    arithmetic).  One application can preserve the diameter (the shifted
    coordinates may still span the full range), but mixing through the
    arithmetic slot eventually shrinks it, so n0(v) is finite but often
    greater than 1.  This family is the package's stock example of a
    mapping that is weakly contractive without being contractive; no
    structural claim is made beyond what the probes verify per vector.
    """
    if p < 2:
        raise InvalidMapping(f"shift-average family needs p >= 2, got {p}")
    dom = domain if domain is not None else Interval()
    comps = tuple(MeanSpec.projection(i + 2, p) for i in range(p - 1))
    comps += (MeanSpec.arithmetic(p),)
    return MeanTypeMapping(comps, dom, name=f"shift-average-{p}")


def projection_mapping(p: int = 2, domain: Interval | None = None) -> MeanTypeMapping:
    """The identity-like mapping (projection 1, ..., projection p).

    Never decreases the diameter; useful as the stock non-convergent
    fixture.
    """
    dom = domain if domain is not None else Interval()
    comps = tuple(MeanSpec.projection(i + 1, p) for i in range(p))
    return MeanTypeMapping(comps, dom, name=f"projections-{p}")


# ---------------------------------------------------------------------------
# Config format
# ---------------------------------------------------------------------------

def parse_mapping_config(text: str, name: str | None = None) -> MeanTypeMapping:
    """Parse the plain-text mapping format shared by CLI and fixtures.

    ::

        # AGM pair on the positive half-line
        p = 2
        domain = (0, inf)
        components = arithmetic, geometric

    Keys are case-insensitive; ``#`` starts a comment.  The ``components``
    list splits on ``;`` when one is present, otherwise on ``,``; means
    whose canonical form embeds commas (``weighted:0.3,0.7``) therefore
    need either the ``;`` separator or one ``component =`` line each.
    """
    p: int | None = None
    domain: Interval | None = None
    component_tokens: list[str] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(f"line {lineno}: expected key = value, got {raw.strip()!r}",
                             token=raw.strip())
        key = key.strip().lower()
        value = value.strip()
        if key == "p":
            try:
                p = int(value)
            except ValueError:
                raise ParseError(f"line {lineno}: bad p value {value!r}", token=value) from None
        elif key == "domain":
            domain = parse_interval(value)
        elif key == "components":
            sep = ";" if ";" in value else ","
            component_tokens.extend(tok.strip() for tok in value.split(sep) if tok.strip())
        elif key == "component":
            component_tokens.append(value)
        else:
            raise ParseError(f"line {lineno}: unknown key {key!r}", token=key)
    if p is None:
        raise ParseError("mapping config is missing the key 'p'", token="p")
    if domain is None:
        raise ParseError("mapping config is missing the key 'domain'", token="domain")
    if not component_tokens:
        raise ParseError("mapping config is missing the key 'components'", token="components")
    if len(component_tokens) != p:
        raise ParseError(
            f"mapping config declares p = {p} but lists {len(component_tokens)} components",
            token="components",
        )
    components = tuple(parse_mean(tok, p) for tok in component_tokens)
    try:
        return MeanTypeMapping(components, domain, name=name)
    except InvalidMapping as exc:
        raise ParseError(str(exc)) from exc


def format_mapping_config(mapping: MeanTypeMapping) -> str:
    """Inverse of :func:`parse_mapping_config`, up to comments."""
    canon = [spec.canonical() for spec in mapping.components]
    sep = "; " if any("," in c for c in canon) else ", "
    return f"p = {mapping.p}\ndomain = {mapping.domain}\ncomponents = {sep.join(canon)}\n"


def load_mapping(path: str) -> MeanTypeMapping:
    """Read a mapping config file; the file stem becomes the mapping name."""
    import os

    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read mapping file {path!r}: {exc}", token=path) from exc
    name = os.path.splitext(os.path.basename(path))[0]
    return parse_mapping_config(text, name=name)
