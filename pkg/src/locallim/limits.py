"""Reference limit laws over ball codes and the regime -> limit map."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from math import ceil, exp, factorial, lgamma, log
from typing import Iterator

import numpy as np

from .errors import BudgetError, ContractViolation, UnsupportedCombination
from .localstats import BallCode, RootPolicy, _hex_entries
from .rng import PoissonBuffer, reference_stream
from .samplers import skeleton_children
from .trees import PlaneTree, ahu_code


@dataclass(frozen=True)
class LimitDist:
    mass: dict
    leftover: float
    origin: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(p < 0 for p in self.mass.values()) or self.leftover < 0:
            raise ContractViolation("negative mass")
        total = sum(self.mass.values()) + self.leftover
        if abs(total - 1.0) > 1e-9:
            raise ContractViolation(f"masses sum to {total}, not 1")

    def prob(self, code: bytes) -> float:
        return self.mass.get(code, 0.0)

    def to_json(self) -> str:
        return json.dumps(
            {"origin": self.origin, "leftover": self.leftover, "entries": _hex_entries(self.mass)},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "LimitDist":
        doc = json.loads(text)
        mass = {BallCode(bytes.fromhex(e["code"])): e["prob"] for e in doc["entries"]}
        return cls(mass, doc["leftover"], doc.get("origin", {}))


# ---------------------------------------------------------------------------
# analytic pieces


def gw_plane_prob(c: float, t: PlaneTree) -> float:
    """Probability that the first ``t.radius`` generations of GW(c) are ``t``."""
    if c < 0:
        raise ContractViolation("c must be >= 0")
    p = 1.0
    for d in t.child_counts:
        p *= exp(-c) * c**d / factorial(d)
    return p


def borel_pmf(k: int) -> float:
    if k < 1:
        raise ContractViolation("Borel pmf needs k >= 1")
    return exp(-k + (k - 1) * log(k) - lgamma(k + 1))


def plane_trees(size: int, radius: int) -> Iterator[PlaneTree]:
    """All radius-``radius`` plane trees with ``size`` vertices.

    Yielded in lexicographic order of their breadth-first child counts.
    """
    if size < 1:
        return
    if radius == 0:
        if size == 1:
            yield PlaneTree((), 0)
        return

    def levels(width: int, left: int, depth: int) -> Iterator[tuple[int, ...]]:
        # counts for `width` vertices at `depth` and below, placing exactly `left` more vertices
        if width == 0:
            if left == 0:
                yield ()
            return
        if depth == radius - 1:
            yield from _compositions(left, width)
            return
        for nxt in range(left + 1):
            for counts in _compositions(nxt, width):
                for rest in levels(nxt, left - nxt, depth + 1):
                    yield counts + rest

    for counts in sorted(levels(1, size - 1, 0)):
        yield PlaneTree(counts, radius)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Weak compositions of ``total`` into ``parts`` parts, lexicographic."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def gw_ball_reference(c: float, radius: int, mass_tol: float, max_trees: int = 2_000_000) -> LimitDist:
    """Law of the unlabelled radius-``radius`` ball of GW(c).

    Plane trees are enumerated by increasing size and their probabilities are
    summed per unlabelled code; enumeration stops after the first size at which
    the unenumerated mass drops below ``mass_tol``.
    """
    if c < 0 or radius < 0 or not 0 < mass_tol < 1:
        raise ContractViolation("need c >= 0, radius >= 0, 0 < mass_tol < 1")
    mass: dict = defaultdict(float)
    acc = 0.0
    seen = 0
    size = 0
    while 1.0 - acc >= mass_tol:
        size += 1
        for t in plane_trees(size, radius):
            seen += 1
            if seen > max_trees:
                raise BudgetError(
                    f"enumerated {max_trees} plane trees; leftover {1.0 - acc:.3g} >= {mass_tol}",
                    attempts=seen,
                    achieved=1.0 - acc,
                )
            p = gw_plane_prob(c, t)
            if p > 0:
                mass[BallCode(t.code())] += p
                acc += p
    leftover = max(0.0, 1.0 - sum(mass.values()))
    origin = {"kind": "analytic", "law": "GW", "c": c, "radius": radius, "max_size": size}
    return LimitDist(dict(mass), leftover, origin)


def sk_ball_reference(k: int, radius: int, N: int, rng: np.random.Generator, seed: int | None = None) -> LimitDist:
    """Monte Carlo law of the radius-``radius`` ball of SK(k) from ``N`` draws."""
    if k < 0 or N < 1 or radius < 0:
        raise ContractViolation("need k >= 0, N >= 1, radius >= 0")
    pois = PoissonBuffer(rng, 1.0)
    counts: dict = defaultdict(int)
    for _ in range(N):
        ch = skeleton_children(k, radius, pois)
        counts[ahu_code(ch, range(len(ch)))] += 1
    mass = {BallCode(code): x / N for code, x in counts.items()}
    origin = {"kind": "monte-carlo", "law": "SK", "k": k, "radius": radius, "N": N, "seed": seed}
    return LimitDist(mass, 0.0, origin)


@lru_cache(maxsize=16)
def sk_reference_for_seed(k: int, radius: int, N: int, seed: int) -> LimitDist:
    """``sk_ball_reference`` on reference stream ``k`` of ``seed``, memoised.

    The result is shared between callers and must not be mutated.
    """
    return sk_ball_reference(k, radius, N, reference_stream(seed, k), seed)


def mixture(a: float, d1: LimitDist, d2: LimitDist) -> LimitDist:
    if not 0 <= a <= 1:
        raise ContractViolation("mixture weight must lie in [0, 1]")
    b = 1 - a
    mass = {}
    for code in set(d1.mass) | set(d2.mass):
        x, y = d1.mass.get(code, 0.0), d2.mass.get(code, 0.0)
        mass[code] = x if x == y else a * x + b * y
    l1, l2 = d1.leftover, d2.leftover
    leftover = l1 if l1 == l2 else a * l1 + b * l2
    return LimitDist(mass, leftover, {"kind": "mixture", "a": a, "parts": [d1.origin, d2.origin]})


# ---------------------------------------------------------------------------
# regimes


REGIMES = ("I", "II", "III", "IV")


@dataclass(frozen=True)
class RegimeSpec:
    """Edge-count regime with a concrete ``m(n)`` rule.

    I: ``m = round(c n / 2)``, ``c`` in [0, 1].  II: ``m = n/2 + ceil(n^(5/6))``
    (so ``s^3 / n^2 = n^(1/2)`` grows).  III: ``m = round(c n / 2)``, ``c`` in
    (1, 2).  IV: ``m = n``.
    """

    regime: str
    c: float | None = None

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ContractViolation(f"unknown regime {self.regime!r}")
        c = self.limit_c
        if self.regime == "I" and not 0 <= c <= 1:
            raise ContractViolation("regime I needs c in [0, 1]")
        if self.regime == "III" and not 1 < c < 2:
            raise ContractViolation("regime III needs c in (1, 2)")

    @property
    def limit_c(self) -> float:
        if self.regime == "II":
            return 1.0
        if self.regime == "IV":
            return 2.0
        if self.c is None:
            raise ContractViolation(f"regime {self.regime} needs c")
        return float(self.c)

    def instantiate(self, n: int) -> tuple[int, int]:
        if self.regime in ("I", "III"):
            return n, round(self.limit_c * n / 2)
        if self.regime == "II":
            return n, n // 2 + ceil(n ** (5 / 6))
        return n, n


@dataclass(frozen=True)
class LimitRecipe:
    """Symbolic limit law: ``GW(c)``, ``SK(k)`` or ``mixture(a, SK(1), GW(1))``."""

    kind: str
    param: float
    parts: tuple["LimitRecipe", ...] = ()

    def __str__(self) -> str:
        if self.kind == "GW":
            return f"GW({self.param:g})"
        if self.kind == "SK":
            return f"SK({int(self.param)})"
        return f"mixture({self.param:g}, {self.parts[0]}, {self.parts[1]})"

    def build(self, radius: int, mass_tol: float = 1e-4, N: int = 10**6, seed: int = 0) -> LimitDist:
        """Concrete law.  SK(k) parts use reference stream ``k`` of ``seed``."""
        if self.kind == "GW":
            return gw_ball_reference(self.param, radius, mass_tol)
        if self.kind == "SK":
            return sk_reference_for_seed(int(self.param), radius, N, seed)
        return mixture(
            self.param,
            self.parts[0].build(radius, mass_tol, N, seed),
            self.parts[1].build(radius, mass_tol, N, seed),
        )


def GW(c: float) -> LimitRecipe:
    return LimitRecipe("GW", float(c))


def SK(k: int) -> LimitRecipe:
    return LimitRecipe("SK", float(k))


_POLICY_LIMITS = {
    RootPolicy.LARGEST_COMPONENT: SK(1),
    RootPolicy.REST: GW(1),
    RootPolicy.CORE: SK(2),
    RootPolicy.KERNEL: SK(3),
    RootPolicy.NON_COMPLEX_PART: GW(1),
    RootPolicy.COMPLEX_PART: SK(1),
}


def predicted_limit(regime: RegimeSpec, policy: RootPolicy | str) -> LimitRecipe:
    policy = RootPolicy.parse(policy) if isinstance(policy, str) else RootPolicy(policy)
    if regime.regime == "I":
        if policy is RootPolicy.UNIFORM:
            return GW(regime.limit_c)
        raise UnsupportedCombination(f"no limit law for regime I with policy {policy.value}")
    if policy is not RootPolicy.UNIFORM:
        return _POLICY_LIMITS[policy]
    if regime.regime == "II":
        return GW(1)
    if regime.regime == "IV":
        return SK(1)
    c = regime.limit_c
    return LimitRecipe("mixture", c - 1, (SK(1), GW(1)))
