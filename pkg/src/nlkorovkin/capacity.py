"""Capacities: monotone, possibly nonadditive set functions.

Sets are finite unions of closed intervals, single axis-aligned boxes, or
finite sets of integer indices.  A capacity may carry a *length profile*
``u`` meaning ``mu(A) = u(lebesgue(A))``; the Choquet integrators use it to
avoid building explicit level sets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .exceptions import (InvalidDistortionError, PreconditionError,
                         StructuralError)
from .reports import PropertyReport, WorstTracker

_KINDS = ("interval", "union", "box", "points")


@dataclass(frozen=True)
class MeasurableSet:
    """A set in one of the supported shapes.

    ``components`` holds ``(a, b)`` pairs for ``interval``/``union`` (sorted
    and pairwise disjoint), one ``(a, b)`` pair per axis for ``box``, and
    sorted integers for ``points``.  Use the classmethod constructors; the
    raw initialiser only validates.
    """

    kind: str
    components: tuple = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise StructuralError(f"unknown set kind {self.kind!r}")
        comps = self.components
        if self.kind in ("interval", "union"):
            if self.kind == "interval" and len(comps) != 1:
                raise StructuralError("an interval has exactly one component")
            prev_b = -math.inf
            for a, b in comps:
                if not a <= b:
                    raise StructuralError(f"reversed interval [{a}, {b}]")
                if a <= prev_b:
                    raise StructuralError("interval components must be sorted and disjoint")
                prev_b = b
        elif self.kind == "box":
            for a, b in comps:
                if not a <= b:
                    raise StructuralError(f"reversed box side [{a}, {b}]")
        else:
            if list(comps) != sorted(set(comps)):
                raise StructuralError("point indices must be sorted and unique")

    # constructors -------------------------------------------------------
    @classmethod
    def empty(cls):
        return cls("union", ())

    @classmethod
    def interval(cls, a, b):
        a, b = float(a), float(b)
        if not a <= b:
            raise StructuralError(f"reversed interval [{a}, {b}]")
        return cls("interval", ((a, b),))

    @classmethod
    def union(cls, intervals):
        """Normalise arbitrary ``(a, b)`` pairs into a disjoint sorted union.

        Overlapping or touching pieces are merged.
        """
        pieces = []
        for a, b in intervals:
            a, b = float(a), float(b)
            if not a <= b:
                raise StructuralError(f"reversed interval [{a}, {b}]")
            pieces.append((a, b))
        pieces.sort()
        merged = []
        for a, b in pieces:
            if merged and a <= merged[-1][1]:
                merged[-1] = (merged[-1][0], max(merged[-1][1], b))
            else:
                merged.append((a, b))
        if len(merged) == 1:
            return cls("interval", tuple(merged))
        return cls("union", tuple(merged))

    @classmethod
    def box(cls, *sides):
        return cls("box", tuple((float(a), float(b)) for a, b in sides))

    @classmethod
    def points(cls, indices):
        return cls("points", tuple(sorted({int(i) for i in indices})))

    # queries ------------------------------------------------------------
    @property
    def is_empty(self) -> bool:
        return len(self.components) == 0

    @property
    def is_intervals(self) -> bool:
        return self.kind in ("interval", "union")

    @property
    def dim(self) -> int:
        if self.kind == "box":
            return len(self.components)
        return 1

    @property
    def bounds(self):
        """Convex hull as ``(lo, hi)`` per axis."""
        if self.is_empty:
            raise StructuralError("the empty set has no bounds")
        if self.kind == "box":
            return self.components
        if self.kind == "points":
            return ((self.components[0], self.components[-1]),)
        return ((self.components[0][0], self.components[-1][1]),)

    # set algebra --------------------------------------------------------
    def __or__(self, other: "MeasurableSet") -> "MeasurableSet":
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        if self.is_intervals and other.is_intervals:
            return MeasurableSet.union(self.components + other.components)
        if self.kind == other.kind == "points":
            return MeasurableSet.points(self.components + other.components)
        if self.kind == other.kind == "box":
            if self.issubset(other):
                return other
            if other.issubset(self):
                return self
        raise StructuralError(f"union of {self.kind} and {other.kind} is not representable")

    def __and__(self, other: "MeasurableSet") -> "MeasurableSet":
        if self.is_empty or other.is_empty:
            return MeasurableSet.empty()
        if self.is_intervals and other.is_intervals:
            out = []
            for a, b in self.components:
                for c, d in other.components:
                    lo, hi = max(a, c), min(b, d)
                    if lo <= hi:
                        out.append((lo, hi))
            return MeasurableSet.union(out) if out else MeasurableSet.empty()
        if self.kind == other.kind == "points":
            common = set(self.components) & set(other.components)
            return MeasurableSet.points(common) if common else MeasurableSet.empty()
        if self.kind == other.kind == "box" and self.dim == other.dim:
            sides = []
            for (a, b), (c, d) in zip(self.components, other.components):
                lo, hi = max(a, c), min(b, d)
                if lo > hi:
                    return MeasurableSet.empty()
                sides.append((lo, hi))
            return MeasurableSet.box(*sides)
        raise StructuralError(f"intersection of {self.kind} and {other.kind} is not supported")

    def issubset(self, other: "MeasurableSet") -> bool:
        if self.is_empty:
            return True
        if self.is_intervals and other.is_intervals:
            return all(any(c <= a and b <= d for c, d in other.components)
                       for a, b in self.components)
        if self.kind == other.kind == "points":
            return set(self.components) <= set(other.components)
        if self.kind == other.kind == "box":
            return all(c <= a and b <= d
                       for (a, b), (c, d) in zip(self.components, other.components))
        return False


def lebesgue(s: MeasurableSet) -> float:
    """Length (1-D unions) or area/volume (boxes).  Finite point sets are null."""
    if s.is_empty or s.kind == "points":
        return 0.0
    if s.is_intervals:
        return float(math.fsum(b - a for a, b in s.components))
    return float(math.prod(b - a for a, b in s.components))


def counting(s: MeasurableSet) -> float:
    if s.kind != "points" and not s.is_empty:
        raise StructuralError("counting measure is defined on finite point sets only")
    return float(len(s.components))


@dataclass(frozen=True)
class Distortion:
    """A nondecreasing continuous ``u`` with ``u(0) = 0``.

    ``upper`` is the right end of the range on which ``u`` is validated; it
    should cover the totals of the base measures it will be composed with.
    """

    func: Callable
    concave: bool = False
    upper: float = 1.0
    name: str = "u"

    def __call__(self, t):
        return self.func(t)

    def validate(self, points: int = 1025, tol: float = 1e-12):
        grid = np.linspace(0.0, self.upper, points)
        vals = np.asarray(self.func(grid), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise InvalidDistortionError(f"{self.name} is not finite on [0, {self.upper}]")
        if abs(vals[0]) > tol:
            raise InvalidDistortionError(f"{self.name}(0) = {vals[0]} != 0")
        drops = np.diff(vals)
        if np.any(drops < -tol):
            i = int(np.argmin(drops))
            raise InvalidDistortionError(
                f"{self.name} decreases between {grid[i]:.6g} and {grid[i + 1]:.6g}")
        return self


@dataclass(frozen=True)
class Capacity:
    """A monotone set function vanishing on the empty set.

    ``total`` is the value on the ambient set (not forced to 1).  When
    ``profile`` is set, the value depends on the set only through its
    Lebesgue measure: ``mu(A) = profile(lebesgue(A))``.
    """

    evaluator: Callable[[MeasurableSet], float]
    total: float = 1.0
    submodular: bool = False
    additive: bool = False
    profile: Optional[Callable] = field(default=None, compare=False)
    name: str = "capacity"

    def __call__(self, s: MeasurableSet) -> float:
        if s.is_empty:
            return 0.0
        return float(self.evaluator(s))

    def of_length(self, length):
        """Vectorised ``mu`` on sets of the given Lebesgue measures."""
        if self.profile is None:
            raise PreconditionError(f"{self.name} does not depend on length alone")
        return self.profile(length)


def _identity(t):
    return t


def lebesgue_capacity(total: float = 1.0) -> Capacity:
    return Capacity(lebesgue, total=total, submodular=True, additive=True,
                    profile=_identity, name="lebesgue")


def counting_capacity(size: int) -> Capacity:
    return Capacity(counting, total=float(size), submodular=True, additive=True,
                    name="counting")


def distorted_capacity(base: Capacity, u: Distortion) -> Capacity:
    """``A -> u(base(A))``; submodular whenever ``u`` is concave."""
    if not base.additive:
        raise PreconditionError(f"base capacity {base.name!r} must be additive")
    u.validate()
    profile = None
    if base.profile is not None:
        base_profile = base.profile

        def profile(length):
            return u(base_profile(length))

    def evaluator(s):
        return u(base(s))

    return Capacity(evaluator, total=float(u(base.total)), submodular=u.concave,
                    additive=False, profile=profile, name=f"{u.name}({base.name})")


def sqrt_lebesgue(total: float = 1.0) -> Capacity:
    """The submodular capacity ``A -> sqrt(lebesgue(A))``."""
    u = Distortion(np.sqrt, concave=True, upper=max(total, 1.0), name="sqrt")
    return distorted_capacity(lebesgue_capacity(total), u)


def random_interval_set(rng, ambient=(0.0, 1.0), max_components: int = 3):
    lo, hi = ambient
    k = int(rng.integers(0, max_components + 1))
    if k == 0:
        return MeasurableSet.empty()
    ends = np.sort(rng.uniform(lo, hi, size=2 * k))
    return MeasurableSet.union(zip(ends[0::2], ends[1::2]))


def random_interval_pairs(ambient=(0.0, 1.0), max_components: int = 3):
    """Sampler of arbitrary pairs of finite interval unions inside ``ambient``."""

    def sampler(rng):
        return (random_interval_set(rng, ambient, max_components),
                random_interval_set(rng, ambient, max_components))

    return sampler


def check_capacity_axioms(mu: Capacity, sampler=None, trials: int = 1000,
                          tol: float = 1e-12, seed: int = 0) -> dict:
    """Empirically check the capacity axioms and submodularity.

    Nested pairs are derived from each sampled pair ``(A, B)`` as
    ``A & B <= A <= A | B``.  Returns one :class:`PropertyReport` per
    property, keyed by ``"empty"``, ``"nonnegative"``, ``"monotone"`` and
    ``"submodular"``.
    """
    if sampler is None:
        sampler = random_interval_pairs()
    rng = np.random.default_rng(seed)
    empty, nonneg, mono, sub = (WorstTracker() for _ in range(4))

    empty.update(abs(mu(MeasurableSet.empty())), MeasurableSet.empty())
    for trial in range(trials):
        a, b = sampler(rng)
        meet, join = a & b, a | b
        ma, mb, mmeet, mjoin = mu(a), mu(b), mu(meet), mu(join)
        nonneg.update(-min(ma, mb, mmeet, mjoin), (trial, a, b))
        mono.update(max(mmeet - ma, ma - mjoin, mmeet - mb, mb - mjoin), (trial, a, b))
        sub.update(mjoin + mmeet - ma - mb, (trial, a, b))

    return {
        "empty": empty.report("empty", 1, tol),
        "nonnegative": nonneg.report("nonnegative", trials, tol),
        "monotone": mono.report("monotone", trials, tol),
        "submodular": sub.report("submodular", trials, tol),
    }


__all__ = [
    "MeasurableSet", "Capacity", "Distortion", "PropertyReport",
    "lebesgue", "counting", "lebesgue_capacity", "counting_capacity",
    "distorted_capacity", "sqrt_lebesgue", "check_capacity_axioms",
    "random_interval_pairs", "random_interval_set",
]
