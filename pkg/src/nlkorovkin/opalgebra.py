"""Empirical checks of the operator axioms and of their permanence properties.

Failures are data: every checker returns a :class:`PropertyReport` whose
verdict is ``"fail"`` when the worst observed violation exceeds the
tolerance, together with the witnessing inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exceptions import ConfigurationError, DomainError, PreconditionError
from .fields import DomainSpec, ScalarField, as_points
from .operators import AXIOMS, AxiomProfile, OperatorFamily
from .reports import PropertyReport, WorstTracker

GENERATOR_FAMILIES = ("polynomial", "piecewise_linear", "trig", "nonneg_shifted")


@dataclass
class FunctionGenerator:
    """Seeded source of random bounded test functions.

    On the plane the polynomial and piecewise-linear families are composed
    with ``tanh(x / 2)`` so that every generated field is bounded.
    """

    family: str = "polynomial"
    dim: int = 1
    seed: int = 0
    degree: int = 3
    coef_range: tuple = (-1.0, 1.0)
    unbounded_domain: bool = False

    def __post_init__(self):
        if self.family not in GENERATOR_FAMILIES:
            raise ConfigurationError(f"unknown generator family {self.family!r}")
        self.rng = np.random.default_rng(self.seed)

    @classmethod
    def for_domain(cls, domain: DomainSpec, family="polynomial", seed=0, **kw):
        return cls(family, domain.dim, seed, unbounded_domain=domain.kind == "plane", **kw)

    def _coords(self, x):
        if self.unbounded_domain:
            return [np.tanh(c / 2.0) for c in x]
        return list(x)

    def _polynomial(self, rng):
        lo, hi = self.coef_range
        if self.dim == 1:
            c = rng.uniform(lo, hi, self.degree + 1)
            return lambda *x: np.polynomial.polynomial.polyval(self._coords(x)[0], c)
        terms = [(i, j) for i in range(self.degree + 1) for j in range(self.degree + 1 - i)]
        c = rng.uniform(lo, hi, len(terms))

        def poly(*x):
            u, v = self._coords(x)
            return sum(ck * u ** i * v ** j for ck, (i, j) in zip(c, terms))

        return poly

    def _piecewise_linear(self, rng):
        lo, hi = self.coef_range
        knots = np.linspace(-1.0, 1.0, 6) if self.unbounded_domain else np.linspace(0.0, 1.0, 6)
        ys = [rng.uniform(lo, hi, knots.size) for _ in range(self.dim)]
        a = rng.uniform(lo, hi)

        def pl(*x):
            u = self._coords(x)
            parts = [np.interp(ui, knots, y) for ui, y in zip(u, ys)]
            out = sum(parts)
            if self.dim == 2:
                out = out + a * parts[0] * parts[1]
            return out

        return pl

    def _trig(self, rng):
        lo, hi = self.coef_range
        k = rng.integers(1, 4, size=(3, self.dim))
        amp = rng.uniform(lo, hi, size=(3, 2))
        c0 = rng.uniform(lo, hi)

        def trig(*x):
            out = c0
            for (a, b), freq in zip(amp, k):
                phase = sum(fr * xi for fr, xi in zip(freq, x))
                out = out + a * np.cos(np.pi * phase) + b * np.sin(np.pi * phase)
            return out

        return trig

    def sample(self) -> ScalarField:
        rng = self.rng
        if self.family == "polynomial":
            func = self._polynomial(rng)
        elif self.family == "piecewise_linear":
            func = self._piecewise_linear(rng)
        elif self.family == "trig":
            func = self._trig(rng)
        else:
            base = self._polynomial(rng)
            shift = rng.uniform(0.0, 0.5)
            func = lambda *x, base=base, shift=shift: np.abs(base(*x)) + shift  # noqa: E731
        return ScalarField(func, self.dim, name=f"{self.family}#{rng.integers(1 << 30)}")

    def nonnegative(self) -> ScalarField:
        f = self.sample()
        return abs(f).renamed(f"|{f.name}|")

    def ordered_pair(self):
        """``(f, g)`` with ``f <= g`` everywhere (``g = f + |h|``)."""
        f, h = self.sample(), self.sample()
        return f, f + abs(h)

    def comonotone_pair(self):
        """``(phi o h, psi o h)`` with ``phi``, ``psi`` random nondecreasing piecewise-linear maps."""
        h = self.sample()
        rng = self.rng
        knots = np.linspace(-4.0, 4.0, 9)

        def ramp():
            ys = np.concatenate([[rng.uniform(-1, 1)], rng.exponential(0.5, knots.size - 1)])
            return np.cumsum(ys)

        y1, y2 = ramp(), ramp()
        f = h.compose(lambda v: np.interp(v, knots, y1), name=f"phi({h.name})")
        g = h.compose(lambda v: np.interp(v, knots, y2), name=f"psi({h.name})")
        return f, g


def _grid_for(T: OperatorFamily, grid) -> np.ndarray:
    if grid is None:
        res = 11 if T.dim == 2 else 21
        return T.domain.grid(res)
    if isinstance(grid, (int, np.integer)):
        return T.domain.grid(int(grid))
    return as_points(grid, T.dim)


def bkc2_comonotone_witness(period: int = 32):
    """Comonotone pair on the square whose row-wise Choquet integrals are not comonotone.

    ``f = clip(h, 0, 1)`` and ``g = clip(h - 1, 0, 1)`` with
    ``h = 1 + max(sin(2 pi m t1), 0) sin(2 pi m t2)``: on half of the rows
    ``h == 1`` (so ``f = 1``, ``g = 0``), on the other half ``h`` splits
    between 0 and 2, which lowers the inner integral of ``f`` and raises
    that of ``g``.  The iterated integral then fails comonotone additivity.
    """
    m = float(period)

    def h(t1, t2):
        return 1.0 + np.maximum(np.sin(2 * np.pi * m * t1), 0.0) * np.sin(2 * np.pi * m * t2)

    f = ScalarField(lambda a, b: np.clip(h(a, b), 0.0, 1.0), 2, name="clip(h)")
    g = ScalarField(lambda a, b: np.clip(h(a, b) - 1.0, 0.0, 1.0), 2, name="clip(h-1)")
    return f, g


def _nonpositive_ramp(dim):
    p = ScalarField.coordinate(1, dim)
    f = -p if dim == 1 else -(p + ScalarField.coordinate(2, dim))
    return f.renamed("-sum(pr)")


def _comonotone_powers(dim):
    # both increasing in pr1; the max-product weights pick different nodes for f, g, f + g
    p = ScalarField.coordinate(1, dim)
    return p.renamed("pr1"), (p * p * p * p).renamed("pr1^4")


def _clipped_pair():
    # e1 - 1 is clipped to 0 everywhere, e1 never is, their sum only partly
    e = ScalarField.coordinate(1, 1)
    return (e - 1.0).renamed("e1-1"), e.renamed("e1")


def _constant_and_bowl():
    # constants are comonotone with everything, so CA inherits the TR failure on negative g
    g = ScalarField(lambda a, b: -(a * a + b * b) / 8, 2, name="-|x|^2/8")
    return ScalarField.constant(1.0, 2), g


# fixed inputs appended to the random trials of check_axiom
WITNESSES = {
    ("bkc2", "CA"): lambda: [dict(zip("fg", bkc2_comonotone_witness()))],
    ("maxprod", "CA"): lambda: [dict(zip("fg", _comonotone_powers(2)))],
    ("gauss_weierstrass", "CA"): lambda: [dict(zip("fg", _constant_and_bowl()))],
    ("maxprod", "TR"): lambda: [dict(f=_nonpositive_ramp(2), alpha=1.0)],
    ("truncated_bernstein", "CA"): lambda: [dict(zip("fg", _clipped_pair()))],
    ("poss_durrmeyer", "TR"): lambda: [dict(f=_nonpositive_ramp(2), alpha=1.0)],
}


def witnesses_for(T: OperatorFamily, axiom: str) -> list:
    make = WITNESSES.get((T.name, axiom))
    return make() if make else []


def check_axiom(T: OperatorFamily, n: int, axiom: str, gen: Optional[FunctionGenerator] = None,
                grid=None, trials: int = 100, tol: Optional[float] = None,
                witnesses: Optional[list] = None) -> PropertyReport:
    """Check one axiom of ``T_n`` pointwise on ``grid`` over random trials.

    ``axiom`` is one of ``SL`` (subadditive and positively homogeneous),
    ``M`` (monotone), ``TR`` (translatable for shifts ``alpha >= 0``),
    ``CA`` (additive on comonotone pairs), ``unital`` or ``ineq1``
    (``|T f - T g| <= T|f - g|``).  The reported violation is the largest
    signed defect over all trials and grid points.  ``witnesses`` are extra
    fixed inputs (dicts with the keys the axiom uses: ``f``, ``g``, ``a``,
    ``alpha``) run after the random trials.
    """
    if axiom not in AXIOMS + ("ineq1",):
        raise ConfigurationError(f"unknown axiom {axiom!r}")
    gen = gen or FunctionGenerator.for_domain(T.domain, seed=n)
    pts = _grid_for(T, grid)
    tol = T.tolerance if tol is None else tol
    ev = lambda f: T.evaluate(n, f, pts)  # noqa: E731
    worst = WorstTracker()
    one = ScalarField.constant(1.0, T.dim)

    def record(defect, **inputs):
        i = int(np.argmax(defect))
        worst.update(defect[i], dict(inputs, x=tuple(pts[i]), n=n))

    if axiom == "unital":
        record(np.abs(ev(one) - 1.0))
        return worst.report("unital", 1, tol, family=T.name)

    rng = gen.rng
    t_one = ev(one) if axiom == "TR" else None
    fixed = list(witnesses or [])
    for trial in range(trials + len(fixed)):
        w = fixed[trial - trials] if trial >= trials else None
        if axiom == "SL":
            f, g = gen.sample(), gen.sample()
            a = float(rng.choice([0.0, 0.5, 2.0, 10.0])) if trial < 4 else float(rng.uniform(0, 5))
            if w:
                f, g, a = w["f"], w["g"], w.get("a", 2.0)
            tf = ev(f)
            record(ev(f + g) - tf - ev(g), trial=trial, f=f, g=g, kind="subadditive")
            record(np.abs(ev(a * f) - a * tf), trial=trial, f=f, a=a, kind="homogeneous")
        elif axiom == "M":
            f, g = (w["f"], w["g"]) if w else gen.ordered_pair()
            record(ev(f) - ev(g), trial=trial, f=f, g=g)
        elif axiom == "TR":
            f = gen.sample()
            alpha = float(rng.choice([0.5, 1.0, 3.0])) if trial % 2 else float(rng.uniform(0, 3))
            if w:
                f, alpha = w["f"], w["alpha"]
            record(np.abs(ev(f + alpha) - ev(f) - alpha * t_one), trial=trial, f=f, alpha=alpha)
        elif axiom == "CA":
            f, g = (w["f"], w["g"]) if w else gen.comonotone_pair()
            record(np.abs(ev(f + g) - ev(f) - ev(g)), trial=trial, f=f, g=g)
        else:
            f, g = (w["f"], w["g"]) if w else (gen.sample(), gen.sample())
            record(np.abs(ev(f) - ev(g)) - ev(abs(f - g)), trial=trial, f=f, g=g)
    return worst.report(axiom, trials + len(fixed), tol, family=T.name)


def axiom_matrix(T: OperatorFamily, ns: Sequence[int] = (2, 8, 32), trials: int = 100,
                 grid=None, seed: int = 0, generator_family: str = "polynomial",
                 use_witnesses: bool = True) -> dict:
    """``{(n, axiom): PropertyReport}`` for every claimed axiom of ``T``.

    Registered witness fixtures (see ``WITNESSES``) are included unless
    ``use_witnesses`` is false.
    """
    out = {}
    for n in ns:
        for axiom in AXIOMS:
            if T.profile.claim(axiom) is None:
                continue
            gen = FunctionGenerator.for_domain(T.domain, generator_family, seed=seed + 1000 * n)
            fixed = witnesses_for(T, axiom) if use_witnesses else None
            out[(n, axiom)] = check_axiom(T, n, axiom, gen, grid, trials, witnesses=fixed)
    return out


def profile_mismatches(T: OperatorFamily, matrix: dict) -> list:
    """Entries of an :func:`axiom_matrix` whose verdict contradicts the declared profile."""
    bad = []
    for (n, axiom), rep in sorted(matrix.items()):
        claim = T.profile.claim(axiom)
        if claim is None:
            continue
        if claim != rep.passed:
            bad.append((n, axiom, rep))
    return bad


def operator_norm_estimate(T: OperatorFamily, n: int, gen: Optional[FunctionGenerator] = None,
                           trials: int = 50, grid=None) -> float:
    """``max ||T_n f|| / ||f||`` over random ``f``, norms taken on ``grid``.

    The constant function is always included as the first trial.
    """
    if not (T.profile.sublinear and T.profile.monotone):
        raise PreconditionError(f"{T.name} is not declared sublinear and monotone")
    gen = gen or FunctionGenerator.for_domain(T.domain, seed=n)
    pts = _grid_for(T, grid)
    fields = [ScalarField.constant(1.0, T.dim)] + [gen.sample() for _ in range(trials)]
    best = 0.0
    for f in fields:
        fnorm = float(np.max(np.abs(f.at(pts))))
        if fnorm == 0.0:
            continue
        best = max(best, float(np.max(np.abs(T.evaluate(n, f, pts)))) / fnorm)
    return best


def _check_same_unit(S, T, ns, grid, tol):
    pts = _grid_for(S, grid)
    one = ScalarField.constant(1.0, S.dim)
    for n in ns:
        gap = float(np.max(np.abs(S.evaluate(n, one, pts) - T.evaluate(n, one, pts))))
        if gap > tol:
            raise PreconditionError(
                f"{S.name}(1) and {T.name}(1) differ by {gap:.3e} at n={n}")


class SupCombination(OperatorFamily):
    """Pointwise maximum ``(S v T)_n(f) = max(S_n f, T_n f)``."""

    def __init__(self, S: OperatorFamily, T: OperatorFamily):
        super().__init__(S.domain, tolerance=max(S.tolerance, T.tolerance))
        self.S, self.T = S, T
        self.name = f"({S.name} v {T.name})"
        ps, pt = S.profile, T.profile
        self.profile = AxiomProfile(
            sublinear=bool(ps.sublinear and pt.sublinear),
            monotone=bool(ps.monotone and pt.monotone),
            translatable=bool(ps.weakly_nonlinear and pt.weakly_nonlinear) or None,
            unital=bool(ps.unital and pt.unital) or None,
            comonotone_additive=None,
        )

    def image(self, n, f):
        a, b = self.S.image(n, f), self.T.image(n, f)
        return lambda pts: np.maximum(a(pts), b(pts))


def sup_combinator(S: OperatorFamily, T: OperatorFamily, check_ns: Sequence[int] = (1, 2, 8, 32),
                   grid=None, tol: Optional[float] = None) -> SupCombination:
    """Build ``S v T`` after checking ``S(1) = T(1)`` on the grid for ``check_ns``."""
    if S.domain.kind != T.domain.kind:
        raise PreconditionError("S and T act on different domains")
    tol = max(S.tolerance, T.tolerance) if tol is None else tol
    _check_same_unit(S, T, check_ns, grid, tol)
    return SupCombination(S, T)


class Composition(OperatorFamily):
    """``(S o T)_n(f) = S_n(T_n(f))``."""

    def __init__(self, S: OperatorFamily, T: OperatorFamily):
        super().__init__(S.domain, tolerance=S.tolerance + T.tolerance)
        self.S, self.T = S, T
        self.name = f"({S.name} o {T.name})"
        ps, pt = S.profile, T.profile
        self.profile = AxiomProfile(
            sublinear=bool(ps.sublinear and ps.monotone and pt.sublinear),
            monotone=bool(ps.monotone and pt.monotone),
            translatable=bool(ps.weakly_nonlinear and pt.weakly_nonlinear and pt.unital) or None,
            unital=bool(ps.unital and pt.unital) or None,
            comonotone_additive=None,
        )

    def image(self, n, f):
        return self.S.image(n, self.T.field(n, f))


def compose(S: OperatorFamily, T: OperatorFamily) -> Composition:
    if not T.profile.unital:
        raise PreconditionError(f"the inner operator {T.name} must be unital")
    if S.domain.kind != T.domain.kind:
        raise PreconditionError("S and T act on different domains")
    return Composition(S, T)


class Scaled(OperatorFamily):
    """``c * T`` for a constant ``c >= 0``."""

    def __init__(self, T: OperatorFamily, c: float):
        if c < 0:
            raise DomainError("scaling factor must be nonnegative")
        super().__init__(T.domain, tolerance=T.tolerance * max(1.0, c))
        self.T, self.c = T, float(c)
        self.name = f"{c:g}*{T.name}"
        self.profile = AxiomProfile(T.profile.sublinear, T.profile.monotone,
                                    T.profile.translatable, unital=(c == 1.0 and T.profile.unital),
                                    comonotone_additive=T.profile.comonotone_additive)

    def image(self, n, f):
        img = self.T.image(n, f)
        return lambda pts: self.c * img(pts)


class Identity(OperatorFamily):
    """``T_n(f) = f`` for every ``n``."""

    name = "identity"
    profile = AxiomProfile(translatable=True, comonotone_additive=True)

    def image(self, n, f):
        return f.at


def check_holder(T: OperatorFamily, n: int, f: ScalarField, g: ScalarField, p: float,
                 grid=None, tol: Optional[float] = None) -> PropertyReport:
    """``T(|fg|) <= T(|f|^p)^(1/p) T(|g|^q)^(1/q)`` at every grid point, ``1/p + 1/q = 1``."""
    if not p > 1:
        raise DomainError(f"Hoelder exponent must exceed 1, got {p}")
    if not T.profile.unital:
        raise PreconditionError(f"{T.name} is not declared unital")
    q = p / (p - 1.0)
    pts = _grid_for(T, grid)
    tol = T.tolerance if tol is None else tol
    lhs = T.evaluate(n, abs(f * g), pts)
    a = np.maximum(T.evaluate(n, abs(f) ** p, pts), 0.0) ** (1.0 / p)
    b = np.maximum(T.evaluate(n, abs(g) ** q, pts), 0.0) ** (1.0 / q)
    # relative defect: the powers |f|^p can be large
    defect = (lhs - a * b) / np.maximum(1.0, a * b)
    worst = WorstTracker()
    i = int(np.argmax(defect))
    worst.update(defect[i], dict(x=tuple(pts[i]), n=n, f=f, g=g, p=p))
    return worst.report("holder", 1, tol, family=T.name, p=p)


def holder_trials(T: OperatorFamily, n: int, gen: Optional[FunctionGenerator] = None,
                  trials: int = 100, grid=None, p_range=(1.1, 6.0)) -> PropertyReport:
    """Run :func:`check_holder` on random ``(f, g, p)`` triples and merge the results."""
    gen = gen or FunctionGenerator.for_domain(T.domain, seed=n)
    worst = WorstTracker()
    for trial in range(trials):
        f, g = gen.sample(), gen.sample()
        p = float(gen.rng.uniform(*p_range))
        rep = check_holder(T, n, f, g, p, grid)
        w = rep.witness if rep.failed else dict(trial=trial, p=p)
        worst.update(rep.worst_violation, w)
    return worst.report("holder", trials, T.tolerance, family=T.name)
