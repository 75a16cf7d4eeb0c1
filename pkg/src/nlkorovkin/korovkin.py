"""Convergence harness: test sets, separating functions, rate bounds.

Uniform convergence is measured as the maximum error over a fixed
evaluation grid of the family's domain (for the plane: the observation
window), reported per ``n`` alongside the grid resolution.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .exceptions import ConfigurationError, EvaluationError
from .fields import DomainSpec, ScalarField, as_points
from .operators import OperatorFamily
from .reports import PropertyReport, WorstTracker


# ---------------------------------------------------------------------------
# separating functions and test sets

@dataclass(frozen=True)
class SeparatingFn:
    """Nonnegative ``gamma(x, y)`` vanishing only on the diagonal.

    ``gamma`` is vectorised over leading axes of ``(..., dim)`` point arrays.
    """

    gamma: Callable
    domain: DomainSpec
    name: str = "gamma"

    def __call__(self, x, y):
        return self.gamma(x, y)

    def section(self, x) -> ScalarField:
        """The test function ``gamma_x = gamma(x, .)``."""
        x = np.asarray(x, dtype=float).reshape(-1)
        g = self.gamma

        def gx(*coords):
            y = np.stack(np.broadcast_arrays(*coords), axis=-1)
            return g(np.broadcast_to(x, y.shape), y)

        return ScalarField(gx, self.domain.dim, name=f"{self.name}_x")


def squared_distance(domain: DomainSpec) -> SeparatingFn:
    return SeparatingFn(lambda x, y: domain.metric(x, y) ** 2, domain, "d^2")


def separating_from_functions(functions: Sequence[ScalarField], domain: DomainSpec) -> SeparatingFn:
    """``sum_k (f_k(x) - f_k(y))^2`` for a point-separating family."""

    def gamma(x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        return sum((f(*np.moveaxis(x, -1, 0)) - f(*np.moveaxis(y, -1, 0))) ** 2 for f in functions)

    return SeparatingFn(gamma, domain, "sum(f_k(x)-f_k(y))^2")


@dataclass
class TestSet:
    """Named test functions for the convergence harness."""

    functions: Dict[str, ScalarField]
    kind: str = "custom"

    __test__ = False  # not a pytest class

    def __len__(self):
        return len(self.functions)

    @property
    def names(self) -> List[str]:
        return list(self.functions)

    def nonnegative(self, domain: DomainSpec) -> "TestSet":
        """The members that are nonnegative on the domain grid."""
        pts = domain.grid()
        keep = {k: f for k, f in self.functions.items() if np.all(f.at(pts) >= 0)}
        return TestSet(keep, self.kind)


def build_test_set(domain: DomainSpec) -> TestSet:
    """Canonical test set: ``1, +-pr_k, sum pr_k^2`` or ``1, +-cos, +-sin`` on the circle."""
    if domain.kind == "circle":
        cos = ScalarField(np.cos, 1, name="cos", lipschitz=1.0)
        sin = ScalarField(np.sin, 1, name="sin", lipschitz=1.0)
        fs = [ScalarField.constant(1.0, 1), cos, -cos, sin, -sin]
        return TestSet({f.name: f for f in fs}, "circle-trig")
    if domain.kind == "interval":
        e1 = ScalarField.coordinate(1, 1)
        e2 = ScalarField(lambda t: t ** 2, 1, name="e2", lipschitz=2.0)
        fs = [ScalarField.constant(1.0, 1), e1, -e1, e2]
        return TestSet({f.name: f for f in fs}, "euclidean-2N+1")
    if domain.kind in ("box", "simplex", "plane"):
        p1, p2 = ScalarField.coordinate(1, 2), ScalarField.coordinate(2, 2)
        sq = ScalarField(lambda a, b: a ** 2 + b ** 2, 2, name="pr1^2+pr2^2")
        fs = [ScalarField.constant(1.0, 2), p1, -p1, p2, -p2, sq]
        return TestSet({f.name: f for f in fs}, "euclidean-2N+1")
    raise ConfigurationError(f"no canonical test set for {domain.kind!r}")


def check_separating(gamma: SeparatingFn, grid=None, eps_list=(0.2, 0.1, 0.05),
                     metric: Optional[Callable] = None) -> PropertyReport:
    """Least grid constants ``delta(eps)`` with ``d <= eps + delta(eps) gamma``.

    For each ``eps`` the constant is the max over grid pairs with ``gamma > 0``
    of ``(d - eps) / gamma`` clamped at 0.  The check fails only if some pair
    has ``gamma == 0`` while ``d > eps``; the offending pair is the witness.
    The constants land in ``details["delta"]``.
    """
    domain = gamma.domain
    metric = metric or domain.metric
    pts = domain.grid() if grid is None else as_points(grid, domain.dim)
    x, y = pts[:, None, :], pts[None, :, :]
    d = metric(x, y)
    g = np.asarray(gamma(np.broadcast_to(x, d.shape + (pts.shape[1],)),
                         np.broadcast_to(y, d.shape + (pts.shape[1],))), dtype=float)
    worst = WorstTracker()
    deltas = {}
    for eps in eps_list:
        zero = g <= 0
        bad = zero & (d > eps)
        if np.any(bad):
            i, j = np.argwhere(bad)[0]
            worst.update(float(d[i, j] - eps), dict(eps=eps, x=tuple(pts[i]), y=tuple(pts[j])))
            deltas[eps] = math.inf
            continue
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(zero, 0.0, (d - eps) / g)
        deltas[eps] = max(0.0, float(ratio.max()))
        worst.update(-1.0)
    return worst.report("separating", len(eps_list), 0.0, delta=deltas,
                        grid_points=len(pts))


# ---------------------------------------------------------------------------
# convergence harness

@dataclass
class ConvergenceReport:
    """Sup-grid errors per function and ``n`` with heuristic verdicts.

    ``converging`` requires the last error below ``pass_tol`` and below the
    first; ``diverging`` means the last error exceeds twice the first;
    anything else is ``stalled``.  Errors at or below ``NOISE_FLOOR`` count
    as exact reproduction, which is reported as converging.  Probes are
    judged against ``probe_tol`` (default ``pass_tol``).
    """

    family: str
    schedule: List[int]
    per_function: Dict[str, List[float]]
    probes: Dict[str, List[float]]
    pass_tol: float
    grid_points: int
    hyp2: Optional[List[float]] = None
    bounds: Dict[str, List[float]] = field(default_factory=dict)
    verdicts: Dict[str, str] = field(default_factory=dict)
    probe_tol: Optional[float] = None

    def __post_init__(self):
        if self.probe_tol is None:
            self.probe_tol = self.pass_tol
        if not self.verdicts:
            v = {k: verdict(e, self.pass_tol) for k, e in self.per_function.items()}
            v.update({k: verdict(e, self.probe_tol) for k, e in self.probes.items()})
            if self.hyp2 is not None:
                v["hyp2"] = verdict(self.hyp2, self.pass_tol)
            self.verdicts = v

    def series(self, name: str) -> List[float]:
        if name in self.per_function:
            return self.per_function[name]
        if name in self.probes:
            return self.probes[name]
        if name == "hyp2" and self.hyp2 is not None:
            return self.hyp2
        raise KeyError(name)

    def final_error(self, name: str) -> float:
        return self.series(name)[-1]

    def error_at(self, name: str, n: int) -> float:
        return self.series(name)[self.schedule.index(n)]

    def summary(self) -> str:
        lines = [f"{self.family}: schedule={self.schedule}, grid={self.grid_points} pts, "
                 f"pass_tol={self.pass_tol:g}, probe_tol={self.probe_tol:g}"]
        for name, v in self.verdicts.items():
            lines.append(f"  {name:>24s}  final={self.final_error(name):.3e}  {v}")
        return "\n".join(lines)


# sup errors this small are rounding noise, not approximation error
NOISE_FLOOR = 1e-12


def verdict(errors: Sequence[float], pass_tol: float) -> str:
    first, last = errors[0], errors[-1]
    if last <= NOISE_FLOOR:
        return "converging"
    if last < pass_tol and last < first:
        return "converging"
    if last > 2 * first:
        return "diverging"
    return "stalled"


DEFAULT_PASS_TOL = {
    "bkc1": 1e-2, "bkc2": 1e-2,
    "poss_durrmeyer": 5e-2, "poss_kantorovich": 5e-2, "maxprod": 5e-2,
    "gauss_weierstrass": 5e-2, "truncated_bernstein": 5e-2,
}


def _sup_error(family, n, g, pts):
    try:
        approx = family.evaluate(n, g, pts)
    except EvaluationError as err:
        err.context.setdefault("function", g.name)
        raise
    return float(np.max(np.abs(approx - g.at(pts))))


def hyp2_diagnostic(family: OperatorFamily, n: int, pts, gamma: Optional[SeparatingFn] = None) -> float:
    """``sup_x T_n(gamma_x)(x)`` over the grid (default ``gamma = d^2``)."""
    gamma = gamma or squared_distance(family.domain)
    return max(family.apply(n, gamma.section(x), x) for x in pts)


def run_harness(family: OperatorFamily, tests: Optional[TestSet] = None,
                probes: Optional[Dict[str, ScalarField]] = None,
                schedule: Sequence[int] = (4, 8, 16, 32, 64), grid=None,
                pass_tol: Optional[float] = None, probe_tol: Optional[float] = None,
                diagnose: bool = True,
                diag_grid: Optional[int] = None, jobs: int = 1) -> ConvergenceReport:
    """Measure ``sup_x |T_n g(x) - g(x)|`` for every test and probe function.

    ``grid`` is a resolution or an explicit point array (default: the
    domain's default grid).  With ``diagnose`` the hypothesis-2 quantity
    ``sup_x T_n(d_x^2)(x)`` is also tracked on a coarser grid
    (``diag_grid`` points per axis, default 21 in 1-D and 11 in 2-D).
    """
    schedule = list(schedule)
    if any(b <= a for a, b in zip(schedule, schedule[1:])):
        raise ConfigurationError("schedule must be strictly increasing")
    tests = tests if tests is not None else build_test_set(family.domain)
    probes = dict(probes or {})
    if isinstance(grid, (int, np.integer)) or grid is None:
        pts = family.domain.grid(grid)
    else:
        pts = as_points(grid, family.dim)
    if pass_tol is None:
        pass_tol = DEFAULT_PASS_TOL.get(family.name, 5e-2)

    cells = [(name, g, n) for group in (tests.functions, probes)
             for name, g in group.items() for n in schedule]
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            errs = list(pool.map(lambda c: _sup_error(family, c[2], c[1], pts), cells))
    else:
        errs = [_sup_error(family, n, g, pts) for _, g, n in cells]
    table = {}
    for (name, _, n), e in zip(cells, errs):
        table.setdefault(name, []).append(e)

    hyp2 = None
    if diagnose:
        dres = diag_grid or (21 if family.dim == 1 else 11)
        dpts = family.domain.grid(dres)
        hyp2 = [hyp2_diagnostic(family, n, dpts) for n in schedule]

    return ConvergenceReport(
        family=family.name, schedule=schedule,
        per_function={k: table[k] for k in tests.functions},
        probes={k: table[k] for k in probes},
        pass_tol=pass_tol, grid_points=len(pts), hyp2=hyp2, probe_tol=probe_tol,
    )


# ---------------------------------------------------------------------------
# quantitative bounds

def theorem3_bound_check(family: OperatorFamily, f: ScalarField, schedule: Sequence[int],
                         grid=None, diag_grid=None) -> PropertyReport:
    """Lipschitz error bound ``|T_n f(x) - f(x)| <= K sup_y sqrt(T_n(d_y^2)(y))``.

    The supremum on the right is taken over ``diag_grid`` (default: the same
    grid as the left side).  ``details`` holds both sides per ``n``.
    """
    if f.lipschitz is None:
        raise ConfigurationError(f"{f.name} has no Lipschitz constant")
    pts = family.domain.grid(grid) if grid is None or isinstance(grid, (int, np.integer)) \
        else as_points(grid, family.dim)
    f.validate_lipschitz(pts[:: max(1, len(pts) // 200)], family.domain.metric)
    dpts = pts if diag_grid is None else family.domain.grid(diag_grid)
    K = float(f.lipschitz)
    gamma = squared_distance(family.domain)
    worst = WorstTracker()
    per_n = {}
    for n in schedule:
        diag = max(family.apply(n, gamma.section(y), y) for y in dpts)
        rhs = K * math.sqrt(abs(diag))
        lhs = np.abs(family.evaluate(n, f, pts) - f.at(pts))
        i = int(np.argmax(lhs))
        worst.update(lhs[i] - rhs, dict(n=n, x=tuple(pts[i]), lhs=float(lhs[i]), rhs=rhs))
        per_n[n] = (float(lhs.max()), rhs)
    return worst.report("theorem3", len(schedule), family.tolerance, per_n=per_n)


def _est_pn(x, n):
    return ((1 + math.sqrt(2)) * np.sqrt(x * (1 - x)) + math.sqrt(2) * np.sqrt(x)) / math.sqrt(n) + 1.0 / n


def _est_qn(x, n):
    return np.sqrt(x * (1 - x)) / math.sqrt(n) + 2.0 / (n + 1)


def _est_maxprod(x, n):
    return np.full_like(x, 6.0 / math.sqrt(n + 1))


def _est_gw(x, n):
    return np.full_like(x, 4.0 / n)


RATE_BOUNDS = {
    "poss_durrmeyer": _est_pn,
    "poss_kantorovich": _est_qn,
    "maxprod": _est_maxprod,
    "gauss_weierstrass": _est_gw,
}


def rate_bound(name: str, x, n: int):
    """Value of the named rate bound at coordinate value(s) ``x``."""
    try:
        return RATE_BOUNDS[name](np.asarray(x, dtype=float), n)
    except KeyError:
        raise ConfigurationError(f"unknown bound {name!r}; known: {sorted(RATE_BOUNDS)}") from None


def _abs_coordinate_gap(i: int, xi: float, dim: int) -> ScalarField:
    return ScalarField(lambda *t: np.abs(t[i] - xi), dim, name=f"|pr{i + 1}-{xi:g}|",
                       lipschitz=1.0)


def rate_bound_lhs(family: OperatorFamily, n: int, pts) -> np.ndarray:
    """``T_n(|pr_i - x_i|)(x)`` for every point and coordinate: shape ``(m, dim)``."""
    pts = as_points(pts, family.dim)
    out = np.empty(pts.shape)
    for p, x in enumerate(pts):
        for i in range(family.dim):
            out[p, i] = family.apply(n, _abs_coordinate_gap(i, float(x[i]), family.dim), x)
    return out


def verify_rate_bound(family: OperatorFamily, bound: Optional[str] = None,
                      schedule: Sequence[int] = (4, 16, 64), grid=21,
                      tol: Optional[float] = None) -> PropertyReport:
    """Check ``T_n(|pr_i - x_i|)(x) <= bound(x_i, n) + tol`` on a grid.

    ``bound`` defaults to the family name; a bound registered for another
    family is a configuration error.  ``details["per_n"]`` records, per
    ``n``, the largest left side and the smallest margin.
    """
    bound = bound or family.name
    if bound not in RATE_BOUNDS:
        raise ConfigurationError(f"no rate bound registered as {bound!r}")
    if bound != family.name:
        raise ConfigurationError(f"bound {bound!r} does not apply to family {family.name!r}")
    pts = family.domain.grid(grid) if isinstance(grid, (int, np.integer)) \
        else as_points(grid, family.dim)
    tol = family.tolerance if tol is None else tol
    worst = WorstTracker()
    per_n = {}
    for n in schedule:
        lhs = rate_bound_lhs(family, n, pts)
        rhs = RATE_BOUNDS[bound](pts, n)
        gap = lhs - rhs
        p, i = np.unravel_index(int(np.argmax(gap)), gap.shape)
        worst.update(gap[p, i], dict(n=n, x=tuple(pts[p]), coordinate=i + 1,
                                     lhs=float(lhs[p, i]), bound=float(rhs[p, i])))
        per_n[n] = {"max_lhs": float(lhs.max()), "min_margin": float(-gap.max()),
                    "bound_at_worst": float(rhs[p, i])}
    return worst.report(f"rate[{bound}]", len(schedule), tol, per_n=per_n,
                        grid_points=len(pts))


# ---------------------------------------------------------------------------
# shift trick

def shift_trick(T: OperatorFamily, n: int, f: ScalarField, grid=None) -> ScalarField:
    """``x -> T_n(f + ||f||) (x) - ||f||`` with the norm from ``sup_norm_hint`` or the grid."""
    pts = T.domain.grid(grid)
    c = f.sup_norm(pts)
    img = T.field(n, f + c)
    return ScalarField(lambda *x: img(*x) - c, T.dim, name=f"shift[{T.name}_{n}]({f.name})")


class ShiftedFamily(OperatorFamily):
    """``n -> (f -> T_n(f + ||f||) - ||f||)`` as an operator family."""

    def __init__(self, T: OperatorFamily, grid=None):
        super().__init__(T.domain, tolerance=T.tolerance)
        self.T = T
        self.name = f"shift[{T.name}]"
        self.profile = T.profile
        self.grid = grid

    def image(self, n, f):
        c = f.sup_norm(self.domain.grid(self.grid))
        img = self.T.image(n, f + c)
        return lambda pts: img(pts) - c
