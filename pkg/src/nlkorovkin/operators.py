"""Concrete sublinear, monotone operator families.

Every family is an :class:`OperatorFamily`: ``family.evaluate(n, f, points)``
returns ``T_n(f)`` at an ``(m, dim)`` array of points.  Internally each
family first builds the image ``T_n(f)`` as a vectorised callable
(:meth:`OperatorFamily.image`) so that quantities independent of the
evaluation point (cell integrals, cell suprema, lattice samples) are
computed once per ``(n, f)``.

Families
--------
``bkc1``/``bkc2``
    Bernstein-Kantorovich operators whose cell averages are Choquet
    integrals with respect to ``sqrt(lebesgue)``.
``poss_durrmeyer``
    Bernstein weights times a weighted supremum over the whole square.
``poss_kantorovich``
    Bernstein weights times cell suprema.
``maxprod``
    Max-product Bernstein operator on the triangle.
``gauss_weierstrass``
    Gaussian kernel smoothing through an iterated Choquet integral on R^2.
``truncated_bernstein``
    Bernstein polynomial of ``max(f, 0)``; sublinear and monotone but not
    translatable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

import numpy as np
from scipy.special import comb, gamma, gammaln, xlogy

from .capacity import Capacity, MeasurableSet, sqrt_lebesgue
from .choquet import QuadratureConfig, choquet_rows
from .exceptions import ConfigurationError, DomainError, EvaluationError
from .fields import DomainSpec, ScalarField, as_points

EXACT_TOL = 1e-9


# ---------------------------------------------------------------------------
# Bernstein basis

@lru_cache(maxsize=256)
def _log_binomials(n: int) -> np.ndarray:
    k = np.arange(n + 1)
    if n <= 60:
        return np.log(np.array([comb(n, int(j), exact=True) for j in k], dtype=float))
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def bernstein_basis(n: int, k: int, t):
    """``binom(n, k) t^k (1-t)^(n-k)`` with the convention ``0^0 = 1``."""
    if n < 0 or not 0 <= k <= n:
        raise DomainError(f"need 0 <= k <= n, got n={n}, k={k}")
    t = np.asarray(t, dtype=float)
    if np.any((t < 0) | (t > 1)):
        raise DomainError("t must lie in [0, 1]")
    if n <= 60:
        out = comb(n, k, exact=True) * t ** k * (1.0 - t) ** (n - k)
    else:
        out = np.exp(_log_binomials(n)[k] + xlogy(k, t) + xlogy(n - k, 1.0 - t))
    return float(out) if out.ndim == 0 else out


def bernstein_matrix(n: int, t) -> np.ndarray:
    """All basis values: shape ``(len(t), n + 1)``."""
    t = np.clip(np.asarray(t, dtype=float).ravel(), 0.0, 1.0)
    k = np.arange(n + 1)
    if n <= 60:
        binoms = np.array([comb(n, int(j), exact=True) for j in k], dtype=float)
        return binoms * t[:, None] ** k * (1.0 - t[:, None]) ** (n - k)
    return np.exp(_log_binomials(n) + xlogy(k, t[:, None]) + xlogy(n - k, 1.0 - t[:, None]))


# ---------------------------------------------------------------------------
# family protocol

AXIOMS = ("SL", "M", "TR", "CA", "unital")


@dataclass(frozen=True)
class AxiomProfile:
    """Claimed structural properties.  ``None`` means "no claim"."""

    sublinear: Optional[bool] = True
    monotone: Optional[bool] = True
    translatable: Optional[bool] = None
    unital: Optional[bool] = True
    comonotone_additive: Optional[bool] = None

    def claim(self, axiom: str) -> Optional[bool]:
        return {
            "SL": self.sublinear, "M": self.monotone, "TR": self.translatable,
            "CA": self.comonotone_additive, "unital": self.unital,
        }[axiom]

    @property
    def weakly_nonlinear(self) -> bool:
        return bool(self.sublinear and self.monotone and self.translatable)


class OperatorFamily:
    """An indexed family ``n -> T_n`` acting on scalar fields."""

    name = "operator"
    profile = AxiomProfile()

    def __init__(self, domain: DomainSpec, tolerance: float = EXACT_TOL):
        self.domain = domain
        self.tolerance = tolerance

    def __repr__(self):
        return f"<{type(self).__name__} {self.name!r} on {self.domain.kind}>"

    @property
    def dim(self) -> int:
        return self.domain.dim

    def image(self, n: int, f: ScalarField) -> Callable[[np.ndarray], np.ndarray]:
        """Return ``points -> T_n(f)(points)`` for ``(m, dim)`` point arrays."""
        raise NotImplementedError

    def _coerce(self, n, f):
        if int(n) != n or n < 1:
            raise DomainError(f"n must be a positive integer, got {n!r}")
        if not isinstance(f, ScalarField):
            f = ScalarField(f, self.dim)
        if f.dim != self.dim:
            raise DomainError(f"{self.name} acts on functions of {self.dim} variable(s)")
        return int(n), f

    def evaluate(self, n: int, f, points) -> np.ndarray:
        n, f = self._coerce(n, f)
        pts = as_points(points, self.dim)
        try:
            out = np.asarray(self.image(n, f)(pts), dtype=float)
        except EvaluationError as err:
            err.context.setdefault("family", self.name)
            err.context.setdefault("n", n)
            raise
        if not np.all(np.isfinite(out)):
            bad = int(np.argmin(np.isfinite(out)))
            raise EvaluationError("operator produced a non-finite value", family=self.name,
                                  n=n, function=f.name, point=tuple(pts[bad]))
        return out

    def apply(self, n: int, f, x) -> float:
        return float(self.evaluate(n, f, as_points(x, self.dim))[0])

    def field(self, n: int, f) -> ScalarField:
        """``T_n(f)`` as a :class:`ScalarField` (used for composition)."""
        n, f = self._coerce(n, f)
        img = self.image(n, f)
        dim = self.dim

        def tf(*coords):
            coords = np.broadcast_arrays(*coords)
            shape = coords[0].shape
            pts = np.column_stack([c.ravel() for c in coords]) if dim > 1 \
                else coords[0].ravel()[:, None]
            return np.asarray(img(pts), dtype=float).reshape(shape)

        return ScalarField(tf, dim, name=f"{self.name}_{n}({f.name})")


# ---------------------------------------------------------------------------
# Bernstein-Kantorovich-Choquet

class BernsteinKantorovichChoquet(OperatorFamily):
    """Bernstein-Kantorovich operator with Choquet cell averages.

    The cell average over ``[k/(n+1), (k+1)/(n+1)]`` (and its iterated 2-D
    analogue) is the Choquet integral with respect to ``capacity`` divided by
    the capacity of the cell.  ``cell_samples`` cells per axis are used inside
    each Bernstein cell.
    """

    def __init__(self, dim: int = 1, capacity: Optional[Capacity] = None,
                 cell_samples: int = 64, stability_tol: float = 1e-6):
        if dim not in (1, 2):
            raise ConfigurationError("BKC operators are implemented for 1 and 2 variables")
        domain = DomainSpec.interval() if dim == 1 else DomainSpec.box()
        super().__init__(domain, tolerance=10 * stability_tol)
        self.capacity = capacity or sqrt_lebesgue()
        self.cell_samples = int(cell_samples)
        self.name = "bkc1" if dim == 1 else "bkc2"
        # comonotone additivity holds in one variable only
        self.profile = AxiomProfile(translatable=True, comonotone_additive=(dim == 1))

    def _cell_samples(self, n):
        h = 1.0 / (n + 1)
        s = self.cell_samples
        offsets = (np.arange(s) + 0.5) / s
        mids = (np.arange(n + 1)[:, None] + offsets[None, :]) * h
        lefts = (np.arange(n + 1)[:, None] + np.arange(s)[None, :] / s) * h
        widths = np.full(s, h / s)
        return h, mids, lefts, widths

    def _cell_measure(self, n, h):
        mu = self.capacity
        if mu.profile is not None:
            return np.full(n + 1, float(mu.of_length(np.array([h]))[0]))
        return np.array([mu(MeasurableSet.interval(k * h, (k + 1) * h)) for k in range(n + 1)])

    def cell_averages(self, n: int, f: ScalarField) -> np.ndarray:
        h, mids, lefts, widths = self._cell_samples(n)
        mu = self.capacity
        norm = self._cell_measure(n, h)
        if self.dim == 1:
            vals = f.checked(mids)
            return choquet_rows(vals, widths, mu, lefts) / norm
        flat = mids.ravel()
        table = np.empty((n + 1, n + 1))
        s = self.cell_samples
        for k1 in range(n + 1):
            vals = f.checked(mids[k1][:, None], flat[None, :])        # (s, (n+1)s)
            vals = vals.reshape(s, n + 1, s)
            inner = choquet_rows(vals, widths, mu, lefts[None, :, :])  # (s, n+1)
            table[k1] = choquet_rows(inner.T, widths, mu, lefts[k1])
        return table / np.outer(norm, norm)

    def image(self, n, f):
        table = self.cell_averages(n, f)
        if self.dim == 1:
            return lambda pts: bernstein_matrix(n, pts[:, 0]) @ table
        return lambda pts: np.einsum("mi,ij,mj->m", bernstein_matrix(n, pts[:, 0]), table,
                                     bernstein_matrix(n, pts[:, 1]))


# ---------------------------------------------------------------------------
# possibilistic operators

def _normalised_weights(n: int, t: np.ndarray) -> np.ndarray:
    """``t^k (1-t)^(n-k)`` divided by its maximum ``k^k (n-k)^(n-k) / n^n``.

    Shape ``(n + 1, len(t))``; evaluated in the log domain with ``0^0 = 1``.
    """
    k = np.arange(n + 1)[:, None]
    log_den = xlogy(k, k) + xlogy(n - k, n - k) - xlogy(n, n)
    return np.exp(xlogy(k, t[None, :]) + xlogy(n - k, 1.0 - t[None, :]) - log_den)


class PossibilisticDurrmeyer(OperatorFamily):
    """Bernstein weights times ``sup_t f(t) w_k(t) / max w_k``.

    The supremum runs over a uniform grid of ``n * r + 1`` points per axis,
    ``r = max(2, ceil(grid_min / n))``; the grid contains every ``k/n`` so the
    maxima of the weights (and hence ``T_n(1) = 1``) are hit exactly.  For
    other functions the sampled supremum is a lower estimate.
    """

    name = "poss_durrmeyer"
    profile = AxiomProfile(translatable=False, comonotone_additive=False)

    def __init__(self, dim: int = 2, grid_min: int = 512):
        domain = DomainSpec.interval() if dim == 1 else DomainSpec.box()
        super().__init__(domain)
        self.grid_min = int(grid_min)

    def sup_grid(self, n: int) -> np.ndarray:
        r = max(2, math.ceil(self.grid_min / n))
        return np.linspace(0.0, 1.0, n * r + 1)

    def weighted_sups(self, n: int, f: ScalarField) -> np.ndarray:
        t = self.sup_grid(n)
        w = _normalised_weights(n, t)
        if self.dim == 1:
            return np.max(w * f.checked(t)[None, :], axis=1)
        vals = f.checked(t[:, None], t[None, :])
        # max_{i,j} F_ij a_i b_j = max_j b_j * max_i (F_ij a_i) because b_j >= 0
        colmax = np.empty((n + 1, t.size))
        for k1 in range(n + 1):
            colmax[k1] = np.max(w[k1][:, None] * vals, axis=0)
        return np.max(colmax[:, None, :] * w[None, :, :], axis=2)

    def image(self, n, f):
        table = self.weighted_sups(n, f)
        if self.dim == 1:
            return lambda pts: bernstein_matrix(n, pts[:, 0]) @ table
        return lambda pts: np.einsum("mi,ij,mj->m", bernstein_matrix(n, pts[:, 0]), table,
                                     bernstein_matrix(n, pts[:, 1]))


class PossibilisticKantorovich(OperatorFamily):
    """Bernstein weights times the supremum of ``f`` over each Kantorovich cell.

    Each cell is sampled on ``cell_resolution * 2**refinements + 1`` points
    per axis, endpoints included.
    """

    name = "poss_kantorovich"
    profile = AxiomProfile(translatable=True, comonotone_additive=True)

    def __init__(self, dim: int = 2, cell_resolution: int = 16, refinements: int = 1):
        domain = DomainSpec.interval() if dim == 1 else DomainSpec.box()
        super().__init__(domain)
        if cell_resolution < 1 or refinements < 0:
            raise ConfigurationError("cell_resolution >= 1 and refinements >= 0 required")
        self.cell_resolution = int(cell_resolution)
        self.refinements = int(refinements)

    @property
    def points_per_cell(self) -> int:
        return self.cell_resolution * 2 ** self.refinements

    def cell_sups(self, n: int, f: ScalarField) -> np.ndarray:
        m = self.points_per_cell
        t = np.linspace(0.0, 1.0, (n + 1) * m + 1)
        idx = np.arange(n + 1)[:, None] * m + np.arange(m + 1)[None, :]
        if self.dim == 1:
            return f.checked(t)[idx].max(axis=1)
        vals = f.checked(t[:, None], t[None, :])
        rows = vals[idx].max(axis=1)              # (n+1, G)
        return rows[:, idx].max(axis=2)           # (n+1, n+1)

    def uncertainty(self, n: int, f: ScalarField) -> Optional[float]:
        """Sampling bound ``L h sqrt(dim) / 2`` on the cell suprema, if ``f`` is Lipschitz."""
        if f.lipschitz is None:
            return None
        h = 1.0 / ((n + 1) * self.points_per_cell)
        return f.lipschitz * h * math.sqrt(self.dim) / 2

    def image(self, n, f):
        table = self.cell_sups(n, f)
        if self.dim == 1:
            return lambda pts: bernstein_matrix(n, pts[:, 0]) @ table
        return lambda pts: np.einsum("mi,ij,mj->m", bernstein_matrix(n, pts[:, 0]), table,
                                     bernstein_matrix(n, pts[:, 1]))


# ---------------------------------------------------------------------------
# max-product on the triangle

@lru_cache(maxsize=64)
def _simplex_lattice(n: int):
    i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    keep = i + j <= n
    i, j = i[keep], j[keep]
    lb = _log_binomials(n)
    log_coef = lb[i] + np.array([_log_binomials(n - a)[b] for a, b in zip(i, j)])
    return i, j, log_coef


class MaxProductSimplex(OperatorFamily):
    """Max-product Bernstein operator on ``{x1, x2 >= 0, x1 + x2 <= 1}``.

    Finite and exact: ratio of the maximum of weighted lattice samples
    ``f(i/n, j/n)`` to the maximum of the weights.
    """

    name = "maxprod"
    profile = AxiomProfile(translatable=False, comonotone_additive=False)

    def __init__(self, chunk: int = 512):
        super().__init__(DomainSpec.simplex())
        self.chunk = chunk

    def log_weights(self, n: int, pts: np.ndarray) -> np.ndarray:
        i, j, log_coef = _simplex_lattice(n)
        x1, x2 = pts[:, :1], pts[:, 1:2]
        x3 = np.clip(1.0 - x1 - x2, 0.0, None)
        return log_coef + xlogy(i, x1) + xlogy(j, x2) + xlogy(n - i - j, x3)

    def image(self, n, f):
        i, j, _ = _simplex_lattice(n)
        samples = f.checked(i / n, j / n)

        def img(pts):
            inside = self.domain.contains(pts, tol=1e-12)
            if not np.all(inside):
                bad = pts[int(np.argmin(inside))]
                raise DomainError(f"point {tuple(bad)} lies outside the triangle")
            out = np.empty(len(pts))
            for s in range(0, len(pts), self.chunk):
                lw = self.log_weights(n, pts[s:s + self.chunk])
                w = np.exp(lw - lw.max(axis=1, keepdims=True))
                out[s:s + self.chunk] = np.max(w * samples, axis=1) / np.max(w, axis=1)
            return out

        return img


# ---------------------------------------------------------------------------
# Gauss-Weierstrass-Choquet on the plane

def gauss_weierstrass_normalizer(n: int) -> float:
    """Choquet integral of ``exp(-n^2 (x - s)^2)`` in ``s`` w.r.t. ``sqrt(lebesgue)``."""
    return math.sqrt(2.0 / n) * gamma(1.25)


class GaussWeierstrassChoquet(OperatorFamily):
    """Iterated Choquet integral of ``f`` against a product Gaussian kernel.

    The integral is truncated to ``|x_i - s_i| <= sqrt(ln(1/tau)) / n`` where
    the kernel drops below ``tau`` and sampled on ``samples`` cells per axis.
    The result is divided by the analytic normaliser squared, so ``T_n(1) = 1``
    holds only up to quadrature error (about 1e-4 at 256 cells).  For
    integrands with negative values the baseline of the negative part is the
    capacity of the truncation window.
    """

    name = "gauss_weierstrass"
    profile = AxiomProfile(translatable=False, comonotone_additive=False)

    def __init__(self, window=(-2.0, 2.0), samples: int = 256, tau: float = 1e-12,
                 capacity: Optional[Capacity] = None, stability_tol: float = 1e-4,
                 chunk_values: int = 2 ** 22):
        if not 0.0 < tau < 1.0:
            raise ConfigurationError(f"truncation level tau={tau} leaves a degenerate window")
        if samples < 16:
            raise ConfigurationError("at least 16 samples per axis are required")
        super().__init__(DomainSpec.plane(window), tolerance=10 * stability_tol)
        self.samples = int(samples)
        self.tau = float(tau)
        self.capacity = capacity or sqrt_lebesgue()
        if self.capacity.profile is None:
            raise ConfigurationError("the Gauss-Weierstrass family needs a length-profile capacity")
        self.chunk_values = chunk_values

    def half_width(self, n: int) -> float:
        return math.sqrt(math.log(1.0 / self.tau)) / n

    def offsets(self, n: int):
        r = self.half_width(n)
        h = 2 * r / self.samples
        u = -r + (np.arange(self.samples) + 0.5) * h
        return u, np.full(self.samples, h)

    def image(self, n, f):
        u, widths = self.offsets(n)
        kernel = np.exp(-(n * u) ** 2)
        norm = gauss_weierstrass_normalizer(n) ** 2
        mu = self.capacity
        per_point = self.samples ** 2

        def img(pts):
            out = np.empty(len(pts))
            step = max(1, self.chunk_values // per_point)
            for s in range(0, len(pts), step):
                p = pts[s:s + step]
                s1 = p[:, 0, None, None] + u[None, :, None]
                s2 = p[:, 1, None, None] + u[None, None, :]
                vals = f.checked(s1, s2) * kernel[None, :, None] * kernel[None, None, :]
                inner = choquet_rows(vals, widths, mu)      # (P, S): integrate s2
                out[s:s + step] = choquet_rows(inner, widths, mu) / norm
            return out

        return img


# ---------------------------------------------------------------------------
# truncated Bernstein

class TruncatedBernstein(OperatorFamily):
    """``sum_k p_{n,k}(x) max(f(k/n), 0)``."""

    name = "truncated_bernstein"
    profile = AxiomProfile(translatable=False, comonotone_additive=False)

    def __init__(self):
        super().__init__(DomainSpec.interval())

    def image(self, n, f):
        samples = np.maximum(f.checked(np.arange(n + 1) / n), 0.0)
        return lambda pts: bernstein_matrix(n, pts[:, 0]) @ samples


# ---------------------------------------------------------------------------
# registry and point-evaluation shortcuts

FAMILIES = {
    "bkc1": lambda **kw: BernsteinKantorovichChoquet(dim=1, **kw),
    "bkc2": lambda **kw: BernsteinKantorovichChoquet(dim=2, **kw),
    "poss_durrmeyer": lambda **kw: PossibilisticDurrmeyer(**kw),
    "poss_kantorovich": lambda **kw: PossibilisticKantorovich(**kw),
    "maxprod": lambda **kw: MaxProductSimplex(**kw),
    "gauss_weierstrass": lambda **kw: GaussWeierstrassChoquet(**kw),
    "truncated_bernstein": lambda **kw: TruncatedBernstein(**kw),
}


def make_family(name: str, **options) -> OperatorFamily:
    try:
        factory = FAMILIES[name]
    except KeyError:
        raise ConfigurationError(f"unknown operator family {name!r}; "
                                 f"known: {sorted(FAMILIES)}") from None
    try:
        return factory(**options)
    except TypeError as err:
        raise ConfigurationError(f"bad options for {name}: {err}") from None


def _bkc_from_cfg(dim, cfg):
    if cfg is None:
        return BernsteinKantorovichChoquet(dim=dim)
    return BernsteinKantorovichChoquet(dim=dim, cell_samples=cfg.domain_samples,
                                       stability_tol=cfg.stability_tol)


def bkc1_apply(n, f, x, cfg: Optional[QuadratureConfig] = None) -> float:
    """One-variable BKC operator at ``x``; ``cfg.domain_samples`` cells per Bernstein cell."""
    return _bkc_from_cfg(1, cfg).apply(n, f, x)


def bkc2_apply(n, f, x, cfg: Optional[QuadratureConfig] = None) -> float:
    return _bkc_from_cfg(2, cfg).apply(n, f, x)


def poss_durrmeyer_apply(n, f, x, grid: int = 512) -> float:
    return PossibilisticDurrmeyer(grid_min=grid).apply(n, f, x)


def poss_kantorovich_apply(n, f, x) -> float:
    return PossibilisticKantorovich().apply(n, f, x)


def maxprod_simplex_apply(n, f, x) -> float:
    return MaxProductSimplex().apply(n, f, x)


def gauss_weierstrass_apply(n, f, x, cfg: Optional[QuadratureConfig] = None) -> float:
    if cfg is None:
        return GaussWeierstrassChoquet().apply(n, f, x)
    return GaussWeierstrassChoquet(samples=cfg.domain_samples,
                                   stability_tol=cfg.stability_tol).apply(n, f, x)


def truncated_bernstein_apply(n, f, x) -> float:
    return TruncatedBernstein().apply(n, f, x)


# ---------------------------------------------------------------------------
# operators on sequences

@dataclass(frozen=True)
class FiniteSequence:
    """A truncation ``x_0, x_1, ...`` of an infinite sequence.

    ``tail_limit`` is the declared limit for convergent sequences.
    """

    entries: tuple
    tail_limit: Optional[float] = None

    def __post_init__(self):
        vals = np.asarray(self.entries, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise DomainError("a sequence needs at least one entry")
        if not np.all(np.isfinite(vals)):
            raise DomainError("sequence entries must be finite")
        if self.tail_limit is not None and not math.isfinite(self.tail_limit):
            raise DomainError("tail_limit must be finite")
        object.__setattr__(self, "entries", tuple(float(v) for v in vals))

    @property
    def values(self) -> np.ndarray:
        return np.asarray(self.entries)

    def __len__(self):
        return len(self.entries)


SEQUENCE_OPERATORS = ("limsup", "T1", "T2", "T3")


def sequence_operator_apply(which: str, s: FiniteSequence) -> FiniteSequence:
    """Apply one of the sequence-space operators to a truncation.

    ``T1``: ``max(x_n, lim)``; ``T2``: ``max(Cesaro mean, lim)``;
    ``T3``: ``max(x_n, sum_{j<=n} 2^j x_j / (2^(n+1) - 1))``;
    ``limsup``: constant sequence.  ``limsup`` uses ``tail_limit`` when given
    and otherwise the maximum over the final quarter of the truncation.
    """
    x = s.values
    lim = s.tail_limit
    if which in ("T1", "T2") and lim is None:
        raise ConfigurationError(f"{which} needs the sequence limit (tail_limit)")
    if which == "T1":
        return FiniteSequence(tuple(np.maximum(x, lim)), lim)
    if which == "T2":
        cesaro = np.cumsum(x) / np.arange(1, x.size + 1)
        return FiniteSequence(tuple(np.maximum(cesaro, lim)), lim)
    if which == "T3":
        # weights 2^(j-n) keep the running average bounded for long sequences
        avg = np.empty_like(x)
        num, den = 0.0, 0.0
        for n, v in enumerate(x):
            num = num / 2.0 + v
            den = den / 2.0 + 1.0
            avg[n] = num / den
        return FiniteSequence(tuple(np.maximum(x, avg)), lim)
    if which == "limsup":
        if lim is not None:
            value = lim
        else:
            tail = x[-max(1, math.ceil(x.size / 4)):]
            value = float(np.max(tail))
        return FiniteSequence(tuple(np.full(x.size, value)), value)
    raise ConfigurationError(f"unknown sequence operator {which!r}; known: {SEQUENCE_OPERATORS}")
