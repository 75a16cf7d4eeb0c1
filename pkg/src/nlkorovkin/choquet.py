"""Numerical Choquet integration with respect to a capacity.

The integrand is sampled at the midpoints of equal-width cells.  The level
set ``{f >= t}`` is approximated by the union of cells whose sample is at
least ``t``; integrating over ``t`` on the sorted sample values then reduces
to the discrete Choquet sum

    sum_i v_(i) * (mu(S_i) - mu(S_{i-1})),    v_(1) >= v_(2) >= ...

which is exact for the sampled (piecewise-constant) function and handles
negative values with ``mu(A)`` as the baseline of the negative part.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .capacity import Capacity, MeasurableSet, lebesgue
from .exceptions import (ConfigurationError, DomainError, EvaluationError,
                         QuadratureWarning, StructuralError)
from .fields import ScalarField

_REFINEMENTS = ("none", "double-until-stable")
_MODES = ("sorted", "level-grid")


@dataclass(frozen=True)
class QuadratureConfig:
    """Sampling knobs for the Choquet integrators.

    ``domain_samples`` is the number of cells along each integration axis.
    ``level_samples`` is only used by the diagnostic ``mode="level-grid"``,
    which integrates ``t -> mu({f >= t})`` with the trapezoid rule on a
    uniform grid instead of summing over the sorted samples.
    """

    domain_samples: int = 4096
    level_samples: int = 2048
    refinement: str = "none"
    stability_tol: float = 1e-6
    mode: str = "sorted"
    max_samples: int = 2 ** 20

    def __post_init__(self):
        if self.domain_samples < 16 or self.level_samples < 16:
            raise ConfigurationError("sample counts must be at least 16")
        if not self.stability_tol > 0:
            raise ConfigurationError("stability_tol must be positive")
        if self.refinement not in _REFINEMENTS:
            raise ConfigurationError(f"refinement must be one of {_REFINEMENTS}")
        if self.mode not in _MODES:
            raise ConfigurationError(f"mode must be one of {_MODES}")

    def with_samples(self, n: int) -> "QuadratureConfig":
        return QuadratureConfig(n, self.level_samples, self.refinement,
                                self.stability_tol, self.mode, self.max_samples)


DEFAULT_CONFIG = QuadratureConfig()


# ---------------------------------------------------------------------------
# sorted-sample kernels

def choquet_rows(values: np.ndarray, widths: np.ndarray, mu: Capacity,
                 lefts: np.ndarray = None) -> np.ndarray:
    """Discrete Choquet sums along the last axis of ``values``.

    ``widths`` are the cell lengths (same for every row).  If ``mu`` has a
    length profile the computation is fully vectorised; otherwise ``lefts``
    (cell left endpoints, broadcastable to ``values``) is needed to build
    explicit level sets, row by row.
    """
    values = np.asarray(values, dtype=float)
    widths = np.asarray(widths, dtype=float)
    order = np.argsort(-values, axis=-1, kind="stable")
    ranked = np.take_along_axis(values, order, axis=-1)
    if mu.profile is not None:
        if np.all(widths == widths.flat[0]):
            # equal cells: level-set measures are multiples of one width
            counts = np.arange(widths.size + 1)
            lengths = counts * widths.flat[0]
            lengths[-1] = float(np.sum(widths))
            steps = np.diff(np.asarray(mu.of_length(lengths), dtype=float))
            return ranked @ steps
        cum = np.cumsum(widths[order], axis=-1)
        measures = np.asarray(mu.of_length(cum), dtype=float)
        steps = np.diff(measures, axis=-1, prepend=0.0)
        return np.sum(ranked * steps, axis=-1)
    if lefts is None:
        raise StructuralError("cell positions are required for capacities without a length profile")
    n_cells = ranked.shape[-1]
    flat_vals = ranked.reshape(-1, n_cells)
    flat_order = order.reshape(-1, n_cells)
    flat_lefts = np.broadcast_to(lefts, ranked.shape).reshape(-1, n_cells)
    out = np.empty(flat_vals.shape[0])
    for r, (vals, idx) in enumerate(zip(flat_vals, flat_order)):
        prev, acc = 0.0, 0.0
        for i in range(n_cells):
            top = idx[: i + 1]
            s = MeasurableSet.union(zip(flat_lefts[r, top], flat_lefts[r, top] + widths[top]))
            m = mu(s)
            acc += vals[i] * (m - prev)
            prev = m
        out[r] = acc
    return out.reshape(ranked.shape[:-1])


def _level_grid_rows(values, widths, mu, level_samples):
    """Definition-style evaluation on a uniform level grid (diagnostic)."""
    values = np.atleast_2d(values)
    total_len = float(np.sum(widths))
    full = float(mu.of_length(np.array([total_len]))[0])
    out = np.empty(values.shape[0])
    for r, row in enumerate(values):
        ranked = np.sort(row)[::-1]
        order = np.argsort(-row, kind="stable")
        cum = np.concatenate([[0.0], np.cumsum(widths[order])])

        def level_measure(t):
            k = np.searchsorted(-ranked, -t, side="right")  # number of samples >= t
            return np.asarray(mu.of_length(cum[k]), dtype=float)

        top, bottom = max(ranked[0], 0.0), min(ranked[-1], 0.0)
        acc = 0.0
        if top > 0:
            t = np.linspace(0.0, top, level_samples)
            acc += np.trapezoid(level_measure(t), t)
        if bottom < 0:
            t = np.linspace(bottom, 0.0, level_samples)
            acc += np.trapezoid(level_measure(t) - full, t)
        out[r] = acc
    return out


def _cells(A: MeasurableSet, samples: int):
    """Equal-as-possible cells covering a finite union of intervals."""
    if not A.is_intervals:
        raise StructuralError("1-D Choquet integration needs an interval or a union of intervals")
    if A.is_empty:
        return np.empty(0), np.empty(0), np.empty(0)
    total = lebesgue(A)
    lefts, widths = [], []
    comps = [(a, b) for a, b in A.components if b > a]
    if not comps:
        return np.empty(0), np.empty(0), np.empty(0)
    alloc = [max(1, int(round(samples * (b - a) / total))) for a, b in comps]
    for (a, b), k in zip(comps, alloc):
        edges = np.linspace(a, b, k + 1)
        lefts.append(edges[:-1])
        widths.append(np.diff(edges))
    lefts = np.concatenate(lefts)
    widths = np.concatenate(widths)
    return lefts + widths / 2, lefts, widths


def _as_field(f, dim) -> ScalarField:
    if isinstance(f, ScalarField):
        return f
    if callable(f):
        return ScalarField(f, dim)
    raise DomainError("integrand must be a ScalarField or a callable")


def _integrate_1d_once(f, A, mu, cfg, samples):
    mids, lefts, widths = _cells(A, samples)
    if mids.size == 0:
        return 0.0
    vals = f.checked(mids)
    if cfg.mode == "level-grid":
        return float(_level_grid_rows(vals, widths, mu, cfg.level_samples)[0])
    return float(choquet_rows(vals, widths, mu, lefts))


def _refine(once, cfg):
    n = cfg.domain_samples
    value = once(n)
    history = [(n, value)]
    if cfg.refinement == "none":
        return value, {"samples": n, "converged": None, "history": history}
    while True:
        if 2 * n > cfg.max_samples:
            warnings.warn(f"Choquet refinement reached the {cfg.max_samples}-sample cap "
                          f"without stabilising (last change "
                          f"{abs(history[-1][1] - history[-2][1]) if len(history) > 1 else float('nan'):.3e})",
                          QuadratureWarning, stacklevel=3)
            return value, {"samples": n, "converged": False, "history": history}
        n *= 2
        new = once(n)
        history.append((n, new))
        if abs(new - value) < cfg.stability_tol:
            return new, {"samples": n, "converged": True, "history": history}
        value = new


def choquet_integral_1d(f: Union[ScalarField, Callable], A: MeasurableSet, mu: Capacity,
                        cfg: QuadratureConfig = DEFAULT_CONFIG, full_output: bool = False):
    """Choquet integral of ``f`` over a finite union of intervals ``A``.

    Returns a float, or ``(value, info)`` when ``full_output`` is true; ``info``
    records the final sample count and, under refinement, the convergence
    history.  A :class:`QuadratureWarning` is emitted if refinement stops at
    ``cfg.max_samples`` without meeting ``cfg.stability_tol``.

    >>> from nlkorovkin.capacity import sqrt_lebesgue
    >>> round(choquet_integral_1d(lambda t: t, MeasurableSet.interval(0, 1), sqrt_lebesgue()), 4)
    0.6667
    """
    field = _as_field(f, 1)
    value, info = _refine(lambda n: _integrate_1d_once(field, A, mu, cfg, n), cfg)
    return (value, info) if full_output else value


def _integrate_2d_once(f, box, mu, cfg, samples):
    (a1, b1), (a2, b2) = box.components
    m1, l1, w1 = _cells(MeasurableSet.interval(a1, b1), samples)
    m2, l2, w2 = _cells(MeasurableSet.interval(a2, b2), samples)
    if m1.size == 0 or m2.size == 0:
        return 0.0
    vals = f.checked(m1[:, None], m2[None, :])
    if cfg.mode == "level-grid":
        inner = _level_grid_rows(vals, w2, mu, cfg.level_samples)
        return float(_level_grid_rows(inner, w1, mu, cfg.level_samples)[0])
    inner = choquet_rows(vals, w2, mu, l2)
    return float(choquet_rows(inner, w1, mu, l1))


def choquet_integral_2d_iterated(f: Union[ScalarField, Callable], box: MeasurableSet,
                                 mu: Capacity, cfg: QuadratureConfig = DEFAULT_CONFIG,
                                 full_output: bool = False):
    """Iterated integral: inner in ``t2`` for each outer sample ``t1``, then outer in ``t1``.

    ``cfg.domain_samples`` applies to each axis, so the integrand is sampled
    ``domain_samples**2`` times.
    """
    if box.kind != "box" or box.dim != 2:
        raise StructuralError("2-D iterated integration needs a 2-D box")
    field = _as_field(f, 2)
    value, info = _refine(lambda n: _integrate_2d_once(field, box, mu, cfg, n), cfg)
    return (value, info) if full_output else value


def discrete_choquet(values, weights) -> float:
    """Choquet integral of a finite vector with respect to a set function on indices.

    ``weights`` is either a callable on ``frozenset`` of indices or a
    :class:`Capacity` defined on ``points`` sets.  Values are ranked in
    decreasing order and the increments of ``weights`` along the nested
    top-``i`` sets are summed; for signed data this equals the
    improper-integral definition with ``weights(all indices)`` as the
    baseline of the negative part.
    """
    v = np.asarray(values, dtype=float).ravel()
    if v.size == 0:
        raise DomainError("discrete_choquet needs at least one value")
    if not np.all(np.isfinite(v)):
        raise EvaluationError("non-finite value in discrete Choquet sum")
    if isinstance(weights, Capacity):
        cap = weights

        def weights(idx):
            return cap(MeasurableSet.points(idx)) if idx else 0.0

    order = np.argsort(-v, kind="stable")
    acc, prev = 0.0, 0.0
    top = set()
    for i in order:
        top.add(int(i))
        m = float(weights(frozenset(top)))
        acc += v[i] * (m - prev)
        prev = m
    return acc


__all__ = [
    "QuadratureConfig", "DEFAULT_CONFIG", "choquet_integral_1d",
    "choquet_integral_2d_iterated", "discrete_choquet", "choquet_rows",
]
