"""Scalar fields and evaluation domains.

A :class:`ScalarField` wraps a vectorised callable ``f(*coords)``: one array
argument per coordinate, broadcasting like a numpy ufunc.  Arithmetic on
fields builds new fields and propagates Lipschitz constants where that is
cheap to do.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exceptions import ConfigurationError, DomainError, EvaluationError


class ScalarField:
    """A real-valued function of ``dim`` variables."""

    def __init__(self, func: Callable, dim: int = 1, *, name: Optional[str] = None,
                 lipschitz: Optional[float] = None, sup_norm_hint: Optional[float] = None,
                 domain: Optional["DomainSpec"] = None):
        self.func = func
        self.dim = int(dim)
        self.name = name or getattr(func, "__name__", "f")
        self.lipschitz = lipschitz
        self.sup_norm_hint = sup_norm_hint
        self.domain = domain

    def __repr__(self):
        return f"ScalarField({self.name!r}, dim={self.dim})"

    def __call__(self, *coords):
        if len(coords) != self.dim:
            raise DomainError(f"{self.name} takes {self.dim} coordinate(s), got {len(coords)}")
        coords = [np.asarray(c, dtype=float) for c in coords]
        shape = np.broadcast_shapes(*(c.shape for c in coords))
        out = np.broadcast_to(np.asarray(self.func(*coords), dtype=float), shape)
        return out

    def at(self, points) -> np.ndarray:
        """Evaluate at an ``(m, dim)`` array of points (``(m,)`` allowed for dim 1)."""
        pts = as_points(points, self.dim)
        return self(*pts.T)

    def checked(self, *coords, context=None):
        """Like calling the field, but raise :class:`EvaluationError` on non-finite output."""
        vals = self(*coords)
        if not np.all(np.isfinite(vals)):
            bad = np.argwhere(~np.isfinite(vals))[0]
            where = tuple(float(np.broadcast_to(c, vals.shape)[tuple(bad)]) for c in coords)
            raise EvaluationError("non-finite function value", function=self.name,
                                  point=where, **(context or {}))
        return vals

    # construction helpers -------------------------------------------------
    @classmethod
    def constant(cls, c: float, dim: int = 1):
        c = float(c)
        return cls(lambda *x: np.full(np.broadcast_shapes(*(np.shape(a) for a in x)), c),
                   dim, name=repr(c) if c != 1.0 else "1", lipschitz=0.0,
                   sup_norm_hint=abs(c))

    @classmethod
    def coordinate(cls, i: int, dim: int = 1):
        """The projection ``pr_i`` (1-based, as in the usual notation)."""
        if not 1 <= i <= dim:
            raise DomainError(f"coordinate {i} out of range for dim {dim}")

        def pr(*x):
            return x[i - 1] + 0.0 * sum(x)

        return cls(pr, dim, name=f"pr{i}" if dim > 1 else "e1", lipschitz=1.0)

    # arithmetic ---------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, ScalarField):
            if other.dim != self.dim:
                raise DomainError("fields of different dimension")
            return other
        if isinstance(other, numbers.Real):
            return ScalarField.constant(float(other), self.dim)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        f, g = self.func, other.func
        lip = None if self.lipschitz is None or other.lipschitz is None \
            else self.lipschitz + other.lipschitz
        return ScalarField(lambda *x: f(*x) + g(*x), self.dim,
                           name=f"({self.name}+{other.name})", lipschitz=lip)

    __radd__ = __add__

    def __neg__(self):
        f = self.func
        name = self.name[1:] if self.name.startswith("-") else f"-{self.name}"
        return ScalarField(lambda *x: -f(*x), self.dim, name=name,
                           lipschitz=self.lipschitz, sup_norm_hint=self.sup_norm_hint)

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Real):
            a = float(other)
            f = self.func
            lip = None if self.lipschitz is None else abs(a) * self.lipschitz
            hint = None if self.sup_norm_hint is None else abs(a) * self.sup_norm_hint
            return ScalarField(lambda *x: a * f(*x), self.dim, name=f"{a:g}*{self.name}",
                               lipschitz=lip, sup_norm_hint=hint)
        other = self._lift(other)
        if other is NotImplemented:
            return other
        f, g = self.func, other.func
        return ScalarField(lambda *x: f(*x) * g(*x), self.dim,
                           name=f"{self.name}*{other.name}")

    __rmul__ = __mul__

    def __abs__(self):
        f = self.func
        return ScalarField(lambda *x: np.abs(f(*x)), self.dim, name=f"|{self.name}|",
                           lipschitz=self.lipschitz, sup_norm_hint=self.sup_norm_hint)

    def __pow__(self, p):
        f = self.func
        p = float(p)
        return ScalarField(lambda *x: f(*x) ** p, self.dim, name=f"{self.name}^{p:g}")

    def maximum(self, other):
        other = self._lift(other)
        f, g = self.func, other.func
        return ScalarField(lambda *x: np.maximum(f(*x), g(*x)), self.dim,
                           name=f"max({self.name},{other.name})")

    def compose(self, phi: Callable, name: Optional[str] = None):
        """``phi o f`` for a vectorised scalar map ``phi``."""
        f = self.func
        return ScalarField(lambda *x: phi(f(*x)), self.dim,
                           name=name or f"phi({self.name})")

    def renamed(self, name: str, **attrs):
        out = ScalarField(self.func, self.dim, name=name, lipschitz=self.lipschitz,
                          sup_norm_hint=self.sup_norm_hint, domain=self.domain)
        for k, v in attrs.items():
            setattr(out, k, v)
        return out

    def sup_norm(self, points) -> float:
        """``sup_norm_hint`` if provided, else the max of ``|f|`` over ``points``."""
        if self.sup_norm_hint is not None:
            return float(self.sup_norm_hint)
        return float(np.max(np.abs(self.at(points))))

    def validate_lipschitz(self, points, metric, slack: float = 1e-9) -> float:
        """Largest sampled difference quotient; raises if it exceeds ``lipschitz``."""
        if self.lipschitz is None:
            raise ConfigurationError(f"{self.name} has no Lipschitz constant")
        pts = as_points(points, self.dim)
        vals = self.at(pts)
        d = metric(pts[:, None, :], pts[None, :, :])
        diff = np.abs(vals[:, None] - vals[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(d > 0, diff / d, 0.0)
        worst = float(q.max())
        if worst > self.lipschitz + slack:
            raise ConfigurationError(
                f"{self.name}: sampled difference quotient {worst:.6g} exceeds "
                f"declared Lipschitz constant {self.lipschitz:.6g}")
        return worst


def as_points(points, dim: int) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 0:
        pts = pts.reshape(1, 1)
    elif pts.ndim == 1:
        pts = pts.reshape(-1, 1) if dim == 1 else pts.reshape(1, -1)
    if pts.shape[-1] != dim:
        raise DomainError(f"expected points of dimension {dim}, got shape {pts.shape}")
    return pts


def euclidean(x, y):
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    return np.sqrt(np.sum((x - y) ** 2, axis=-1))


def chordal(phi, psi):
    """Metric on the circle induced by the plane, in angle coordinates."""
    phi, psi = np.asarray(phi, dtype=float), np.asarray(psi, dtype=float)
    return np.abs(2.0 * np.sin((phi - psi)[..., 0] / 2.0))


_DIMS = {"interval": 1, "box": 2, "simplex": 2, "circle": 1, "plane": 2}


@dataclass(frozen=True)
class DomainSpec:
    """A compact evaluation region with its metric.

    For ``plane`` the underlying space is all of R^2 but evaluation is
    confined to the square ``window x window``.  Circle points are angles.
    """

    kind: str
    resolution: Optional[int] = None
    window: tuple = (-2.0, 2.0)

    def __post_init__(self):
        if self.kind not in _DIMS:
            raise ConfigurationError(f"unsupported domain kind {self.kind!r}")
        if self.resolution is not None and self.resolution < 2:
            raise ConfigurationError("grid resolution must be at least 2")

    @classmethod
    def interval(cls, resolution=None):
        return cls("interval", resolution)

    @classmethod
    def box(cls, resolution=None):
        return cls("box", resolution)

    @classmethod
    def simplex(cls, resolution=None):
        return cls("simplex", resolution)

    @classmethod
    def circle(cls, resolution=None):
        return cls("circle", resolution)

    @classmethod
    def plane(cls, window=(-2.0, 2.0), resolution=None):
        return cls("plane", resolution, tuple(float(w) for w in window))

    @property
    def dim(self) -> int:
        return _DIMS[self.kind]

    @property
    def default_resolution(self) -> int:
        if self.resolution is not None:
            return self.resolution
        return 201 if self.kind == "circle" else 101

    def with_resolution(self, resolution):
        return DomainSpec(self.kind, resolution, self.window)

    def metric(self, x, y):
        if self.kind == "circle":
            return chordal(x, y)
        return euclidean(x, y)

    def grid(self, resolution: Optional[int] = None) -> np.ndarray:
        """Evaluation points as an ``(m, dim)`` array."""
        r = resolution or self.default_resolution
        if self.kind == "interval":
            return np.linspace(0.0, 1.0, r)[:, None]
        if self.kind == "circle":
            return np.linspace(0.0, 2 * np.pi, r, endpoint=False)[:, None]
        lo, hi = (0.0, 1.0) if self.kind != "plane" else self.window
        g = np.linspace(lo, hi, r)
        x1, x2 = np.meshgrid(g, g, indexing="ij")
        pts = np.column_stack([x1.ravel(), x2.ravel()])
        if self.kind == "simplex":
            pts = pts[pts.sum(axis=1) <= 1.0 + 1e-12]
        return pts

    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        pts = as_points(points, self.dim)
        if self.kind == "interval":
            return (pts[:, 0] >= -tol) & (pts[:, 0] <= 1 + tol)
        if self.kind == "box":
            return np.all((pts >= -tol) & (pts <= 1 + tol), axis=1)
        if self.kind == "simplex":
            return np.all(pts >= -tol, axis=1) & (pts.sum(axis=1) <= 1 + tol)
        return np.ones(len(pts), dtype=bool)

    @property
    def diameter(self) -> float:
        if self.kind == "interval":
            return 1.0
        if self.kind in ("box", "simplex"):
            return float(np.sqrt(2.0))
        if self.kind == "circle":
            return 2.0
        lo, hi = self.window
        return float(np.sqrt(2.0) * (hi - lo))
