"""Declarative experiments: JSON configs in, CSV/JSON reports out.

Config schema (``"schema": "nlkorovkin-experiment/1"``); every other key is
optional unless marked required, and unknown keys are rejected::

    family          required, a name from operators.FAMILIES
    family_options  dict of constructor options for the family
    domain          {"kind": ..., "window": [lo, hi]}; must match the family
    schedule        required, strictly increasing list of positive ints
    tests           "canonical" | "canonical-nonnegative" | "classical" | "none"
    probes          list of corpus names or inline specs (see ``build_probe``)
    quadrature      {"domain_samples", "stability_tol"} for bkc1/bkc2/gauss_weierstrass
    bounds          null | a rate-bound name | "theorem3"
    shift           bool, wrap the family in the shift trick
    pass_tol        float, test-function tolerance (family default otherwise)
    probe_tol       float, probe tolerance (pass_tol otherwise)
    grid            evaluation points per axis
    diagnose        bool, include the sup_x T_n(d_x^2)(x) row (default true)
    output          "csv" | "json"
    seed            int, drives "random" probe specs
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from .exceptions import ConfigurationError
from .fields import DomainSpec, ScalarField
from .korovkin import (RATE_BOUNDS, ShiftedFamily, TestSet, build_test_set, run_harness,
                       theorem3_bound_check, verify_rate_bound)
from .opalgebra import FunctionGenerator
from .operators import FAMILIES, make_family

SCHEMA = "nlkorovkin-experiment/1"
CSV_COLUMNS = ("n", "function", "sup_error", "bound_value", "verdict")

_KEYS = {"schema", "family", "family_options", "domain", "schedule", "tests", "probes",
         "quadrature", "bounds", "shift", "pass_tol", "probe_tol", "grid", "diagnose",
         "output", "seed"}
_TESTS = ("canonical", "canonical-nonnegative", "classical", "none")
_QUADRATURE_FAMILIES = ("bkc1", "bkc2", "gauss_weierstrass")


def _version() -> str:
    from . import __version__
    return __version__


# ---------------------------------------------------------------------------
# probes

def _corpus():
    S = ScalarField
    one_d = {
        "exp": S(np.exp, 1, name="exp", lipschitz=math.e),
        "sin_pi": S(lambda x: np.sin(np.pi * x), 1, name="sin_pi", lipschitz=math.pi),
        "abs_centered": S(lambda x: np.abs(x - 0.5), 1, name="abs_centered", lipschitz=1.0),
        "one_plus_cos3": S(lambda x: 1 + np.cos(3 * x), 1, name="one_plus_cos3", lipschitz=3.0),
        "cube": S(lambda x: x ** 3, 1, name="cube", lipschitz=3.0),
        "sqrt": S(np.sqrt, 1, name="sqrt"),
        "x_minus_half": S(lambda x: x - 0.5, 1, name="x_minus_half", lipschitz=1.0),
    }
    two_d = {
        "quad_shift": S(lambda a, b: (a - 0.3) ** 2 + b, 2, name="quad_shift"),
        "exp_sum": S(lambda a, b: np.exp(a + b), 2, name="exp_sum"),
        "abs_diff": S(lambda a, b: np.abs(a - b), 2, name="abs_diff"),
        "sin_sum": S(lambda a, b: 1 + np.sin(np.pi * (a + b)), 2, name="sin_sum"),
        "x1_minus_quarter": S(lambda a, b: a - 0.25 + 0 * b, 2, name="x1_minus_quarter"),
        "gauss_bump": S(lambda a, b: np.exp(-(a ** 2 + b ** 2)), 2, name="gauss_bump"),
        "cos_prod": S(lambda a, b: 1 + np.cos(a) * np.cos(b), 2, name="cos_prod"),
    }
    circle = {
        "one_plus_cos2": S(lambda p: 1 + np.cos(2 * p), 1, name="one_plus_cos2"),
        "abs_sin": S(lambda p: np.abs(np.sin(p)), 1, name="abs_sin"),
    }
    return {"interval": one_d, "circle": circle, "box": two_d, "simplex": two_d, "plane": two_d}


PROBE_CORPUS = _corpus()


def build_probe(spec, domain: DomainSpec, rng_seed: int = 0, index: int = 0) -> ScalarField:
    """A probe from a corpus name or an inline spec.

    Inline specs are dicts with a ``name`` and one of
    ``{"polynomial": coeffs}`` (power basis; a nested list of
    ``c[i][j]`` for ``x1^i x2^j`` in 2-D),
    ``{"trig": {"const": c, "cos": [...], "sin": [...]}}`` (frequency ``k``
    multiplies ``pi * x`` on the interval, the angle on the circle and
    ``pi * (x1 + x2)`` in 2-D) or ``{"random": generator_family}``.
    """
    if isinstance(spec, str):
        table = PROBE_CORPUS[domain.kind]
        if spec not in table:
            raise ConfigurationError(f"unknown probe {spec!r} for {domain.kind}; "
                                     f"corpus: {sorted(table)}")
        return table[spec]
    if not isinstance(spec, dict) or "name" not in spec:
        raise ConfigurationError(f"probe spec must be a corpus name or a dict with 'name': {spec!r}")
    kinds = {"polynomial", "trig", "random"} & set(spec)
    extra = set(spec) - {"name", "polynomial", "trig", "random"}
    if len(kinds) != 1 or extra:
        raise ConfigurationError(f"probe {spec['name']!r}: need exactly one of polynomial/trig/random")
    name, dim = str(spec["name"]), domain.dim
    if "polynomial" in spec:
        c = np.asarray(spec["polynomial"], dtype=float)
        if c.ndim != dim or c.size == 0:
            raise ConfigurationError(f"probe {name!r}: polynomial coefficients must be {dim}-D")
        if dim == 1:
            return ScalarField(lambda x: np.polynomial.polynomial.polyval(x, c), 1, name=name)
        return ScalarField(lambda a, b: np.polynomial.polynomial.polyval2d(a, b, c), 2, name=name)
    if "trig" in spec:
        t = spec["trig"]
        if not isinstance(t, dict) or set(t) - {"const", "cos", "sin"}:
            raise ConfigurationError(f"probe {name!r}: trig needs keys const/cos/sin")
        c0 = float(t.get("const", 0.0))
        ca = np.asarray(t.get("cos", []), dtype=float)
        sa = np.asarray(t.get("sin", []), dtype=float)
        scale = 1.0 if domain.kind == "circle" else np.pi

        def trig(*x):
            u = scale * sum(x)
            out = c0 + 0.0 * u
            for k, a in enumerate(ca, start=1):
                out = out + a * np.cos(k * u)
            for k, b in enumerate(sa, start=1):
                out = out + b * np.sin(k * u)
            return out

        return ScalarField(trig, dim, name=name)
    gen = FunctionGenerator.for_domain(domain, spec["random"], seed=rng_seed + index)
    return gen.sample().renamed(name)


# ---------------------------------------------------------------------------
# config

@dataclass
class ExperimentConfig:
    family: str
    schedule: List[int]
    family_options: Dict[str, Any] = field(default_factory=dict)
    domain: Optional[Dict[str, Any]] = None
    tests: str = "canonical"
    probes: List[Any] = field(default_factory=list)
    quadrature: Dict[str, Any] = field(default_factory=dict)
    bounds: Optional[str] = None
    shift: bool = False
    pass_tol: Optional[float] = None
    probe_tol: Optional[float] = None
    grid: Optional[int] = None
    diagnose: bool = True
    output: str = "csv"
    seed: int = 0
    schema: str = SCHEMA

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        if not isinstance(raw, dict):
            raise ConfigurationError("config must be a JSON object")
        unknown = set(raw) - _KEYS
        if unknown:
            raise ConfigurationError(f"unknown config key(s): {sorted(unknown)}")
        if raw.get("schema") != SCHEMA:
            raise ConfigurationError(f"config 'schema' must be {SCHEMA!r}, got {raw.get('schema')!r}")
        for key in ("family", "schedule"):
            if key not in raw:
                raise ConfigurationError(f"missing required key {key!r}")
        cfg = cls(**raw)
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        text = Path(path).read_text(encoding="utf-8")   # OSError propagates (I/O)
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as err:
            raise ConfigurationError(f"{path}: not valid JSON ({err})") from None
        return cls.from_dict(raw)

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown family {self.family!r}; known: {sorted(FAMILIES)}")
        s = self.schedule
        if not isinstance(s, list) or not s or not all(isinstance(n, int) and n >= 1 for n in s):
            raise ConfigurationError("schedule must be a non-empty list of positive integers")
        if any(b <= a for a, b in zip(s, s[1:])):
            raise ConfigurationError(f"schedule must be strictly increasing, got {s}")
        if self.tests not in _TESTS:
            raise ConfigurationError(f"tests must be one of {_TESTS}")
        if self.output not in ("csv", "json"):
            raise ConfigurationError("output must be 'csv' or 'json'")
        if not isinstance(self.seed, int):
            raise ConfigurationError("seed must be an integer")
        if self.grid is not None and (not isinstance(self.grid, int) or self.grid < 2):
            raise ConfigurationError("grid must be an integer >= 2")
        for key in ("pass_tol", "probe_tol"):
            v = getattr(self, key)
            if v is not None and not (isinstance(v, (int, float)) and v > 0):
                raise ConfigurationError(f"{key} must be positive")
        if self.quadrature:
            if self.family not in _QUADRATURE_FAMILIES:
                raise ConfigurationError(f"'quadrature' does not apply to {self.family}")
            bad = set(self.quadrature) - {"domain_samples", "stability_tol"}
            if bad:
                raise ConfigurationError(f"unknown quadrature key(s): {sorted(bad)}")
        if self.bounds is not None and self.bounds != "theorem3":
            if self.bounds not in RATE_BOUNDS:
                raise ConfigurationError(f"unknown bound {self.bounds!r}")
            if self.bounds != self.family:
                raise ConfigurationError(f"bound {self.bounds!r} does not apply to family "
                                         f"{self.family!r}")
        family = self.make_family()
        if self.domain is not None:
            bad = set(self.domain) - {"kind", "window"}
            if bad:
                raise ConfigurationError(f"unknown domain key(s): {sorted(bad)}")
            if self.domain.get("kind", family.domain.kind) != family.domain.kind:
                raise ConfigurationError(f"{self.family} acts on {family.domain.kind}, "
                                         f"not {self.domain['kind']}")
        if not isinstance(self.probes, list):
            raise ConfigurationError("probes must be a list")
        self.probe_fields(family.domain)
        return self

    def make_family(self):
        opts = dict(self.family_options)
        if self.quadrature:
            q = self.quadrature
            if "domain_samples" in q:
                key = "cell_samples" if self.family.startswith("bkc") else "samples"
                opts[key] = int(q["domain_samples"])
            if "stability_tol" in q:
                opts["stability_tol"] = float(q["stability_tol"])
        if self.domain and "window" in self.domain:
            if self.family != "gauss_weierstrass":
                raise ConfigurationError("'window' only applies to the plane")
            opts["window"] = tuple(self.domain["window"])
        try:
            T = make_family(self.family, **opts)
        except (ValueError, TypeError) as err:
            raise ConfigurationError(f"bad family options: {err}") from None
        return ShiftedFamily(T, self.grid) if self.shift else T

    def probe_fields(self, domain: DomainSpec) -> Dict[str, ScalarField]:
        out = {}
        for i, spec in enumerate(self.probes):
            f = build_probe(spec, domain, self.seed, i)
            if f.name in out:
                raise ConfigurationError(f"duplicate probe name {f.name!r}")
            out[f.name] = f
        return out


# ---------------------------------------------------------------------------
# reports

@dataclass(frozen=True)
class ReportRow:
    n: int
    function: str
    sup_error: float
    bound_value: Optional[float]
    verdict: str


@dataclass
class ReportFile:
    """Config echo plus one row per ``(function, n)``, sorted by ``(function, n)``."""

    header: Dict[str, Any]
    rows: List[ReportRow]

    def __post_init__(self):
        self.rows = sorted(self.rows, key=lambda r: (r.function, r.n))
        for r in self.rows:
            vals = [r.sup_error] + ([] if r.bound_value is None else [r.bound_value])
            if not all(math.isfinite(v) for v in vals):
                raise ValueError(f"non-finite value in report row {r}")

    def to_dict(self) -> dict:
        return {"header": self.header, "rows": [asdict(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, d: dict) -> "ReportFile":
        return cls(d["header"], [ReportRow(**r) for r in d["rows"]])

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ReportFile":
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([r.n, r.function, repr(float(r.sup_error)),
                        "" if r.bound_value is None else repr(float(r.bound_value)), r.verdict])
        return buf.getvalue()

    @property
    def functions(self) -> List[str]:
        return sorted({r.function for r in self.rows})


def emit_report(report: ReportFile, fmt: str = "csv", path=None) -> str:
    """Serialise ``report``; write UTF-8 to ``path`` when given.  Returns the text."""
    if fmt not in ("csv", "json"):
        raise ConfigurationError(f"unknown report format {fmt!r}")
    text = report.to_csv() if fmt == "csv" else report.to_json()
    if path is not None:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as err:
            raise OSError(f"cannot write report to {path}: {err.strerror or err}") from err
    return text


def _tests_for(kind: str, domain: DomainSpec) -> TestSet:
    if kind == "none":
        return TestSet({}, "custom")
    full = build_test_set(domain)
    if kind == "canonical":
        return full
    if kind == "canonical-nonnegative":
        return full.nonnegative(domain)
    # "classical": the positive-sign members only (1, pr_k, sum of squares)
    keep = {k: f for k, f in full.functions.items() if not k.startswith("-")}
    return TestSet(keep, full.kind)


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> ReportFile:
    """Run the harness (and optional bound check) described by ``config``."""
    T = config.make_family()
    domain = T.domain
    grid = config.grid
    tests = _tests_for(config.tests, domain)
    probes = config.probe_fields(domain)
    rep = run_harness(T, tests, probes, config.schedule, grid=grid, pass_tol=config.pass_tol,
                      probe_tol=config.probe_tol, diagnose=config.diagnose, jobs=jobs)
    rows = []
    for name in list(rep.per_function) + list(rep.probes) + (["hyp2"] if rep.hyp2 else []):
        label = "sup_x T_n(d_x^2)(x)" if name == "hyp2" else name
        for n, e in zip(rep.schedule, rep.series(name)):
            rows.append(ReportRow(n, label, float(e), None, rep.verdicts[name]))

    if config.bounds == "theorem3":
        base = T.T if isinstance(T, ShiftedFamily) else T
        f = ScalarField.coordinate(1, base.dim)
        for n in config.schedule:
            r = theorem3_bound_check(base, f, [n], grid=grid or 21)
            lhs, rhs = r.details["per_n"][n]
            rows.append(ReportRow(n, "theorem3:" + f.name, lhs, rhs,
                                  "within-bound" if r.passed else "exceeds-bound"))
    elif config.bounds is not None:
        base = T.T if isinstance(T, ShiftedFamily) else T
        for n in config.schedule:
            r = verify_rate_bound(base, config.bounds, [n], grid=grid or 21)
            # the binding grid point: smallest margin bound - lhs
            per = r.details["per_n"][n]
            bound = per["bound_at_worst"]
            lhs = bound - per["min_margin"]
            rows.append(ReportRow(n, f"rate[{config.bounds}]", float(lhs), float(bound),
                                  "within-bound" if r.passed else "exceeds-bound"))

    header = {
        "config": config.to_dict(),
        "library_version": _version(),
        "family": T.name,
        "domain": domain.kind,
        "grid_resolution": grid or domain.default_resolution,
        "grid_points": rep.grid_points,
        "pass_tol": rep.pass_tol,
        "probe_tol": rep.probe_tol,
    }
    return ReportFile(header, rows)
