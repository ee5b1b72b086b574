"""Sweeps, invariant suites and plot-data emission.

Everything here is deterministic for a fixed configuration and seed: work
items are computed independently and sorted canonically before anything is
written, so the worker count never changes an output byte.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate
from scipy.stats import qmc

from . import __version__
from .arith import is_squarefree
from .eisenstein import (EvaluationPoint, EvaluatorConfig, afe_majorant, count_lattice_points,
                         count_lattice_points_naive, eval_levelq_array)
from .errors import AccuracyError, ConfigError
from .geometry import act, cusp_for_divisor, cusps_of_level, S_MATRIX, T_MATRIX, GroupElement
from .scattering import alpha, psi, scattering_matrix, weighted_entry
from .truncation import (E2PI, REGIME_LARGE, REGIME_QUADRATIC, REGIME_SMALL, constant_term_integral,
                         constant_term_ratio, constant_term_sup, maass_selberg_closed_form,
                         norm_bound_ratio, p_norm_lower_bound_check, truncation_T_for_height)

EXIT_OK, EXIT_INVARIANT, EXIT_CONFIG, EXIT_ACCURACY = 0, 1, 2, 3


def fmt(v) -> str:
    """Round-trip float formatting used in every CSV."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PointSpec:
    count: int = 64
    y_max: float = 40.0
    seed: int = 20240101

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError("points.count must be positive")
        if not self.y_max > 1.0:
            raise ConfigError("points.y_max must exceed 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("points.seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class SweepSpec:
    levels: tuple = (1, 2, 3, 6)
    weights: tuple = (0, 2, -2, 8, -8, 20, -20, 40, -40)
    types: tuple = (0.0, 0.3, 1.0, 3.0, 10.0, 25.0)
    points: PointSpec = PointSpec()
    epsilon: float = 0.1
    cusps: str = "all"
    tol: float = 1e-10

    def __post_init__(self):
        for q in self.levels:
            if int(q) != q or not is_squarefree(int(q)):
                raise ConfigError(f"level {q} is not squarefree")
        for n in self.weights:
            if int(n) != n or int(n) % 2:
                raise ConfigError(f"weight {n} is not even")
        if not 0 < self.epsilon < 0.5:
            raise ConfigError("epsilon must lie in (0, 1/2)")
        if self.cusps not in ("all", "infinity"):
            raise ConfigError("cusps must be 'all' or 'infinity'")
        if not self.tol > 0:
            raise ConfigError("tol must be positive")


@dataclass(frozen=True)
class InvariantConfig:
    unitarity_levels: tuple = (1, 2, 3, 5, 6, 10, 15, 30, 105)
    unitarity_types: tuple = (0.3, 1.0, 5.0, 13.7)
    psi_perturbation: float = 0.0
    quadrature_samples: int = 200
    seed: int = 7


@dataclass(frozen=True)
class RatioConfig:
    levels: tuple = (1, 2, 6)
    max_weight: int = 100
    weight_step: int = 2
    max_type: float = 50.0
    type_count: int = 101
    norm_levels: tuple = (1, 2, 3, 6)
    norm_max_weight: int = 400
    lower_bound_c: float = 0.05
    lattice_X: tuple = (1.0, 10.0, 100.0, 1000.0, 10000.0)
    lattice_points: int = 12


@dataclass(frozen=True)
class HarnessConfig:
    sweep: SweepSpec = SweepSpec()
    invariants: InvariantConfig = InvariantConfig()
    ratios: RatioConfig = RatioConfig()

    def config_hash(self) -> str:
        blob = json.dumps(dataclasses.asdict(self), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()


def _build(cls, data, where):
    if not isinstance(data, dict):
        raise ConfigError(f"[{where}] must be a table")
    names = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(data) - set(names)
    if unknown:
        raise ConfigError(f"unknown key(s) in [{where}]: {sorted(unknown)}")
    kw = {}
    for k, v in data.items():
        if k == "points":
            kw[k] = _build(PointSpec, v, f"{where}.points")
        elif isinstance(v, list):
            kw[k] = tuple(v)
        else:
            kw[k] = v
    try:
        return cls(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def config_from_mapping(data: dict) -> HarnessConfig:
    unknown = set(data) - {"sweep", "invariants", "ratios"}
    if unknown:
        raise ConfigError(f"unknown table(s): {sorted(unknown)}")
    return HarnessConfig(sweep=_build(SweepSpec, data.get("sweep", {}), "sweep"),
                         invariants=_build(InvariantConfig, data.get("invariants", {}), "invariants"),
                         ratios=_build(RatioConfig, data.get("ratios", {}), "ratios"))


def load_config(path) -> HarnessConfig:
    try:
        import tomllib
    except ModuleNotFoundError:  # Python < 3.11
        import tomli as tomllib
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid config: {exc}") from None
    return config_from_mapping(data)


# ---------------------------------------------------------------------------
# Records and manifest
# ---------------------------------------------------------------------------

RECORD_FIELDS = ("q", "cusp", "n", "t", "x", "y", "theta", "value_re", "value_im", "abs_error",
                 "bound_denominator", "ratio", "status")


@dataclass(frozen=True)
class ResultRecord:
    q: int
    cusp: int
    n: int
    t: float
    x: float
    y: float
    theta: float
    value_re: float
    value_im: float
    abs_error: float
    bound_denominator: float
    ratio: float
    status: str = "ok"

    def sort_key(self):
        return (self.q, self.cusp, self.n, self.t, self.x, self.y, self.theta)

    def row(self):
        return [fmt(getattr(self, f)) for f in RECORD_FIELDS]


@dataclass
class RunManifest:
    config_hash: str
    seed: int
    tool_version: str = __version__
    started: float = field(default_factory=time.time)
    finished: Optional[float] = None
    suites: dict = field(default_factory=dict)

    def write(self, out):
        self.finished = time.time()
        with open(os.path.join(out, "manifest.json"), "w", encoding="utf-8") as fh:
            json.dump(dataclasses.asdict(self), fh, indent=2, sort_keys=True)


def bound_denominator(n, t, y, eps) -> float:
    e = 0.5 + eps
    return (1.0 + abs(n) ** e + abs(t) ** e) * math.sqrt(y + 1.0 / y)


def sample_points(ps: PointSpec):
    """Scrambled Halton points in the fundamental domain, y log-uniform above the arc."""
    u = qmc.Halton(d=3, scramble=True, seed=np.random.default_rng(ps.seed)).random(ps.count)
    x = u[:, 0] - 0.5
    lo = np.sqrt(1.0 - x ** 2)
    y = lo * np.exp(u[:, 1] * np.log(ps.y_max / lo))
    theta = 2.0 * math.pi * u[:, 2]
    return x, y, theta


def write_records(records, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_FIELDS)
        for r in records:
            w.writerow(r.row())


def read_records(path):
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            kw = {k: row[k] for k in RECORD_FIELDS}
            for k in ("q", "cusp", "n"):
                kw[k] = int(kw[k])
            for k in RECORD_FIELDS[3:12]:
                kw[k] = float(kw[k])
            out.append(ResultRecord(**kw))
    return out


# ---------------------------------------------------------------------------
# Sup-norm sweep
# ---------------------------------------------------------------------------

def _sweep_item(args):
    q, v, n, t, x, y, theta, eps, tol = args
    cusp = cusp_for_divisor(q, v)
    cfg = EvaluatorConfig(tol=tol)
    den = [bound_denominator(n, t, yy, eps) for yy in y]
    try:
        vals, errs = eval_levelq_array(q, cusp, x, y, theta, n, complex(0.5, t), cfg)
        status = ["ok"] * len(x)
    except AccuracyError:
        vals = np.full(len(x), complex(math.nan, math.nan))
        errs = np.full(len(x), math.nan)
        status = ["accuracy"] * len(x)
    return [ResultRecord(q, v, n, float(t), float(x[i]), float(y[i]), float(theta[i]),
                         float(vals[i].real), float(vals[i].imag), float(errs[i]), den[i],
                         float(abs(vals[i]) / den[i]), status[i]) for i in range(len(x))]


def dyadic_block(n, t) -> int:
    return int(math.floor(math.log2(1.0 + abs(n) + abs(t))))


@dataclass
class SweepSummary:
    rows: int
    failed_rows: int
    max_ratio: float
    block_max: dict
    max_block_growth: float
    fitted_constant: dict
    constant_spread: float
    passed: bool

    def as_dict(self):
        return dataclasses.asdict(self)


def summarize(records, growth_limit=1.2, spread_limit=2.0) -> SweepSummary:
    ok = [r for r in records if r.status == "ok" and math.isfinite(r.ratio)]
    blocks, per_q = {}, {}
    for r in ok:
        b = dyadic_block(r.n, r.t)
        blocks[b] = max(blocks.get(b, 0.0), r.ratio)
        per_q[r.q] = max(per_q.get(r.q, 0.0), r.ratio)
    keys = sorted(blocks)
    growth = 0.0
    for k0, k1 in zip(keys, keys[1:]):
        if blocks[k0] > 0:
            growth = max(growth, blocks[k1] / blocks[k0])
    consts = [c for c in per_q.values() if c > 0]
    spread = max(consts) / min(consts) if consts else math.nan
    mx = max((r.ratio for r in ok), default=math.nan)
    passed = (len(ok) == len(records) and math.isfinite(mx) and growth <= growth_limit
              and (len(consts) < 2 or spread <= spread_limit))
    return SweepSummary(len(records), len(records) - len(ok), mx, {str(k): blocks[k] for k in keys}, growth,
                        {str(k): per_q[k] for k in sorted(per_q)}, spread, passed)


def sweep_records(spec: SweepSpec, workers: int = 1):
    x, y, theta = sample_points(spec.points)
    items = []
    for q in spec.levels:
        cusps = cusps_of_level(q) if spec.cusps == "all" else [cusps_of_level(q)[-1]]
        for c in cusps:
            for n in spec.weights:
                for t in spec.types:
                    items.append((int(q), c.divisor, int(n), float(t), x, y, theta, spec.epsilon, spec.tol))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            chunks = list(ex.map(_sweep_item, items))
    else:
        chunks = [_sweep_item(it) for it in items]
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=ResultRecord.sort_key)
    return records


def run_supnorm_sweep(spec: SweepSpec, out, workers: int = 1) -> SweepSummary:
    os.makedirs(out, exist_ok=True)
    records = sweep_records(spec, workers)
    write_records(records, os.path.join(out, "supnorm.csv"))
    summary = summarize(records)
    with open(os.path.join(out, "supnorm_summary.json"), "w", encoding="utf-8") as fh:
        json.dump(summary.as_dict(), fh, indent=2, sort_keys=True)
    return summary


def y_scaling_check(q, a, n, t, x, y, theta=0.0, tol=1e-6):
    """|E(2y)| / |E(y)| against sqrt(2) times the constant-term modulation factor.

    In the cuspidal zone E is its constant term y^{1/2}(1 + A y^{-2it}) up to
    exponentially small terms, so the ratio is sqrt(2) |1 + A (2y)^{-2it}| / |1 + A y^{-2it}|.
    Returns (measured, predicted, passed).
    """
    s = complex(0.5, t)
    v, _ = eval_levelq_array(q, a, np.array([x, x]), np.array([y, 2 * y]), np.array([theta, theta]), n, s)
    measured = abs(v[1]) / abs(v[0])
    A = weighted_entry(q, a, a, n, t)
    f = abs(1 + A * (2 * y) ** (-2j * t)) / abs(1 + A * y ** (-2j * t))
    predicted = math.sqrt(2) * f
    return measured, predicted, bool(measured <= predicted * (1 + tol))


# ---------------------------------------------------------------------------
# Invariant suite
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InvariantResult:
    name: str
    passed: bool
    margin: float
    detail: str = ""


@dataclass
class InvariantReport:
    results: list

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def as_dict(self):
        return {"passed": self.passed, "results": [dataclasses.asdict(r) for r in self.results]}


CENTRAL_POINT_NOTE = ("psi(1/2) = -1, so Phi(1/2) = -I and E(., 1/2) vanishes identically; "
                      "a central value equal to the identity is not what the formulas give")


def _unitarity(cfg: InvariantConfig):
    worst = 0.0
    for q in cfg.unitarity_levels:
        for t in cfg.unitarity_types:
            s = complex(0.5, t)
            pv = psi(s) * (1 + cfg.psi_perturbation)
            worst = max(worst, scattering_matrix(q, s, psi_value=pv).unitarity_defect())
    return InvariantResult("scattering_unitarity", worst <= 1e-9, 1e-9 - worst, f"max defect {worst:.3g}")


def _symmetry_and_fe(cfg):
    worst_sym, worst_fe = 0.0, 0.0
    for q in cfg.unitarity_levels:
        for s in (complex(0.8, 2.0), complex(0.3, -1.1)):
            m = scattering_matrix(q, s)
            worst_sym = max(worst_sym, m.symmetry_defect())
            prod = m.entries @ scattering_matrix(q, 1 - s).entries
            worst_fe = max(worst_fe, float(np.max(np.abs(prod - np.eye(prod.shape[0])))))
    return [InvariantResult("scattering_symmetry", worst_sym <= 1e-12, 1e-12 - worst_sym),
            InvariantResult("scattering_functional_equation", worst_fe <= 1e-9, 1e-9 - worst_fe)]


def _alpha_unimodular():
    worst = max(abs(abs(alpha(n, complex(0.5, t))) - 1) for n in range(-400, 401, 8) for t in (0.1, 1.0, 7.3, 40.0))
    return InvariantResult("alpha_unimodular", worst <= 1e-12, 1e-12 - worst)


def _central_point():
    v = psi(0.5)
    ok = abs(v + 1) < 1e-14
    return InvariantResult("psi_central_value", ok, 1e-14 - abs(v + 1), CENTRAL_POINT_NOTE)


def _ms_nonnegative():
    worst = math.inf
    for q in (1, 2, 3, 6):
        for a in cusps_of_level(q):
            for n in (0, 2, -8, 40):
                for t in (0.0, 1e-3, 0.3, 1.0, 5.0, 25.0):
                    for T in (E2PI, 4 * E2PI):
                        worst = min(worst, maass_selberg_closed_form(q, a, n, t, T))
    return InvariantResult("maass_selberg_nonnegative", worst >= -1e-8, worst + 1e-8)


def _integral_quadrature(cfg: InvariantConfig):
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(cfg.quadrature_samples):
        q = int(rng.choice([1, 2, 3, 6]))
        a = cusps_of_level(q)[int(rng.integers(len(cusps_of_level(q))))]
        n = 2 * int(rng.integers(-20, 21))
        t = float(rng.uniform(-5, 5))
        V = float(np.exp(rng.uniform(0, 2 * math.pi)))
        A = weighted_entry(q, a, a, n, t)
        f = lambda u: abs(1 + np.exp(-2j * t * u) * A) ** 2  # noqa: E731  (u = log y)
        ref, _ = integrate.quad(f, 0.0, math.log(V), epsabs=1e-12, epsrel=1e-12, limit=400)
        worst = max(worst, abs(ref - constant_term_integral(V, q, a, n, t)))
    return InvariantResult("constant_term_integral_quadrature", worst <= 1e-9, 1e-9 - worst)


def _sup_relations():
    worst = math.inf
    for q in (1, 2, 6):
        for a in cusps_of_level(q):
            for n in (0, 4, -10):
                for t in (0.05, 0.4, 1.0, 3.0):
                    for V in (math.e, 10.0, E2PI):
                        A = abs(weighted_entry(q, a, a, n, t))
                        sv = constant_term_sup(V, q, a, n, t)
                        iv = constant_term_integral(V, q, a, n, t)
                        worst = min(worst, 1 + A - sv + 1e-15, sv * sv * math.log(V) - iv + 1e-12)
    return InvariantResult("constant_term_sup_relations", worst >= 0, worst)


def _regime_coverage():
    seen = set()
    for q in (1, 2, 3, 6):
        for n in range(-40, 41, 2):
            for t in (0.0, 1e-4, 1e-3, 0.01, 0.1, 0.5, 1.0, 1.5, 10.0):
                r = p_norm_lower_bound_check(q, cusps_of_level(q)[0], n, t)
                if r.regime not in (REGIME_SMALL, REGIME_QUADRATIC, REGIME_LARGE):
                    return InvariantResult("regime_coverage", False, -1.0, f"unclassified {q, n, t}")
                seen.add(r.regime)
    return InvariantResult("regime_coverage", len(seen) == 3, float(len(seen) - 3), ",".join(sorted(seen)))


def _automorphy():
    worst = 0.0
    gens = {1: [T_MATRIX, S_MATRIX], 2: [T_MATRIX, GroupElement(1, 0, 2, 1)], 3: [T_MATRIX, GroupElement(1, 0, 3, 1)]}
    x, y, th = np.array([0.1, -0.3]), np.array([1.2, 0.95]), np.array([0.4, 2.0])
    for q, gs in gens.items():
        for a in cusps_of_level(q):
            for n, t in ((0, 0.5), (8, 3.0), (-8, 0.5)):
                s = complex(0.5, t)
                v0, e0 = eval_levelq_array(q, a, x, y, th, n, s)
                for g in gs:
                    x1, y1, t1 = act(g, x, y, th)
                    v1, e1 = eval_levelq_array(q, a, x1, y1, t1, n, s)
                    allow = np.maximum(1e-5 * np.abs(v0), 10 * (e0 + e1))
                    worst = max(worst, float(np.max(np.abs(v1 - v0) / allow)))
    return InvariantResult("automorphy", worst <= 1.0, 1.0 - worst, "residual / allowance")


def _lattice_agreement():
    bad = 0
    for z in ((0.0, 1.0), (0.3, 0.96), (-0.5, math.sqrt(3) / 2), (0.2, 3.0)):
        p = EvaluationPoint(z[0], z[1], 0.0)
        for X in (1.0, 2.0, 10.0, 100.0, 500.0):
            bad += count_lattice_points(p, X) != count_lattice_points_naive(p, X)
    return InvariantResult("lattice_count_agreement", bad == 0, float(-bad))


def _truncation_policy():
    ok = (truncation_T_for_height(1.0) == E2PI and truncation_T_for_height(E2PI) == 4 * E2PI
          and truncation_T_for_height(3 * E2PI) == E2PI)
    return InvariantResult("truncation_policy", ok, 0.0 if ok else -1.0)


def run_invariant_suite(config: InvariantConfig, out=None) -> InvariantReport:
    results = [_unitarity(config)]
    results += _symmetry_and_fe(config)
    results += [_alpha_unimodular(), _central_point(), _ms_nonnegative(), _integral_quadrature(config),
                _sup_relations(), _regime_coverage(), _automorphy(), _lattice_agreement(), _truncation_policy()]
    report = InvariantReport(results)
    if out is not None:
        os.makedirs(out, exist_ok=True)
        with open(os.path.join(out, "invariants.json"), "w", encoding="utf-8") as fh:
            json.dump(report.as_dict(), fh, indent=2, sort_keys=True)
    return report


# ---------------------------------------------------------------------------
# Ratio suite
# ---------------------------------------------------------------------------

def ratio_type_grid(cfg: RatioConfig):
    ts = list(np.linspace(-cfg.max_type, cfg.max_type, cfg.type_count))
    ts += [1e-6, -1e-4, 1e-3, 0.01, -0.05]
    return sorted(set(float(t) for t in ts))


def constant_term_ratio_grid(cfg: RatioConfig, T=E2PI):
    """Rows (q, cusp, n, t, ratio, degenerate) for I(2T)/I(T)."""
    rows = []
    for q in cfg.levels:
        for a in cusps_of_level(q):
            for n in range(0, cfg.max_weight + 1, cfg.weight_step):
                for t in ratio_type_grid(cfg):
                    r = constant_term_ratio(q, a, n, t, T, 2 * T)
                    rows.append((q, a.divisor, n, t, r.ratio, r.degenerate))
    return rows


def lower_bound_grid(cfg: RatioConfig):
    ts = sorted(set([0.0, 0.3, 1.0, 3.0, 10.0, 25.0, 1.5, 2.0] + list(np.geomspace(1e-4, 1.0, 25))))
    rows = []
    for q in cfg.norm_levels:
        for a in cusps_of_level(q):
            for n in (0, 2, -2, 8, -8, 20, -20, 40, -40):
                for t in ts:
                    r = p_norm_lower_bound_check(q, a, n, t, c=cfg.lower_bound_c)
                    rows.append((q, a.divisor, n, t, r.surrogate, r.regime, r.fitted_c, r.pass_))
    return rows


def quadratic_slope(q, a, n, decades=1.0, count=9, small_const=0.01):
    """log-log slope of the surrogate against t over the lowest decade(s) of the t^2 regime."""
    from .truncation import lower_bound_scale
    lo = small_const / lower_bound_scale(q, n) * 1.0001
    hi = min(1.0, lo * 10 ** decades)
    ts = np.geomspace(lo, hi, count)
    S = [p_norm_lower_bound_check(q, a, n, t).surrogate for t in ts]
    return float(np.polyfit(np.log(ts), np.log(S), 1)[0])


def norm_bound_grid(cfg: RatioConfig):
    rows = []
    for q in cfg.norm_levels:
        for a in cusps_of_level(q):
            for n in range(0, cfg.norm_max_weight + 1, 20):
                for t in (0.5, 1.0, 5.0, 20.0):
                    rows.append((q, a.divisor, n, t, norm_bound_ratio(q, a, n, t)))
    return rows


def lattice_bound_grid(cfg: RatioConfig):
    x, y, _ = sample_points(PointSpec(count=cfg.lattice_points, y_max=10.0, seed=11))
    rows = []
    for xi, yi in zip(x, y):
        p = EvaluationPoint(float(xi), float(yi), 0.0)
        for X in cfg.lattice_X:
            cnt = count_lattice_points(p, X)
            bound = 8 * (1 + math.sqrt(X) / yi) * math.sqrt(X)
            rows.append((float(xi), float(yi), X, cnt, bound))
    return rows


def afe_trend(eps=0.1):
    rows = []
    p = EvaluationPoint(0.1, 1.3, 0.0)
    for n, t in ((0, 1.0), (8, 3.0), (20, 10.0), (40, 25.0), (80, 50.0)):
        maj = afe_majorant(p, n, t, eps)
        rows.append((n, t, maj, maj / (1 + abs(n) + abs(t)) ** (0.5 + eps)))
    return rows


@dataclass
class RatioReport:
    ratio_max: float
    ratio_degenerate: int
    norm_bound_max: float
    norm_bound_block_max: dict
    lower_bound_min_c: dict
    lower_bound_failures: int
    quadratic_slopes: dict
    lattice_worst: float
    afe_normalized: list
    passed: dict

    def as_dict(self):
        return dataclasses.asdict(self)


def _write_rows(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])


def run_ratio_suite(config: RatioConfig, out=None) -> RatioReport:
    cr = constant_term_ratio_grid(config)
    live = [r[4] for r in cr if not r[5]]
    nb = norm_bound_grid(config)
    blocks = {}
    for q, _, n, t, v in nb:
        k = str(n // 100)
        blocks[k] = max(blocks.get(k, 0.0), v)
    lb = lower_bound_grid(config)
    min_c = {}
    for r in lb:
        min_c[r[5]] = min(min_c.get(r[5], math.inf), r[6])
    slopes = {}
    for q in config.norm_levels:
        a = cusps_of_level(q)[0]
        for n in (0, 8, 40):
            slopes[f"q{q}_n{n}"] = quadratic_slope(q, a, n)
    lat = lattice_bound_grid(config)
    lat_worst = max(r[3] / r[4] for r in lat)
    afe = afe_trend()
    bvals = [blocks[k] for k in sorted(blocks, key=int)]
    monotone_divergence = all(b1 > b0 for b0, b1 in zip(bvals, bvals[1:])) and bvals[-1] > 2 * bvals[0]
    passed = {
        "constant_term_ratio": bool(max(live) <= 10),
        "norm_bound_no_divergence": not monotone_divergence,
        "lower_bound_regimes": all(r[7] for r in lb),
        "quadratic_slope": all(abs(s - 2) <= 0.2 for s in slopes.values()),
        "lattice_count_bound": bool(lat_worst <= 1.0),
    }
    report = RatioReport(max(live), sum(r[5] for r in cr), max(r[4] for r in nb), blocks, min_c,
                         sum(not r[7] for r in lb), slopes, lat_worst, [list(r) for r in afe], passed)
    if out is not None:
        os.makedirs(out, exist_ok=True)
        _write_rows(os.path.join(out, "constant_term_ratio.csv"), ("q", "cusp", "n", "t", "ratio", "degenerate"), cr)
        _write_rows(os.path.join(out, "norm_bound.csv"), ("q", "cusp", "n", "t", "ratio"), nb)
        _write_rows(os.path.join(out, "lower_bound.csv"),
                    ("q", "cusp", "n", "t", "surrogate", "regime", "fitted_c", "pass"), lb)
        _write_rows(os.path.join(out, "lattice_count.csv"), ("x", "y", "X", "count", "bound"), lat)
        _write_rows(os.path.join(out, "afe_majorant.csv"), ("n", "t", "majorant", "normalized"), afe)
        with open(os.path.join(out, "ratio_summary.json"), "w", encoding="utf-8") as fh:
            json.dump(report.as_dict(), fh, indent=2, sort_keys=True)
    return report


# ---------------------------------------------------------------------------
# Plot data
# ---------------------------------------------------------------------------

PLOT_FILES = ("ratio_vs_n.csv", "ratio_vs_t.csv", "ratio_vs_y.csv")


def emit_plot_data(records, out):
    """Three CSVs: max ratio per (q, n), max ratio per (q, t), and every (y, ratio) pair."""
    os.makedirs(out, exist_ok=True)
    ok = [r for r in records if r.status == "ok"]
    by_n, by_t = {}, {}
    for r in ok:
        by_n[(r.q, abs(r.n))] = max(by_n.get((r.q, abs(r.n)), 0.0), r.ratio)
        by_t[(r.q, r.t)] = max(by_t.get((r.q, r.t), 0.0), r.ratio)
    paths = [os.path.join(out, f) for f in PLOT_FILES]
    _write_rows(paths[0], ("q", "abs_n", "max_ratio"), [(q, n, v) for (q, n), v in sorted(by_n.items())])
    _write_rows(paths[1], ("q", "t", "max_ratio"), [(q, t, v) for (q, t), v in sorted(by_t.items())])
    _write_rows(paths[2], ("q", "n", "t", "y", "ratio"),
                sorted((r.q, r.n, r.t, r.y, r.ratio) for r in ok))
    return paths


__all__ = [name for name in dir() if not name.startswith("_")]
