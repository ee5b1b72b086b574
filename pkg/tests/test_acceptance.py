"""The thirteen acceptance criteria, each at its stated tolerance.

Every test records a one-line verdict in RESULTS; conftest prints them at the
end of the session, and running this file directly prints them too.
"""

import cmath
import math

import numpy as np
import pytest

from eisensup import specfun as sf
from eisensup.arith import is_squarefree
from eisensup.eisenstein import (EvaluationPoint, completed_level1, constant_term,
                                 coprime_sum_oracle, coset_sum_oracle, count_lattice_points,
                                 count_lattice_points_naive, eval_level1,
                                 eval_levelq_array, fourier_coefficient_numeric)
from eisensup.geometry import GroupElement, S_MATRIX, T_MATRIX, act, cusps_of_level, scaling_matrix
from eisensup.harness import (RatioConfig, SweepSpec, constant_term_ratio_grid, lower_bound_grid,
                              quadratic_slope, sample_points, PointSpec, sweep_records, summarize)
from eisensup.scattering import (alpha, alpha_t_derivative, phi_entry, scattering_matrix)
from eisensup.truncation import E2PI, maass_selberg_closed_form, p_norm_quadrature

RESULTS = {}


def record(k, ok, detail):
    RESULTS[k] = f"criterion {k:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    return ok


def fd_points(count, seed, y_max=4.0):
    x, y, th = sample_points(PointSpec(count=count, y_max=y_max, seed=seed))
    return [EvaluationPoint(float(a), float(b), float(c)) for a, b, c in zip(x, y, th)]


def test_01_scattering_unitarity():
    worst = 0.0
    for q in (1, 2, 3, 5, 6, 10, 15, 30, 105):
        for t in (0.3, 1, 5, 13.7):
            worst = max(worst, scattering_matrix(q, complex(0.5, t)).unitarity_defect())
    assert record(1, worst <= 1e-9, f"max |Phi Phi* - I| = {worst:.2e} (tol 1e-9)")


def test_02_closed_form_entries_match_tensor_product():
    worst = 0.0
    for q in (q for q in range(1, 31) if is_squarefree(q)):
        for s in (complex(0.5, 2.3), complex(0.5, 0.7), complex(0.8, -1.2)):
            m = scattering_matrix(q, s)
            for a in m.cusps:
                for b in m.cusps:
                    ref = m.entries[m.index(a), m.index(b)]
                    worst = max(worst, abs(phi_entry(q, a, b, s) - ref) / abs(ref))
    assert record(2, worst <= 1e-10, f"max rel err = {worst:.2e} (tol 1e-10)")


def test_03_alpha_unimodular_derivative_and_bound():
    rng = np.random.default_rng(3)
    ts = rng.uniform(-50, 50, 20)
    mod = max(abs(abs(alpha(n, complex(0.5, t))) - 1) for n in range(-400, 401, 2) for t in ts)
    h = 1e-5
    fd = 0.0
    bound_margin = math.inf
    for n in range(-400, 401, 2):
        for t in ts:
            d = alpha_t_derivative(n, t)
            num = (alpha(n, complex(0.5, t + h)) - alpha(n, complex(0.5, t - h))) / (2 * h)
            if n:
                fd = max(fd, abs(d - num) / abs(d))
            else:
                fd = max(fd, abs(d - num))
            bound_margin = min(bound_margin, 2 * (1 + math.log(1 + abs(n) / 2)) * 2 - abs(d))
    ok = mod <= 1e-12 and fd <= 1e-6 and bound_margin >= 0
    assert record(3, ok, f"||alpha|-1| = {mod:.1e}, derivative rel err = {fd:.1e}, "
                         f"bound margin = {bound_margin:.3f}")


def test_04_evaluator_matches_oracle():
    pts = fd_points(20, seed=4)
    worst = 0.0
    for s in (1.5, complex(1.25, 0.7)):
        for n in (0, 2, -2, 8, -8):
            for p in pts:
                ev = eval_level1(p, n, s)
                ref = coprime_sum_oracle(p, n, s, method="lattice")
                worst = max(worst, abs(ev.value - ref.value) / abs(ref.value))
    assert record(4, worst <= 1e-6, f"max rel err = {worst:.2e} (tol 1e-6, lattice oracle / 2 zeta(2s))")


GENERATORS = {
    1: [T_MATRIX, S_MATRIX],
    2: [T_MATRIX, GroupElement(1, 0, 2, 1)],
    3: [T_MATRIX, GroupElement(1, 0, 3, 1), GroupElement(-1, 1, -3, 2)],
}


def test_05_automorphy_critical_line():
    pts = fd_points(6, seed=5)
    x = np.array([p.x for p in pts])
    y = np.array([p.y for p in pts])
    th = np.array([p.theta for p in pts])
    worst = 0.0
    for q, gens in GENERATORS.items():
        for a in cusps_of_level(q):
            for n in (0, 8, -8):
                for t in (0.5, 3.0):
                    s = complex(0.5, t)
                    v0, e0 = eval_levelq_array(q, a, x, y, th, n, s)
                    for g in gens:
                        x1, y1, t1 = act(g, x, y, th)
                        v1, e1 = eval_levelq_array(q, a, x1, y1, t1, n, s)
                        allow = np.maximum(1e-5 * np.abs(v0), 10 * (e0 + e1))
                        worst = max(worst, float(np.max(np.abs(v1 - v0) / allow)))
    assert record(5, worst <= 1, f"max residual / allowance = {worst:.2e}")


def test_06_functional_equation():
    rng = np.random.default_rng(6)
    worst, verbatim = 0.0, 0.0
    for _ in range(10):
        n = 2 * int(rng.integers(-10, 11))
        t = float(rng.uniform(0.2, 15))
        p = fd_points(1, seed=int(rng.integers(1 << 30)))[0]
        s = complex(0.5, t)
        a = completed_level1(p, n, s)
        b = completed_level1(p, n, 1 - s)
        worst = max(worst, abs(a.value - b.value) / max(abs(a.value), 1e-300))
        # the displayed form without pi^{-s}, for the record
        e1, e2 = eval_level1(p, n, s).value, eval_level1(p, n, 1 - s).value
        g1 = cmath.exp(sf.log_gamma(s + abs(n) / 2)) * sf.zeta(2 * s) * e1
        g2 = cmath.exp(sf.log_gamma(1 - s + abs(n) / 2)) * sf.zeta(2 - 2 * s) * e2
        verbatim = max(verbatim, abs(g1 - g2) / abs(g1))
    assert record(6, worst <= 1e-6, f"max rel residual = {worst:.2e} with pi^(-s) included "
                                    f"(without it: {verbatim:.2e})")


def test_07_constant_term_extraction():
    worst = 0.0
    for q in (1, 2):
        for a in cusps_of_level(q):
            for n, t in ((0, 1.0), (2, 1.0), (-8, 3.0)):
                s = complex(0.5, t)
                sig = scaling_matrix(a)
                for y in (0.9, 3.0, 40.0):
                    def f(xs, yy, tt):
                        xs = np.asarray(xs, dtype=float)
                        x1, y1, t1 = act(sig, xs, np.full_like(xs, yy), np.full_like(xs, tt))
                        return eval_levelq_array(q, a, x1, y1, t1, n, s)[0]
                    num = fourier_coefficient_numeric(f, 0, y, 0.4, 256)
                    ref = constant_term(q, a, a, n, t, y, 0.4)
                    worst = max(worst, abs(num - ref) / abs(ref))
    assert record(7, worst <= 1e-6, f"max rel err = {worst:.2e} (tol 1e-6)")


@pytest.mark.slow
def test_08_maass_selberg_vs_quadrature():
    worst = 0.0
    a = cusps_of_level(1)[0]
    for n, t in ((0, 1.0), (4, 0.5)):
        cf = maass_selberg_closed_form(1, a, n, t, E2PI)
        qd = p_norm_quadrature(1, a, n, t, E2PI)
        worst = max(worst, abs(cf - qd.value) / cf)
    assert record(8, worst <= 1e-3, f"max rel err = {worst:.2e} (tol 1e-3)")


def _level1_oracle(n, s):
    def f(xs, ys, ts):
        rs = [coprime_sum_oracle(EvaluationPoint(float(a), float(b), float(c)), n, s, method="lattice")
              for a, b, c in zip(xs, ys, ts)]
        return np.array([r.value for r in rs]), np.array([r.abs_error for r in rs])
    return f


@pytest.mark.slow
def test_09_level_reduction():
    worst = 0.0
    pts = [(0.1, 0.9, 0.3), (-0.4, 1.3, 2.0), (0.25, 2.5, 1.0)]
    for q in (2, 3, 6):
        for a in cusps_of_level(q):
            for n in (0, 4, -8):
                for x, y, th in pts:
                    red, _ = eval_levelq_array(q, a, x, y, th, n, 1.5, level1=_level1_oracle(n, 1.5))
                    direct = coset_sum_oracle(a, EvaluationPoint(x, y, th), n, 1.5)
                    worst = max(worst, abs(red[0] - direct.value) / abs(direct.value))
    crit = 0.0
    for a in cusps_of_level(2):
        for n, t in ((0, 1.3), (6, 2.0)):
            sig = scaling_matrix(a)

            def f(xs, yy, tt):
                xs = np.asarray(xs, dtype=float)
                x1, y1, t1 = act(sig, xs, np.full_like(xs, yy), np.full_like(xs, tt))
                return eval_levelq_array(2, a, x1, y1, t1, n, complex(0.5, t))[0]
            num = fourier_coefficient_numeric(f, 0, 40.0, 0.0, 128)
            ref = constant_term(2, a, a, n, t, 40.0, 0.0)
            crit = max(crit, abs(num - ref) / abs(ref))
    ok = worst <= 1e-5 and crit <= 1e-6
    assert record(9, ok, f"s=1.5 max rel err = {worst:.2e} (tol 1e-5); critical-line cusp constant "
                         f"term rel err = {crit:.2e}")


@pytest.mark.slow
def test_10_supnorm_bound_property_suite():
    summary = summarize(sweep_records(SweepSpec(), workers=1))
    ok = (summary.failed_rows == 0 and math.isfinite(summary.max_ratio)
          and summary.max_block_growth <= 1.2 and summary.constant_spread <= 2.0)
    assert record(10, ok, f"max ratio = {summary.max_ratio:.3f}, block growth = {summary.max_block_growth:.3f} "
                          f"(<= 1.2), constant spread = {summary.constant_spread:.3f} (<= 2)")


def test_11_lattice_count_bound():
    worst = 0.0
    mismatch = 0
    pts = fd_points(12, seed=11, y_max=10.0) + [EvaluationPoint(0.0, 1.0, 0.0),
                                                 EvaluationPoint(-0.5, math.sqrt(3) / 2, 0.0)]
    for p in pts:
        for X in (0.5, 1.0, 10.0, 100.0, 1000.0, 10000.0):
            c = count_lattice_points(p, X)
            worst = max(worst, c / (8 * (1 + math.sqrt(X) / p.y) * math.sqrt(X)))
            if X <= 1000.0:
                mismatch += c != count_lattice_points_naive(p, X)
    ok = worst <= 1 and mismatch == 0
    assert record(11, ok, f"max count / bound = {worst:.3f}; implementation mismatches = {mismatch}")


def test_12_constant_term_ratio():
    rows = constant_term_ratio_grid(RatioConfig())
    live = [r[4] for r in rows if not r[5]]
    degenerate = sum(r[5] for r in rows)
    mx = max(live)
    assert record(12, mx <= 10, f"max I(2T)/I(T) = {mx:.3f} (tol 10); {degenerate} grid points at t = 0 "
                                f"have I(T) = 0 and are flagged degenerate")


def test_13_lower_bound_regimes():
    rows = lower_bound_grid(RatioConfig())
    by_regime = {}
    for r in rows:
        by_regime.setdefault(r[5], []).append(r)
    min_c = {k: min(r[6] for r in v) for k, v in by_regime.items()}
    fails = {k: sum(not r[7] for r in v) for k, v in by_regime.items()}
    slopes = []
    for q in (1, 2, 3, 6):
        for n in (0, 8, 40):
            slopes.append(quadratic_slope(q, cusps_of_level(q)[0], n))
    slope_ok = all(abs(s - 2) <= 0.2 for s in slopes)
    ok = all(v == 0 for v in fails.values()) and slope_ok
    detail = ", ".join(f"{k}: min c = {min_c[k]:.3g}, {fails[k]}/{len(by_regime[k])} fail"
                       for k in sorted(by_regime))
    assert record(13, ok, f"{detail}; t^2 slopes in [{min(slopes):.3f}, {max(slopes):.3f}]")


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
