"""Truncation operator, Maass-Selberg norms and the one-dimensional constant-term integrals.

Norms use the hyperbolic measure dx dy / y^2 on a fundamental domain; the
integrands are of pure weight, so the theta fibre only contributes a
constant factor and is left out.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .arith import require_squarefree
from .eisenstein import (DEFAULT_CONFIG, EvalResult, EvaluationPoint, EvaluatorConfig, constant_term,
                         eval_levelq, eval_levelq_array)
from .errors import AccuracyError, DomainError
from .geometry import (Cusp, act, cusps_of_level, height, iwasawa_compose, level_coset_representatives,
                       scaling_matrix, zone_coordinates, IwasawaCoordinates)
from .scattering import alpha, phi_entry, weighted_entry, weighted_entry_s_derivative

E2PI = math.exp(2.0 * math.pi)


@dataclass(frozen=True)
class TruncationPolicy:
    base_T: float = E2PI
    boosted_T: float = 4.0 * E2PI

    def T_for(self, h: float) -> float:
        if not h > 0:
            raise DomainError("height must be positive")
        if E2PI / 2 <= h <= 2 * E2PI:
            return self.boosted_T
        return self.base_T


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class NormEstimate:
    value: float
    abs_error: float
    method: str

    def __post_init__(self):
        if self.abs_error < 0 or self.value < -self.abs_error - 1e-12:
            raise DomainError("norm estimate violates value >= -abs_error")


def truncation_T_for_height(h: float) -> float:
    return DEFAULT_POLICY.T_for(h)


def truncated_eval(q, a: Cusp, n, t, p: EvaluationPoint, T: float,
                   cfg: EvaluatorConfig = DEFAULT_CONFIG) -> EvalResult:
    """Lambda^T E_{a,n}(p, 1/2+it)."""
    if T < 1:
        raise DomainError("T must be at least 1")
    res = eval_levelq(q, a, p, n, t, cfg)
    g = iwasawa_compose(IwasawaCoordinates(p.x, p.y, p.theta))
    hr = height(g, q)
    if hr.height <= T:
        return res
    zc = zone_coordinates(g, hr)
    c = constant_term(q, a, hr.cusp, n, t, zc.y, zc.theta)
    return EvalResult(res.value - c, res.abs_error + 1e-15 * abs(c), res.terms_used)


# ---------------------------------------------------------------------------
# Maass-Selberg
# ---------------------------------------------------------------------------

def maass_selberg_closed_form(q, a: Cusp, n, t, T) -> float:
    """||Lambda^T E_{a,n}(., 1/2+it)||^2 in closed form.

    2 log T - sum_b (d/ds A_b) conj(A_b) + (conj(A) T^{2it} - A T^{-2it}) / (2it),
    with A_b = alpha phi_{a,b} and A = A_a.  At t = 0 the last term is
    replaced by its limit -Im A'(0) + 2 log T Re A(0) (t-derivative).
    """
    return maass_selberg_complex(q, a, n, t, T).real


def maass_selberg_complex(q, a: Cusp, n, t, T) -> complex:
    if T < 1:
        raise DomainError("T must be at least 1")
    q = require_squarefree(q)
    logT = math.log(T)
    mid = 0j
    for b in cusps_of_level(q):
        mid += weighted_entry_s_derivative(q, a, b, n, t) * weighted_entry(q, a, b, n, t).conjugate()
    A = weighted_entry(q, a, a, n, t)
    if t == 0:
        dA_dt = 1j * weighted_entry_s_derivative(q, a, a, n, t)
        third = -dA_dt.imag + 2.0 * logT * A.real
    else:
        third = (A.conjugate() * cmath.exp(2j * t * logT) - A * cmath.exp(-2j * t * logT)) / (2j * t)
    return 2.0 * logT - mid + third


def norm_bound_ratio(q, a: Cusp, n, t, T: float = E2PI) -> float:
    return maass_selberg_closed_form(q, a, n, t, T) / (1.0 + math.log(1 + abs(n) / 2) + math.log(1 + abs(t)))


@dataclass(frozen=True)
class QuadratureConfig:
    nx: int = 40
    ny: int = 40
    y_split: float = 2.0
    strip_panels: int = 28
    panel_width: float = 0.5
    panel_nodes: int = 12
    strip_x_points: int = 96
    tol: float = 1e-4


def _strip_constant_part(delta, A, t, y0, T):
    """int_{y0}^{T} |delta y^s + A y^{1-s}|^2 dy / y^2 on s = 1/2 + it."""
    L = math.log(T / y0)
    val = (delta + abs(A) ** 2) * L
    if delta:
        if t == 0:
            val += 2 * (A.conjugate() * L).real
        else:
            osc = (cmath.exp(2j * t * math.log(T)) - cmath.exp(2j * t * math.log(y0))) / (2j * t)
            val += 2 * (A.conjugate() * osc).real
    return val


def _compact_part(q, a, n, s, qc: QuadratureConfig, cfg, nx, ny):
    gx, wx = np.polynomial.legendre.leggauss(nx)
    gy, wy = np.polynomial.legendre.leggauss(ny)
    xs = 0.5 * gx
    wxs = 0.5 * wx
    ylo = np.sqrt(1.0 - xs ** 2)
    X = np.repeat(xs, ny)
    lo = np.repeat(ylo, ny)
    half = 0.5 * (qc.y_split - lo)
    Y = lo + half * (np.tile(gy, nx) + 1.0)
    W = np.repeat(wxs, ny) * np.tile(wy, nx) * half / Y ** 2
    total = 0.0
    for tau in level_coset_representatives(q):
        x1, y1, th1 = act(tau, X, Y, np.zeros_like(X))
        v, _ = eval_levelq_array(q, a, x1, y1, th1, n, s, cfg)
        total += float(np.sum(W * np.abs(v) ** 2))
    return total


def _strip_oscillating_part(q, a, b: Cusp, n, s, qc: QuadratureConfig, cfg, T, nodes):
    """int over y' >= y0_b of int_0^1 |E(sigma_b g') - c_b(y')|^2 dx dy / y^2."""
    t = s.imag
    y0 = qc.y_split / b.width
    gy, wy = np.polynomial.legendre.leggauss(nodes)
    xs = np.arange(qc.strip_x_points) / qc.strip_x_points
    sig = scaling_matrix(b)
    total = 0.0
    for k in range(qc.strip_panels):
        lo = y0 + k * qc.panel_width
        ys = lo + 0.5 * qc.panel_width * (gy + 1.0)
        wys = 0.5 * qc.panel_width * wy / ys ** 2
        X = np.tile(xs, nodes)
        Y = np.repeat(ys, xs.size)
        x1, y1, th1 = act(sig, X, Y, np.zeros_like(X))
        v, _ = eval_levelq_array(q, a, x1, y1, th1, n, s, cfg)
        c = np.array([constant_term(q, a, b, n, t, yy, 0.0) for yy in ys])
        r2 = np.abs(v - np.repeat(c, xs.size)) ** 2
        panel = float(np.sum(np.repeat(wys, xs.size) * r2) / xs.size)
        total += panel
        if panel < 1e-16 * max(total, 1e-300) and k > 2:
            break
    return total


def p_norm_quadrature(q, a: Cusp, n, t, T, qc: QuadratureConfig = QuadratureConfig(),
                      cfg: EvaluatorConfig = DEFAULT_CONFIG) -> NormEstimate:
    """Numerical ||Lambda^T E||^2 for q in {1, 2, 3}.

    The domain is the union over coset representatives tau of tau F, split at
    y = y_split.  Below the split, tensor Gauss-Legendre over each tau F.
    Above it, the pieces reassemble into one cusp strip per cusp b, handled in
    sigma_b coordinates: the constant term in closed form (cut off at T),
    the remainder by trapezoid in x and Gauss-Legendre panels in y.  The
    error estimate is the difference from a coarser rule.
    """
    q = require_squarefree(q)
    if q not in (1, 2, 3):
        raise DomainError("p_norm_quadrature supports q in {1, 2, 3}")
    if T < qc.y_split:
        raise DomainError("T must exceed the split height")
    s = complex(0.5, t)

    def run(nx, ny, nodes):
        val = _compact_part(q, a, n, s, qc, cfg, nx, ny)
        for b in cusps_of_level(q):
            A = alpha(n, s) * phi_entry(q, a, b, s)
            y0 = qc.y_split / b.width
            val += _strip_constant_part(1.0 if a == b else 0.0, A, t, y0, T)
            val += _strip_oscillating_part(q, a, b, n, s, qc, cfg, T, nodes)
        return val

    fine = run(qc.nx, qc.ny, qc.panel_nodes)
    coarse = run(qc.nx - 12, qc.ny - 12, qc.panel_nodes - 4)
    err = abs(fine - coarse)
    if err > qc.tol * max(abs(fine), 1.0):
        raise AccuracyError("P-norm quadrature did not converge", achieved=err)
    return NormEstimate(max(fine, 0.0) if fine > -err else fine, err, "quadrature")


def maass_selberg_estimate(q, a, n, t, T) -> NormEstimate:
    return NormEstimate(maass_selberg_closed_form(q, a, n, t, T), 1e-10, "closed_form")


# ---------------------------------------------------------------------------
# Constant-term integrals
# ---------------------------------------------------------------------------

def _A(q, a, n, t):
    return weighted_entry(q, a, a, n, t)


def constant_term_integral(V, q, a: Cusp, n, t) -> float:
    """I(V) = int_1^V |1 + y^{-2it} A|^2 dy/y with A = alpha phi_{a,a}."""
    if V < 1:
        raise DomainError("V must be at least 1")
    A = _A(q, a, n, t)
    return _integral_closed(V, A, t)


def _integral_closed(V, A, t):
    L = math.log(V)
    x = t * L
    # (1 - e^{-2ix}) / (it) = 2L e^{-ix} sinc(x), written to avoid cancellation as t -> 0
    sinc = math.sin(x) / x if abs(x) > 1e-8 else 1.0 - x * x / 6
    val = (1 + abs(A) ** 2) * L + 2 * L * sinc * (A * cmath.exp(-1j * x)).real
    return max(val, 0.0) if val > -1e-12 else val


def constant_term_sup(V, q, a: Cusp, n, t) -> float:
    """sup over y in [1, V] of |1 + y^{-2it} A|, from the range of the phase -2t log y."""
    if V < 1:
        raise DomainError("V must be at least 1")
    A = _A(q, a, n, t)
    return _sup_closed(V, A, t)


def _sup_closed(V, A, t):
    r = abs(A)
    if r == 0:
        return 1.0
    span = 2 * abs(t) * math.log(V)
    base = cmath.phase(A)
    if span >= 2 * math.pi:
        return 1.0 + r
    # phase of y^{-2it} A runs over [base - span, base] (t > 0) or [base, base + span] (t < 0)
    lo, hi = (base - span, base) if t >= 0 else (base, base + span)
    # nearest multiple of 2 pi inside the interval gives the maximum
    k = math.ceil(lo / (2 * math.pi))
    if 2 * math.pi * k <= hi:
        return 1.0 + r
    d = min(abs(lo - 2 * math.pi * round(lo / (2 * math.pi))),
            abs(hi - 2 * math.pi * round(hi / (2 * math.pi))))
    # |1 + r e^{id}|^2 = (1 - r)^2 + 4 r cos^2(d/2), free of cancellation near r e^{id} = -1
    return math.hypot(1 - r, 2 * math.sqrt(r) * math.cos(d / 2))


@dataclass(frozen=True)
class RatioCheck:
    ratio: float
    degenerate: bool


def constant_term_ratio_check(q, a: Cusp, n, t, T, Tprime) -> float:
    """I(T')/I(T).  A vanishing I(T) (t = 0, where alpha phi_{a,a} = -1) yields nan."""
    return constant_term_ratio(q, a, n, t, T, Tprime).ratio


def constant_term_ratio(q, a: Cusp, n, t, T, Tprime) -> RatioCheck:
    if not (1 <= T <= Tprime <= 2 * T):
        raise DomainError("need 1 <= T <= T' <= 2T")
    A = _A(q, a, n, t)
    den = _integral_closed(T, A, t)
    num = _integral_closed(Tprime, A, t)
    if den <= 1e-300:
        return RatioCheck(float("nan"), True)
    return RatioCheck(num / den, False)


def lower_bound_scale(q, n) -> float:
    """log^2(1+q) + log(1+|n/2|), the scale that separates the small-t regimes."""
    return math.log(1 + q) ** 2 + math.log(1 + abs(n) / 2)


REGIME_SMALL = "small_t"
REGIME_QUADRATIC = "quadratic"
REGIME_LARGE = "large_t"


@dataclass(frozen=True)
class LowerBoundReport:
    surrogate: float
    regime: str
    pass_: bool
    fitted_c: float
    phi_aa_abs: float


def classify_regime(q, n, t, small_const: float = 0.01) -> str:
    if abs(t) > 1:
        return REGIME_LARGE
    if abs(t) <= small_const / lower_bound_scale(q, n):
        return REGIME_SMALL
    return REGIME_QUADRATIC


def p_norm_lower_bound_check(q, a: Cusp, n, t, c: float = 0.05, T: float = E2PI,
                             small_const: float = 0.01) -> LowerBoundReport:
    """Surrogate I(T) + (1 - |phi_{a,a}|) and its regime.

    pass means surrogate >= c in the small-t and large-t regimes and
    surrogate >= c t^2 in the intermediate one.  The fitted constant is
    surrogate (or surrogate / t^2).
    """
    s = complex(0.5, t)
    phi_aa = abs(phi_entry(q, a, a, s))
    sur = constant_term_integral(T, q, a, n, t) + (1 - phi_aa)
    regime = classify_regime(q, n, t, small_const)
    fitted = sur / (t * t) if regime == REGIME_QUADRATIC else sur
    return LowerBoundReport(sur, regime, bool(fitted >= c), fitted, phi_aa)
