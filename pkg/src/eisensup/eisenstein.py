"""Weight-n Eisenstein series for SL2(Z) and Gamma_0(q), q squarefree.

Normalization.  For g with Iwasawa coordinates (x, y, theta), z = x + iy,

    E_n(g, s) = sum over coprime (c, d) modulo +-1 of
                e^{in theta} y^s ((cz+d)/|cz+d|)^n |cz+d|^{-2s},

which is left SL2(Z)-invariant and has constant term
y^s + psi(s) alpha(n, s) y^{1-s}.  The full lattice sum over (c, d) != 0
equals 2 zeta(2s) E_n.

On and near the critical line E_n is evaluated through its Fourier expansion

    E_n = e^{in theta} [ y^s + psi alpha y^{1-s}
          + sum_{m != 0} rho_m W_{kappa_m, s-1/2}(4 pi |m| y) e(m x) ],
    kappa_m = -sgn(m) n/2,
    rho_m = (-1)^{n/2} pi^s |m|^{s-1} sigma_{1-2s}(|m|) / (Gamma(s + kappa_m) zeta(2s)).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import specfun as sf
from .arith import divisors, euler_phi, gcd, moebius, primes_of, require_squarefree
from .errors import AccuracyError, DomainError
from .geometry import Cusp, GroupElement, canonical_theta, iwasawa_decompose, reduce_points
from .scattering import alpha, phi_entry, psi

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class EvaluationPoint:
    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        if not (self.y > 0 and math.isfinite(self.y)):
            raise DomainError(f"y must be positive, got {self.y!r}")
        object.__setattr__(self, "theta", canonical_theta(float(self.theta)))

    @classmethod
    def from_group(cls, g: GroupElement) -> "EvaluationPoint":
        c = iwasawa_decompose(g)
        return cls(c.x, c.y, c.theta)

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class EvalResult:
    value: complex
    abs_error: float
    terms_used: int

    def __post_init__(self):
        if not (self.abs_error >= 0 and math.isfinite(self.abs_error)):
            raise DomainError("abs_error must be finite and non-negative")


@dataclass(frozen=True)
class EvaluatorConfig:
    """fourier_modes: None selects the default M.  lattice_cutoff caps the number
    of lattice rows used by the convergent-region oracles."""

    fourier_modes: Optional[int] = None
    lattice_cutoff: float = 4000.0
    tol: float = 1e-10
    margin: float = 0.05
    reduce: bool = True

    def __post_init__(self):
        if self.fourier_modes is not None and self.fourier_modes < 1:
            raise DomainError("fourier_modes must be >= 1")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if not self.lattice_cutoff >= 1:
            raise DomainError("lattice_cutoff must be >= 1")


DEFAULT_CONFIG = EvaluatorConfig()


def _even(n):
    if int(n) != n or int(n) % 2:
        raise DomainError(f"weight n = {n} must be even")
    return int(n)


def _cpow(base, s):
    """base^s for real base > 0 (array or scalar)."""
    return np.exp(s * np.log(base))


# ---------------------------------------------------------------------------
# Lattice rows: sum_j g(r + k j), g(u) = (u + iY)^a (u - iY)^b
# ---------------------------------------------------------------------------

_EM_ORDER = 8
_BINOM_TERMS = 64


def _binom_series(a, count):
    out = [1.0 + 0j]
    for l in range(1, count):
        out.append(out[-1] * (a - l + 1) / l)
    return out


def _tail_integral_coeffs(a, b):
    """e_K with (1 + iY/u)^a (1 - iY/u)^b = sum_K e_K (Y/u)^K."""
    ba = _binom_series(a, _BINOM_TERMS)
    bb = _binom_series(b, _BINOM_TERMS)
    e = np.zeros(_BINOM_TERMS, dtype=complex)
    for K in range(_BINOM_TERMS):
        acc = 0j
        for l in range(K + 1):
            acc += ba[l] * (1j) ** l * bb[K - l] * (-1j) ** (K - l)
        e[K] = acc
    return e


def _falling(a, m):
    out = 1.0 + 0j
    for i in range(m):
        out *= a - i
    return out


def _g_derivative(u, Y, a, b, m):
    """m-th derivative of (u+iY)^a (u-iY)^b."""
    lp = np.log(u + 1j * Y)
    lm = np.log(u - 1j * Y)
    acc = np.zeros(np.shape(u), dtype=complex)
    for l in range(m + 1):
        coef = math.comb(m, l) * _falling(a, l) * _falling(b, m - l)
        if coef == 0:
            continue
        acc += coef * np.exp((a - l) * lp + (b - m + l) * lm)
    return acc


def _em_tail(u0, k, Y, a, b, ecoef):
    """sum_{j >= 0} g(u0 + k j) for u0 >= max(2Y, k*(|a|+|b|+2p+10)); returns (value, error)."""
    # integral term via the binomial expansion in Y/u (converges since Y/u0 <= 1/2)
    ratio = Y / u0
    lu = np.log(u0)
    integral = np.zeros(np.shape(u0), dtype=complex)
    rk = np.ones(np.shape(u0))
    for K in range(_BINOM_TERMS):
        integral += ecoef[K] * rk * np.exp((a + b + 1) * lu) / (K - a - b - 1)
        rk = rk * ratio
    trunc = np.abs(ecoef[-1]) * rk * np.exp((a + b + 1).real * lu) * 2
    val = integral / k + 0.5 * np.exp(a * np.log(u0 + 1j * Y) + b * np.log(u0 - 1j * Y))
    fact = 2.0
    last = np.zeros(np.shape(u0))
    for m in range(1, _EM_ORDER + 1):
        der = _g_derivative(u0, Y, a, b, 2 * m - 1) * k ** (2 * m - 1)
        term = sf.B2J[m - 1] / fact * der
        val -= term
        last = np.abs(term)
        fact *= (2 * m + 1) * (2 * m + 2)
    return val, last + trunc / k


def _row_sums(r, k, Y, a, b):
    """sum_{j in Z} g(r + k j) for arrays r, k (positive), Y (positive)."""
    r = np.asarray(r, dtype=float)
    k = np.asarray(k, dtype=float)
    Y = np.asarray(Y, dtype=float)
    ecoef_ab = _tail_integral_coeffs(a, b)
    ecoef_ba = _tail_integral_coeffs(b, a)
    U = np.maximum(2.0 * Y, k * (abs(a) + abs(b) + 2 * _EM_ORDER + 10))
    j_hi = np.floor((U - r) / k)
    j_lo = np.ceil((-U - r) / k)
    counts = (j_hi - j_lo + 1).astype(np.int64)
    rows = np.repeat(np.arange(r.size), counts)
    offsets = np.arange(rows.size) - np.repeat(np.cumsum(counts) - counts, counts)
    j = np.repeat(j_lo, counts) + offsets
    u = np.repeat(r, counts) + np.repeat(k, counts) * j
    yy = np.repeat(Y, counts)
    vals = np.exp(a * np.log(u + 1j * yy) + b * np.log(u - 1j * yy))
    direct = (np.bincount(rows, vals.real, minlength=r.size)
              + 1j * np.bincount(rows, vals.imag, minlength=r.size))
    l1 = np.bincount(rows, np.abs(vals), minlength=r.size)
    right, err_r = _em_tail(r + k * (j_hi + 1), k, Y, a, b, ecoef_ab)
    # g(-u) equals g(u) with a and b exchanged (n even)
    left, err_l = _em_tail(-r - k * (j_lo - 1), k, Y, b, a, ecoef_ba)
    total = direct + right + left
    err = err_r + err_l + 1e-15 * (l1 + np.abs(right) + np.abs(left))
    return total, err, int(counts.sum())


def _row_integral_constant(n, s):
    """J_n(s) = int_R (u+i)^{n/2-s} (u-i)^{-n/2-s} du."""
    n = _even(n)
    return ((-1) ** (n // 2) * math.pi * cmath.exp(sf.log_gamma(2 * s - 1) - (2 * s - 2) * math.log(2.0))
            * sf.rgamma(s + n / 2) * sf.rgamma(s - n / 2))


def _check_convergent(s, cfg):
    if not complex(s).real > 1.0 + cfg.margin:
        raise DomainError(f"Re s = {complex(s).real} is outside the region of absolute convergence "
                          f"(need Re s > {1 + cfg.margin})")


def lattice_sum_oracle(p: EvaluationPoint, n: int, s, cfg: EvaluatorConfig = DEFAULT_CONFIG) -> EvalResult:
    """Full lattice sum over (c, d) != 0 in the region of absolute convergence.

    Rows c = 1..C0 are summed exactly (direct window plus Euler-Maclaurin
    tails with explicit derivative terms).  Rows beyond C0 contribute their
    x-independent part in closed form; the rest decays like e^{-2 pi c y}
    and is bounded explicitly.
    """
    n = _even(n)
    s = complex(s)
    _check_convergent(s, cfg)
    x, y = p.x, p.y
    a, b = n / 2 - s, -n / 2 - s
    sigma = s.real
    c0 = int(math.ceil((45.0 + 2 * (abs(s) + abs(n) / 2)) / (TWO_PI * y))) + 1
    c0 = min(c0, int(cfg.lattice_cutoff))
    cs = np.arange(1, c0 + 1, dtype=float)
    rows, errs, terms = _row_sums(cs * x, np.ones_like(cs), cs * y, a, b)
    zeta2s = sf.zeta(2 * s)
    total = 2.0 * zeta2s + 2.0 * complex(rows.sum())
    err = 2.0 * float(errs.sum())
    jn = _row_integral_constant(n, s)
    partial = complex(np.sum(_cpow(cs, 1 - 2 * s)))
    hurwitz = sf.zeta(2 * s - 1) - partial
    total += 2.0 * jn * y ** (1 - 2 * s) * hurwitz
    # non-constant part of rows c > C0
    cy = c0 * y
    dev = 8.0 * abs(jn) * cy ** (1 - 2 * sigma) * (1 + TWO_PI * cy) ** (abs(s) + abs(n) / 2 + 1) \
        * math.exp(-TWO_PI * cy) / (1 - math.exp(-TWO_PI * y))
    err += dev + 1e-15 * abs(hurwitz) * abs(jn)
    pref = cmath.exp(1j * n * p.theta) * y ** s
    return EvalResult(pref * total, abs(pref) * err, terms + c0)


def _coset_dirichlet(u, cusp: Cusp):
    """sum over C >= 1 with v | C, gcd(C, w) = 1 of phi(C) C^{-u}."""
    val = sf.zeta(u - 1) / sf.zeta(u)
    for p in primes_of(cusp.level):
        fp = (1 - p ** (-u)) / (1 - p ** (1 - u))
        if cusp.divisor % p == 0:
            val *= (fp - 1) / fp
        else:
            val /= fp
    return val


def coset_sum_oracle(cusp: Cusp, p: EvaluationPoint, n: int, s,
                     cfg: EvaluatorConfig = DEFAULT_CONFIG, rows: Optional[int] = None) -> EvalResult:
    """Direct coset sum for E_{a,n}(g, s) at the cusp a of Gamma_0(q), Re s > 1.

    Terms are indexed by primitive (C, D) modulo +-1 with v | C and
    gcd(C, w) = 1; each contributes (y / (w |Cz+D|^2))^s e^{in(theta + arg(Cz+D))}.
    Coprimality in D is imposed by Moebius inversion over k | C.  Rows with
    C > C0 contribute their x-average in closed form; the oscillating remainder
    is estimated from the envelope of the last computed rows.
    """
    n = _even(n)
    s = complex(s)
    _check_convergent(s, cfg)
    v, w = cusp.divisor, cusp.width
    x, y = p.x, p.y
    a, b = n / 2 - s, -n / 2 - s
    sigma = s.real
    c0 = int(rows) if rows is not None else int(min(cfg.lattice_cutoff, 400))
    cs = [C for C in range(v, c0 + 1, v) if gcd(C, w) == 1]
    if not cs:
        raise DomainError("lattice_cutoff too small for this cusp")
    rr, kk, yy, owner, sign = [], [], [], [], []
    for i, C in enumerate(cs):
        for k in divisors(C):
            mu = moebius(k)
            if mu:
                rr.append(C * x)
                kk.append(k)
                yy.append(C * y)
                owner.append(i)
                sign.append(mu)
    vals, errs, terms = _row_sums(np.array(rr), np.array(kk, dtype=float), np.array(yy), a, b)
    owner = np.array(owner)
    sign = np.array(sign, dtype=float)
    row_tot = (np.bincount(owner, (sign * vals).real, minlength=len(cs))
               + 1j * np.bincount(owner, (sign * vals).imag, minlength=len(cs)))
    row_err = np.bincount(owner, errs, minlength=len(cs))
    jn = _row_integral_constant(n, s)
    csa = np.array(cs, dtype=float)
    phis = np.array([euler_phi(C) for C in cs], dtype=float)
    row_const = phis / csa * _cpow(csa * y, 1 - 2 * s) * jn
    total = complex(row_tot.sum()) + (1.0 if cusp.is_infinity else 0.0)
    # closed-form x-average of the remaining rows
    partial = complex(np.sum(phis * _cpow(csa, -2 * s)))
    tail_const = jn * y ** (1 - 2 * s) * (_coset_dirichlet(2 * s, cusp) - partial)
    total += tail_const
    # oscillating remainder: envelope |dev_C| <~ A C^{-2 sigma}, summed beyond C0
    dev = np.abs(row_tot - row_const)
    upper = csa > c0 / 2
    env = float(np.max(dev[upper] * csa[upper] ** (2 * sigma))) if upper.any() else 0.0
    tail_dev = 3.0 * env * c0 ** (1 - 2 * sigma) / (2 * sigma - 1) * v
    err = float(row_err.sum()) + tail_dev + 1e-15 * abs(tail_const)
    pref = cmath.exp(1j * n * p.theta) * (y / w) ** s
    return EvalResult(pref * total, abs(pref) * err, terms)


def coprime_sum_oracle(p: EvaluationPoint, n: int, s, cfg: EvaluatorConfig = DEFAULT_CONFIG,
                       method: str = "rows", rows: Optional[int] = None) -> EvalResult:
    """E_n as the coprime sum modulo +-1 (the (0,1) term gives y^s).

    method="rows" sums primitive rows directly; method="lattice" divides the
    full lattice sum by 2 zeta(2s).
    """
    s = complex(s)
    if method == "lattice":
        _check_convergent(s, cfg)
        full = lattice_sum_oracle(p, n, s, cfg)
        z2 = 2.0 * sf.zeta(2 * s)
        return EvalResult(full.value / z2, full.abs_error / abs(z2) + 1e-15 * abs(full.value / z2),
                          full.terms_used)
    if method != "rows":
        raise DomainError(f"unknown method {method!r}")
    from .geometry import cusp_at_infinity
    return coset_sum_oracle(cusp_at_infinity(1), p, n, s, cfg, rows=rows)


# ---------------------------------------------------------------------------
# Fourier-Whittaker evaluator
# ---------------------------------------------------------------------------

def default_mode_count(t: float, n: int, y_min: float) -> int:
    return 15 + int(math.ceil(3.0 * (abs(t) + abs(n)) / (TWO_PI * y_min)))


def _reciprocal_zeta_2s(s):
    if s == 0.5:
        return 0j
    return 1.0 / sf.zeta(2 * s)


def constant_term_level1(n, s, y):
    s = complex(s)
    return _cpow(y, s) + psi(s) * alpha(n, s) * _cpow(y, 1 - s)


@dataclass
class ModeTable:
    """Mode coefficients rho_m W(4 pi |m| y) for a batch of points (shape (P, M) per sign)."""

    plus: np.ndarray
    minus: np.ndarray
    err: np.ndarray


def _mode_table(n, s, y, M):
    s = complex(s)
    mu = s - 0.5
    ms = np.arange(1, M + 1, dtype=float)
    rz = _reciprocal_zeta_2s(s)
    sig = np.array([sum(complex(d) ** (1 - 2 * s) for d in divisors(m)) for m in range(1, M + 1)])
    base = (-1) ** (abs(n) // 2) * cmath.exp(s * math.log(math.pi)) * _cpow(ms, s - 1) * sig * rz
    z = 4.0 * math.pi * np.outer(y, ms)
    tables = {}
    errs = np.zeros(z.shape)
    for sign in (1, -1):
        kappa = -sign * n / 2
        if kappa in tables:
            w_vals, w_err = tables[kappa]
        else:
            if rz == 0:
                w_vals = np.zeros(z.size, dtype=complex)
                w_err = np.zeros(z.size)
            else:
                w_vals, w_err = sf.whittaker_w_over_gamma(kappa, mu, z.ravel(), s + kappa)
            tables[kappa] = (w_vals, w_err)
        vals = w_vals.reshape(z.shape) * base
        errs = errs + w_err.reshape(z.shape) * np.abs(base)
        if sign == 1:
            plus = vals
        else:
            minus = vals
    return ModeTable(plus, minus, errs)


def eval_level1_array(x, y, theta, n: int, s, cfg: EvaluatorConfig = DEFAULT_CONFIG):
    """Vectorized level-one evaluator.  Returns (values, abs_errors, modes_used)."""
    n = _even(n)
    s = complex(s)
    if abs(s.real - 0.5) > 1.5:
        raise DomainError("eval_level1 needs |Re s - 1/2| <= 1.5")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    x, y, theta = np.broadcast_arrays(x, y, theta)
    if np.any(y <= 0):
        raise DomainError("y must be positive")
    if cfg.reduce:
        x, y, theta = reduce_points(x, y, theta)
    y_min = float(np.min(y))
    M = cfg.fourier_modes or default_mode_count(s.imag, n, y_min)
    const = constant_term_level1(n, s, y)
    tab = _mode_table(n, s, y, M)
    ms = np.arange(1, M + 1)
    ex = np.exp(2j * math.pi * np.outer(x, ms))
    modes = np.sum(tab.plus * ex, axis=1) + np.sum(tab.minus * np.conj(ex), axis=1)
    vals = (const + modes) * np.exp(1j * n * theta)
    scale = np.abs(const) + np.sum(np.abs(tab.plus) + np.abs(tab.minus), axis=1)
    # geometric envelope beyond the last mode
    last = np.abs(tab.plus[:, -1]) + np.abs(tab.minus[:, -1])
    r = np.exp(-TWO_PI * y) * ((M + 1) / M) ** (abs(n) / 2 + abs(s) + 2)
    if np.any(r >= 0.9):
        raise AccuracyError("mode tail does not decay; raise fourier_modes", suggestion=2 * M)
    tail = 4.0 * last * r / (1 - r) * (1 + math.log(M + 1))
    err = tail + np.sum(tab.err, axis=1) + 1e-15 * scale * (M + 1)
    budget = cfg.tol * np.maximum(scale, 1e-300)
    if np.any(tail > budget):
        ratio = float(np.max(tail / budget))
        need = M + int(math.ceil(math.log(ratio) / (TWO_PI * y_min))) + 2
        raise AccuracyError(f"{M} Fourier modes leave a tail of {float(np.max(tail)):.3g}",
                            achieved=float(np.max(tail)), suggestion=need)
    return vals, err, M


def eval_level1(p: EvaluationPoint, n: int, s, cfg: EvaluatorConfig = DEFAULT_CONFIG) -> EvalResult:
    vals, err, M = eval_level1_array(p.x, p.y, p.theta, n, s, cfg)
    return EvalResult(complex(vals[0]), float(err[0]), 2 * M + 1)


def completed_level1(p: EvaluationPoint, n: int, s, cfg: EvaluatorConfig = DEFAULT_CONFIG) -> EvalResult:
    """pi^{-s} Gamma(s + |n|/2) zeta(2s) E_n(p, s), invariant under s -> 1 - s."""
    n = _even(n)
    s = complex(s)
    r = eval_level1(p, n, s, cfg)
    f = cmath.exp(-s * math.log(math.pi) + sf.log_gamma(s + abs(n) / 2)) * sf.zeta(2 * s)
    return EvalResult(f * r.value, abs(f) * r.abs_error, r.terms_used)


def level_reduction_terms(q: int, cusp: Cusp, s):
    """[(scale, coefficient)] with E_a(g) = sum coef * E_n(a(scale) g) and the global prefactor folded in."""
    s = complex(s)
    v, w = cusp.divisor, cusp.width
    pref = moebius(v) * cmath.exp(-s * math.log(q * v))
    for p in primes_of(q):
        pref /= 1.0 - cmath.exp(-2 * s * math.log(p))
    out = []
    for beta in divisors(v):
        for gam in divisors(w):
            mu = moebius(beta * gam)
            if mu == 0:
                continue
            coef = pref * mu * cmath.exp(s * math.log(beta) - s * math.log(gam))
            out.append((beta * gam, coef))
    return out


def eval_levelq_array(q, cusp: Cusp, x, y, theta, n, s, cfg: EvaluatorConfig = DEFAULT_CONFIG,
                      level1: Optional[Callable] = None):
    """E_{a,n} at level q from level-one values at scaled arguments.

    level1(x, y, theta) -> (values, errors); defaults to the Fourier evaluator.
    """
    q = require_squarefree(q)
    if cusp.level != q:
        raise DomainError("cusp belongs to a different level")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    x, y, theta = np.broadcast_arrays(x, y, theta)
    if level1 is None:
        def level1(xx, yy, tt):
            v_, e_, _ = eval_level1_array(xx, yy, tt, n, s, cfg)
            return v_, e_
    total = np.zeros(x.shape, dtype=complex)
    err = np.zeros(x.shape)
    for scale, coef in level_reduction_terms(q, cusp, s):
        v_, e_ = level1(scale * x, scale * y, theta)
        total += coef * v_
        err += abs(coef) * e_
    return total, err


def eval_levelq(q, a: Cusp, p: EvaluationPoint, n, t, cfg: EvaluatorConfig = DEFAULT_CONFIG) -> EvalResult:
    s = complex(0.5, t)
    vals, err = eval_levelq_array(q, a, p.x, p.y, p.theta, n, s, cfg)
    terms = len(level_reduction_terms(q, a, s))
    return EvalResult(complex(vals[0]), float(err[0]), terms)


def constant_term(q, a: Cusp, b: Cusp, n, t, y, theta) -> complex:
    if not y > 0:
        raise DomainError("y must be positive")
    s = complex(0.5, t)
    delta = 1.0 if a == b else 0.0
    c = delta * _cpow(y, s) + phi_entry(q, a, b, s) * alpha(n, s) * _cpow(y, 1 - s)
    return complex(cmath.exp(1j * n * theta) * c)


def fourier_coefficient_numeric(f: Callable, m: int, y: float, theta: float, quad_points: int) -> complex:
    """Trapezoid rule for int_0^1 f(x, y, theta) e(-m x) dx; f is vectorized in x."""
    if quad_points < 8 * (abs(m) + 1):
        raise DomainError("quad_points must be at least 8(|m|+1)")
    xs = np.arange(quad_points) / quad_points
    vals = np.asarray(f(xs, y, theta), dtype=complex)
    return complex(np.mean(vals * np.exp(-2j * math.pi * m * xs)))


# ---------------------------------------------------------------------------
# Lattice diagnostics
# ---------------------------------------------------------------------------

def lattice_points(p: EvaluationPoint, X: float):
    """(c, d, |cz+d|^2) for all (c, d) != 0 with |cz+d|^2 <= X."""
    if X < 0:
        raise DomainError("X must be non-negative")
    x, y = p.x, p.y
    cmax = int(math.floor(math.sqrt(X) / y))
    cs_out, ds_out, nn_out = [], [], []
    for c in range(-cmax, cmax + 1):
        rem = X - (c * y) ** 2
        if rem < 0:
            continue
        half = math.sqrt(rem)
        ds = np.arange(math.floor(-c * x - half) - 1, math.ceil(-c * x + half) + 2)
        norm = (c * x + ds) ** 2 + (c * y) ** 2
        keep = norm <= X
        if c == 0:
            keep &= ds != 0
        cs_out.append(np.full(int(keep.sum()), c))
        ds_out.append(ds[keep])
        nn_out.append(norm[keep])
    if not cs_out:
        return np.zeros(0, int), np.zeros(0, int), np.zeros(0)
    return np.concatenate(cs_out), np.concatenate(ds_out), np.concatenate(nn_out)


def count_lattice_points(p: EvaluationPoint, X: float) -> int:
    return int(lattice_points(p, X)[0].size)


def count_lattice_points_naive(p: EvaluationPoint, X: float) -> int:
    """Double loop over a bounding box; an independent check on lattice_points."""
    if X < 0:
        raise DomainError("X must be non-negative")
    r = math.sqrt(X)
    cmax = int(r / p.y) + 1
    dmax = int(r + cmax * abs(p.x)) + 1
    count = 0
    for c in range(-cmax, cmax + 1):
        for d in range(-dmax, dmax + 1):
            if (c or d) and (c * p.x + d) ** 2 + (c * p.y) ** 2 <= X:
                count += 1
    return count


def afe_majorant(p: EvaluationPoint, n, t, eps: float) -> float:
    if not eps > 0:
        raise DomainError("eps must be positive")
    X = (1.0 + abs(t) + abs(n)) ** (1.0 + eps)
    _, _, norms = lattice_points(p, X)
    return 1.0 + math.sqrt(p.y) * float(np.sum(norms ** -0.5))


def raising_operator_numeric(f: Callable, p: EvaluationPoint, h: float) -> complex:
    """R f = e^{2i theta} (i y f_x + y f_y + f_theta / (2i)) by central differences."""
    if not h > 0:
        raise DomainError("h must be positive")
    x, y, th = p.x, p.y, p.theta
    fx = (f(x + h, y, th) - f(x - h, y, th)) / (2 * h)
    fy = (f(x, y + h, th) - f(x, y - h, th)) / (2 * h)
    ft = (f(x, y, th + h) - f(x, y, th - h)) / (2 * h)
    return complex(cmath.exp(2j * th) * (1j * y * fx + y * fy + ft / 2j))
