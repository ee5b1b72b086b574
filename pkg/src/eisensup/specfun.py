"""Complex special functions in double precision.

Everything here is a pure function of its arguments.  The only state is an
``lru_cache`` of Whittaker profiles (built once, then read-only), which is
safe for concurrent readers.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.integrate import solve_ivp

from .errors import AccuracyError, ConditioningError, DomainError, PoleError

EULER_GAMMA = 0.57721566490153286061
LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class PrecisionConfig:
    target_abs_tol: float = 1e-14
    target_rel_tol: float = 1e-13
    max_terms: int = 100_000

    def __post_init__(self):
        if not (self.target_abs_tol > 0 and self.target_rel_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.max_terms < 1:
            raise DomainError("max_terms must be >= 1")


DEFAULT_PRECISION = PrecisionConfig()


def _bernoulli_even(count):
    """Exact B_0, B_1, ..., B_{2*count} (Akiyama-Tanigawa)."""
    size = 2 * count + 1
    a = [Fraction(0)] * (size + 1)
    out = []
    for m in range(size + 1):
        a[m] = Fraction(1, m + 1)
        for j in range(m, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
        out.append(a[0])
    return out


_BERN = _bernoulli_even(20)
# B_{2j} as floats, j = 1..20
B2J = [float(_BERN[2 * j]) for j in range(1, 21)]


# ---------------------------------------------------------------------------
# Gamma family
# ---------------------------------------------------------------------------

_LANCZOS_G = 607.0 / 128.0
_LANCZOS_C = (
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
)


def _check_gamma_pole(s, name):
    if s.imag == 0.0 and s.real <= 0.0 and s.real == math.floor(s.real):
        raise PoleError(f"{name} has a pole at s = {s.real:g}", where=s)


def _lanczos_log_gamma(z):
    x = _LANCZOS_C[0]
    for k in range(1, len(_LANCZOS_C)):
        x += _LANCZOS_C[k] / (z + (k - 1))
    t = z + _LANCZOS_G - 0.5
    return 0.5 * LOG_2PI + (z - 0.5) * cmath.log(t) - t + cmath.log(x)


def log_gamma(s) -> complex:
    """Principal-branch log Gamma.

    For Re s >= 1/2 a 15-term Lanczos sum is used directly.  To the left the
    argument is shifted up with Gamma(s) = Gamma(s+N) / (s (s+1) ... (s+N-1));
    summing principal logs of the factors keeps the result on the continuous
    branch (the one with Im log_gamma -> 0 along the positive real axis).
    """
    s = complex(s)
    _check_gamma_pole(s, "log_gamma")
    if s.real >= 0.5:
        return _lanczos_log_gamma(s)
    shift = int(math.ceil(0.5 - s.real))
    acc = 0j
    for k in range(shift):
        acc += cmath.log(s + k)
    return _lanczos_log_gamma(s + shift) - acc


def gamma(s) -> complex:
    return cmath.exp(log_gamma(s))


def rgamma(s) -> complex:
    """1/Gamma(s), zero at the poles of Gamma."""
    s = complex(s)
    if s.imag == 0.0 and s.real <= 0.0 and s.real == math.floor(s.real):
        return 0j
    return cmath.exp(-log_gamma(s))


def digamma(s) -> complex:
    s = complex(s)
    _check_gamma_pole(s, "digamma")
    acc = 0j
    while s.real < 10.0:
        acc -= 1.0 / s
        s += 1.0
    inv2 = 1.0 / (s * s)
    series = 0j
    p = inv2
    for j in range(1, 9):
        series += B2J[j - 1] / (2 * j) * p
        p *= inv2
    return acc + cmath.log(s) - 0.5 / s - series


# ---------------------------------------------------------------------------
# Riemann zeta by Euler-Maclaurin
# ---------------------------------------------------------------------------

def _em_plan(s, tol, max_terms, stretch=4.0):
    # Tail terms shrink like |s + 2j|^2 / (2 pi N)^2; pick N so that 16 corrections suffice.
    p = 16
    n_terms = max(12, int(math.ceil((abs(s) + 2 * p + 2) / (2.0 * math.pi) * stretch)) + 2)
    if n_terms > max_terms:
        raise AccuracyError("Euler-Maclaurin needs more terms than max_terms",
                            suggestion=n_terms)
    return n_terms, p


def _zeta_em(s, want_derivative, cfg, stretch=4.0):
    n_terms, p = _em_plan(s, cfg.target_abs_tol, cfg.max_terms, stretch)
    k = np.arange(1, n_terms, dtype=float)
    logk = np.log(k)
    powers = np.exp(-s * logk)
    z = complex(powers.sum())
    dz = complex(-(logk * powers).sum()) if want_derivative else 0j

    big_n = float(n_terms)
    log_n = math.log(big_n)
    n_pow = cmath.exp(-s * log_n)          # N^{-s}
    z += big_n * n_pow / (s - 1.0) + 0.5 * n_pow
    if want_derivative:
        dz += (-log_n * big_n * n_pow / (s - 1.0)
               - big_n * n_pow / (s - 1.0) ** 2
               - 0.5 * log_n * n_pow)

    # sum_j B_{2j}/(2j)! * s(s+1)...(s+2j-2) * N^{-s-2j+1}
    poch, dpoch = s, 1.0 + 0j
    fact = 2.0
    npow = n_pow / big_n
    last = 0.0
    for j in range(1, p + 1):
        coef = B2J[j - 1] / fact
        term = coef * poch * npow
        z += term
        if want_derivative:
            dz += coef * npow * (dpoch - log_n * poch)
        last = abs(term)
        # advance poch to s(s+1)...(s+2j)
        for shift in (2 * j - 1, 2 * j):
            dpoch = dpoch * (s + shift) + poch
            poch = poch * (s + shift)
        fact *= (2 * j + 1) * (2 * j + 2)
        npow /= big_n * big_n
    sigma = s.real
    remainder = last * abs(s + 2 * p) * abs(s + 2 * p - 1) / (4.0 * math.pi ** 2 * big_n ** 2)
    remainder *= abs(s + 2 * p + 1) / max(sigma + 2 * p + 1, 1.0)
    return z, dz, remainder


def zeta(s, cfg: PrecisionConfig = DEFAULT_PRECISION) -> complex:
    """Riemann zeta on Re s > -1 (Euler-Maclaurin with explicit remainder)."""
    s = complex(s)
    if s == 1.0:
        raise PoleError("zeta has a pole at s = 1", where=s)
    if s.real <= -1.0:
        raise DomainError("zeta is only supported on Re s > -1")
    value, _, rem = _zeta_em(s, False, cfg)
    if rem > max(cfg.target_abs_tol, cfg.target_rel_tol * abs(value)):
        raise AccuracyError("Euler-Maclaurin remainder above tolerance", achieved=rem)
    return value


def zeta_with_derivative(s, cfg: PrecisionConfig = DEFAULT_PRECISION):
    """(zeta(s), zeta'(s)) from the term-by-term differentiated expansion."""
    s = complex(s)
    if s == 1.0:
        raise PoleError("zeta has a pole at s = 1", where=s)
    if s.real <= -1.0:
        raise DomainError("zeta is only supported on Re s > -1")
    value, deriv, _ = _zeta_em(s, True, cfg)
    return value, deriv


def zeta_log_deriv(s, cfg: PrecisionConfig = DEFAULT_PRECISION) -> complex:
    """zeta'(s)/zeta(s); refuses to divide by a numerically vanishing zeta."""
    value, deriv = zeta_with_derivative(s, cfg)
    scale = max(1.0, abs(deriv))
    if abs(value) < 1e-10 * scale:
        raise ConditioningError(f"zeta({complex(s)}) is numerically zero", magnitude=abs(value))
    return deriv / value


# ---------------------------------------------------------------------------
# K-Bessel by trapezoidal quadrature of the cosh integral
# ---------------------------------------------------------------------------

def bessel_k(nu, x, tol=1e-15) -> complex:
    """K_nu(x) = int_0^inf exp(-x cosh u) cosh(nu u) du for x > 0, complex nu.

    The integrand is entire and double-exponentially decaying, so the
    trapezoidal rule converges geometrically; the step is halved until two
    successive sums agree.
    """
    x = float(x)
    if not x > 0.0:
        raise DomainError("bessel_k requires x > 0")
    nu = complex(nu)
    a = abs(nu.real)
    # truncate where the integrand drops below tol relative to exp(-x)
    upper = 1.0
    while x * (math.cosh(upper) - 1.0) - a * upper < 40.0 + math.log(1.0 / tol) * 0.5:
        upper *= 1.25
    h = min(0.25, math.pi / (4.0 * (abs(nu.imag) + 1.0)))
    prev = None
    for _ in range(12):
        u = np.arange(0.0, upper + h, h)
        w = np.full(u.size, h)
        w[0] = 0.5 * h
        # exp(-x cosh u) scaled by exp(x) to keep the sum O(1) for large x
        vals = np.exp(-x * (np.cosh(u) - 1.0)) * np.cosh(nu * u)
        total = complex(np.dot(w, vals))
        scale = float(np.dot(w, np.abs(vals)))
        if prev is not None and abs(total - prev) <= max(tol * abs(total), 1e-15 * scale):
            break
        prev = total
        h *= 0.5
    else:
        raise AccuracyError("bessel_k quadrature did not converge", achieved=abs(total - prev))
    return total * math.exp(-x)


def bessel_k_imag_order(t: float, y: float) -> float:
    """K_{it}(y) for real t, y > 0 (real-valued)."""
    if not y > 0:
        raise DomainError("bessel_k_imag_order requires y > 0")
    return bessel_k(1j * float(t), y).real


# ---------------------------------------------------------------------------
# Whittaker W
# ---------------------------------------------------------------------------

def _asymptotic_coeffs(kappa, mu, z0, tol=1e-17):
    """Coefficients c_k of W ~ e^{-z/2} z^kappa sum_k c_k z^{-k}, or None if z0 is too small."""
    a = 0.5 + mu - kappa
    b = 0.5 - mu - kappa
    coeffs = [1.0 + 0j]
    c = 1.0 + 0j
    for k in range(400):
        c = c * (a + k) * (b + k) / ((k + 1) * -1.0)
        if c == 0:
            return coeffs
        term = abs(c) / z0 ** (k + 1)
        if term < tol:
            return coeffs
        if k > 2 and term > abs(coeffs[-1]) / z0 ** k:
            return None
        coeffs.append(c)
    return None


def _eval_series(coeffs, z):
    inv = 1.0 / z
    v = np.zeros_like(z, dtype=complex)
    dv = np.zeros_like(z, dtype=complex)
    for k in range(len(coeffs) - 1, -1, -1):
        v = v * inv + coeffs[k]
    for k in range(len(coeffs) - 1, 0, -1):
        dv = dv * inv + (-k) * coeffs[k]
    dv = dv * inv * inv
    return v, dv


class WhittakerProfile:
    """W_{kappa,mu}(z) on [z_lo, inf) for fixed (kappa, mu).

    Writing W = e^{-z/2} z^kappa v(z) turns the Whittaker equation into

        v'' + (2 kappa / z - 1) v' + ((kappa - 1/2)^2 - mu^2) v / z^2 = 0,

    with v -> 1 at infinity.  v is seeded from the asymptotic series at a
    point z0 where that series is accurate to double precision, then
    integrated inward.  W is the recessive solution at infinity, so inward
    integration is the stable direction.  A second pass at a looser
    tolerance provides the error estimate.
    """

    def __init__(self, kappa, mu, z_lo, rtol=1e-13):
        self.kappa = float(kappa)
        self.mu = complex(mu)
        self.z_lo = float(z_lo)
        z0 = max(40.0, 2.0 * self.z_lo)
        while True:
            coeffs = _asymptotic_coeffs(self.kappa, self.mu, z0)
            if coeffs is not None:
                break
            z0 *= 1.5
        self.z0 = z0
        self.coeffs = coeffs
        self.terminating = len(coeffs) < 400 and self._series_terminates()
        self._fine = self._integrate(rtol) if z0 > self.z_lo and not self.terminating else None
        self._coarse = self._integrate(rtol * 1e3) if self._fine is not None else None

    def _series_terminates(self):
        a = 0.5 + self.mu - self.kappa
        b = 0.5 - self.mu - self.kappa
        for p in (a, b):
            if abs(p.imag) == 0 and p.real <= 0 and p.real == math.floor(p.real):
                return True
        return False

    def _integrate(self, rtol):
        kappa = self.kappa
        c0 = (kappa - 0.5) ** 2 - self.mu ** 2
        v0, dv0 = _eval_series(self.coeffs, np.array([self.z0]))

        def rhs(z, y):
            return [y[1], (1.0 - 2.0 * kappa / z) * y[1] - c0 * y[0] / (z * z)]

        sol = solve_ivp(rhs, (self.z0, self.z_lo), [complex(v0[0]), complex(dv0[0])],
                        method="DOP853", rtol=rtol, atol=1e-300, dense_output=True)
        if not sol.success:
            raise AccuracyError(f"Whittaker integration failed: {sol.message}")
        return sol.sol

    def log_envelope(self, z):
        return -0.5 * z + self.kappa * np.log(z)

    def v(self, z):
        """v(z) and an absolute error estimate for it."""
        z = np.asarray(z, dtype=float)
        if np.any(z < self.z_lo * (1 - 1e-12)):
            raise DomainError("z below the profile's lower limit")
        out = np.empty(z.shape, dtype=complex)
        err = np.zeros(z.shape)
        far = (z >= self.z0) | (self._fine is None)
        if np.any(far):
            out[far] = _eval_series(self.coeffs, z[far])[0]
            err[far] = 1e-16 * np.abs(out[far])
        near = ~far
        if np.any(near):
            fine = self._fine(z[near])[0]
            coarse = self._coarse(z[near])[0]
            out[near] = fine
            err[near] = np.abs(fine - coarse) * 1e-2 + 1e-16 * np.abs(fine)
        return out, err

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        v, _ = self.v(z)
        return np.exp(self.log_envelope(z)) * v


def _profile_floor(z_min):
    # bucket the lower limit so nearby requests share a cached profile
    return 2.0 ** math.floor(math.log2(z_min))


@lru_cache(maxsize=512)
def whittaker_profile(kappa: float, mu: complex, z_lo: float) -> WhittakerProfile:
    return WhittakerProfile(kappa, mu, z_lo)


def _profile_for(kappa, mu, z):
    zmin = float(np.min(z))
    if not zmin > 0:
        raise DomainError("whittaker_w requires z > 0")
    return whittaker_profile(float(kappa), complex(mu), _profile_floor(zmin))


def whittaker_w(kappa, mu, z):
    """Whittaker W_{kappa,mu}(z) for z > 0 (scalar or array)."""
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=float))
    prof = _profile_for(kappa, mu, z)
    v, err = prof.v(z)
    if np.any(err > 1e-8 * np.maximum(np.abs(v), 1e-300) + 1e-12):
        bad = float(np.max(err / np.maximum(np.abs(v), 1e-300)))
        raise AccuracyError("Whittaker integration lost too many digits", achieved=bad)
    w = np.exp(prof.log_envelope(z)) * v
    return complex(w[0]) if scalar else w


def whittaker_w_over_gamma(kappa, mu, z, gamma_arg):
    """W_{kappa,mu}(z) / Gamma(gamma_arg) with the Gamma factor folded into the exponent.

    Returns (values, absolute_errors).  Keeps modes finite when W and Gamma
    are individually huge or tiny.
    """
    z = np.atleast_1d(np.asarray(z, dtype=float))
    prof = _profile_for(kappa, mu, z)
    v, err = prof.v(z)
    g = complex(gamma_arg)
    if g.imag == 0.0 and g.real <= 0 and g.real == math.floor(g.real):
        return np.zeros(z.shape, dtype=complex), np.zeros(z.shape)
    scale = np.exp(prof.log_envelope(z) - log_gamma(g))
    return scale * v, np.abs(scale) * err
