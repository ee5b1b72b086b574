"""Scattering matrix of Gamma_0(q), squarefree q, and the weight factor alpha(n, s).

Cusps are indexed by divisors v of q in increasing order.  The entry
phi_{a,b}(s) is psi(s) times, for each prime p | q, the (bit_p(a), bit_p(b))
entry of N_p(s), where bit_p(v) records whether p divides v.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import specfun as sf
from .arith import primes_of, require_squarefree
from .errors import DomainError, PoleError
from .geometry import Cusp, cusps_of_level

LOG_PI = math.log(math.pi)
# d/ds log psi(s) at s = 1/2
PSI_LOG_DERIV_AT_HALF = 2.0 * math.log(4.0 * math.pi) - 2.0 * sf.EULER_GAMMA
_NEAR_HALF = 1e-4


class ConditioningWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class SpectralParameter:
    t: float
    n: int
    q: int = 1

    def __post_init__(self):
        if int(self.n) != self.n or self.n % 2:
            raise DomainError(f"weight n = {self.n} must be an even integer")
        require_squarefree(self.q)

    @property
    def s(self) -> complex:
        return complex(0.5, self.t)

    @property
    def lam(self) -> float:
        return 0.25 + self.t * self.t


# ---------------------------------------------------------------------------
# psi
# ---------------------------------------------------------------------------

def psi_factor(t: float) -> complex:
    """psi(1/2 + it) = pi^{1/2} Gamma(it) zeta(2it) / (Gamma(1/2+it) zeta(1+2it))."""
    t = float(t)
    if t == 0.0:
        raise PoleError("psi_factor has removable singularity at t = 0; use psi_factor_limit_at_half",
                        where=0.0)
    if abs(t) < 1e-8:
        warnings.warn("psi_factor evaluated with |t| < 1e-8; cancellation is severe",
                      ConditioningWarning, stacklevel=2)
    it = complex(0.0, t)
    logs = 0.5 * LOG_PI + sf.log_gamma(it) - sf.log_gamma(0.5 + it)
    return cmath.exp(logs) * sf.zeta(2 * it) / sf.zeta(1 + 2 * it)


def psi_factor_limit_at_half() -> complex:
    """t -> 0 limit of psi(1/2+it) from the leading Laurent coefficients.

    Gamma(it) ~ 1/(it), zeta(2it) -> -1/2, Gamma(1/2) = sqrt(pi),
    zeta(1+2it) ~ 1/(2it).
    """
    gamma_res = 1.0           # residue of Gamma at 0
    zeta_at_0 = -0.5
    zeta_res = 0.5            # zeta(1 + 2 eps) ~ (1/2) / eps
    sqrt_pi = math.sqrt(math.pi)
    return complex(sqrt_pi * gamma_res * zeta_at_0 / (sqrt_pi * zeta_res))


def psi(s) -> complex:
    """Completed form sqrt(pi) Gamma(s-1/2) zeta(2s-1) / (Gamma(s) zeta(2s)) for general s."""
    s = complex(s)
    eps = s - 0.5
    if abs(eps) < _NEAR_HALF:
        # log psi(1/2 + eps) - i pi is odd in eps
        return -cmath.exp(PSI_LOG_DERIV_AT_HALF * eps)
    if s.real < 0.5:
        return 1.0 / psi(1.0 - s)
    if s == 1.0:
        raise PoleError("psi has a pole at s = 1", where=s)
    logs = 0.5 * LOG_PI + sf.log_gamma(s - 0.5) - sf.log_gamma(s)
    return cmath.exp(logs) * sf.zeta(2 * s - 1) / sf.zeta(2 * s)


def psi_log_derivative(s) -> complex:
    """d/ds log psi(s)."""
    s = complex(s)
    eps = s - 0.5
    if abs(eps) < 1e-3:
        # even in eps: interpolate quadratically between the value at 1/2 and a safe offset
        if eps == 0:
            return complex(PSI_LOG_DERIV_AT_HALF)
        e0 = 1e-3 * eps / abs(eps)
        f0 = _psi_log_derivative_direct(0.5 + e0)
        return PSI_LOG_DERIV_AT_HALF + (f0 - PSI_LOG_DERIV_AT_HALF) * (eps / e0) ** 2
    if s.real < 0.5:
        # psi(s) psi(1-s) = 1
        return psi_log_derivative(1.0 - s)
    return _psi_log_derivative_direct(s)


def _psi_log_derivative_direct(s):
    return (sf.digamma(s - 0.5) + 2.0 * sf.zeta_log_deriv(2 * s - 1)
            - sf.digamma(s) - 2.0 * sf.zeta_log_deriv(2 * s))


def psi_t_derivative(t: float) -> complex:
    s = complex(0.5, t)
    return 1j * psi_log_derivative(s) * psi(s)


# ---------------------------------------------------------------------------
# alpha
# ---------------------------------------------------------------------------

def _check_even(n):
    if int(n) != n or int(n) % 2:
        raise DomainError(f"weight n = {n} must be an even integer")
    return int(n)


def alpha(n: int, s) -> complex:
    """prod_{k=0}^{|n|/2-1} (1-s+k)/(s+k)."""
    n = _check_even(n)
    s = complex(s)
    out = 1.0 + 0j
    for k in range(abs(n) // 2):
        den = s + k
        if den == 0:
            raise DomainError(f"alpha({n}, {s}) has a pole (s + {k} = 0)")
        out *= (1.0 - s + k) / den
    return out


def alpha_s_derivative(n: int, s) -> complex:
    n = _check_even(n)
    s = complex(s)
    acc = 0j
    for k in range(abs(n) // 2):
        acc += (1 + 2 * k) / ((1.0 - s + k) * (s + k))
    return -alpha(n, s) * acc


def alpha_t_derivative(n: int, t: float) -> complex:
    """d/dt alpha(n, 1/2+it) = i d/ds alpha."""
    return 1j * alpha_s_derivative(n, complex(0.5, t))


# ---------------------------------------------------------------------------
# Local factors and the matrix
# ---------------------------------------------------------------------------

def _pow(p, s):
    return cmath.exp(s * math.log(p))


def local_factor(p: int, s) -> np.ndarray:
    s = complex(s)
    den = _pow(p, 2 * s) - 1.0
    if abs(den) < 1e-300 or abs(den) <= 1e-15 * abs(_pow(p, 2 * s)):
        raise PoleError(f"p^(2s) = 1 at p = {p}, s = {s}", where=s)
    off = _pow(p, s) - _pow(p, 1 - s)
    return np.array([[p - 1, off], [off, p - 1]], dtype=complex) / den


def _bit(p, v):
    return 1 if v % p == 0 else 0


@dataclass(frozen=True)
class ScatteringMatrix:
    level: int
    s: complex
    entries: np.ndarray
    cusps: tuple

    def unitarity_defect(self) -> float:
        m = self.entries
        return float(np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))))

    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.T)))

    def index(self, cusp: Cusp) -> int:
        return self.cusps.index(cusp)


def scattering_matrix(q: int, s, psi_value=None) -> ScatteringMatrix:
    """psi(s) times the Kronecker product of N_p(s) over primes p | q, permuted to divisor order."""
    q = require_squarefree(q)
    s = complex(s)
    ps = primes_of(q)
    m = np.ones((1, 1), dtype=complex)
    for p in ps:
        m = np.kron(m, local_factor(p, s))
    cusps = tuple(cusps_of_level(q))
    r = len(ps)
    # Kronecker index: first prime is the most significant bit
    idx = [sum(_bit(p, c.divisor) << (r - 1 - j) for j, p in enumerate(ps)) for c in cusps]
    m = m[np.ix_(idx, idx)]
    pv = psi(s) if psi_value is None else psi_value
    return ScatteringMatrix(q, s, pv * m, cusps)


def _entry_rational(q, a, b, s):
    num = 1.0 + 0j
    den = 1.0 + 0j
    for p in primes_of(q):
        if _bit(p, a.divisor) == _bit(p, b.divisor):
            num *= p - 1
        else:
            num *= _pow(p, s) - _pow(p, 1 - s)
        d = _pow(p, 2 * s) - 1.0
        if abs(d) <= 1e-15 * abs(_pow(p, 2 * s)):
            raise PoleError(f"p^(2s) = 1 at p = {p}", where=s)
        den *= d
    return num / den


def _check_cusps(q, a, b):
    q = require_squarefree(q)
    for c in (a, b):
        if c.level != q:
            raise DomainError(f"cusp {c} does not belong to level {q}")
    return q


def phi_entry(q: int, a: Cusp, b: Cusp, s) -> complex:
    q = _check_cusps(q, a, b)
    s = complex(s)
    return psi(s) * _entry_rational(q, a, b, s)


def phi_entry_s_derivative(q: int, a: Cusp, b: Cusp, s) -> complex:
    """d/ds phi_{a,b}: psi' R + psi R', with R' assembled factor by factor."""
    q = _check_cusps(q, a, b)
    s = complex(s)
    ps = primes_of(q)
    facs, dfacs = [], []
    for p in ps:
        lp = math.log(p)
        p2s = _pow(p, 2 * s)
        den = p2s - 1.0
        if _bit(p, a.divisor) == _bit(p, b.divisor):
            f = (p - 1) / den
            df = -(p - 1) * 2 * lp * p2s / den ** 2
        else:
            num = _pow(p, s) - _pow(p, 1 - s)
            dnum = lp * (_pow(p, s) + _pow(p, 1 - s))
            f = num / den
            df = dnum / den - num * 2 * lp * p2s / den ** 2
        facs.append(f)
        dfacs.append(df)
    r = complex(np.prod(facs)) if facs else 1.0 + 0j
    dr = 0j
    for j in range(len(ps)):
        prod = dfacs[j]
        for k in range(len(ps)):
            if k != j:
                prod *= facs[k]
        dr += prod
    pv = psi(s)
    return psi_log_derivative(s) * pv * r + pv * dr


def phi_entry_t_derivative(q: int, a: Cusp, b: Cusp, t: float) -> complex:
    return 1j * phi_entry_s_derivative(q, a, b, complex(0.5, t))


def weighted_entry(q, a, b, n, t) -> complex:
    """alpha(n, 1/2+it) phi_{a,b}(1/2+it)."""
    s = complex(0.5, t)
    return alpha(n, s) * phi_entry(q, a, b, s)


def weighted_entry_s_derivative(q, a, b, n, t) -> complex:
    s = complex(0.5, t)
    return (alpha_s_derivative(n, s) * phi_entry(q, a, b, s)
            + alpha(n, s) * phi_entry_s_derivative(q, a, b, s))
