"""SL2(R) elements, Iwasawa coordinates, cusps of Gamma_0(q) and the height function.

Conventions: g = n(x) a(y) k(theta) with

    n(x) = [[1, x], [0, 1]],  a(y) = [[sqrt(y), 0], [0, 1/sqrt(y)]],
    k(theta) = [[cos theta, -sin theta], [sin theta, cos theta]].

Then z = g.i = x + iy and the bottom row of g is y^{-1/2} (sin theta, cos theta).
A matrix [[a, b], [c, d]] acts on the left by z -> (az+b)/(cz+d),
y -> y/|cz+d|^2 and theta -> theta + arg(cz+d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .arith import divisors, ext_gcd, gcd, require_squarefree
from .errors import DomainError

TWO_PI = 2.0 * math.pi


def canonical_theta(theta: float) -> float:
    th = math.fmod(theta, TWO_PI)
    if th < 0:
        th += TWO_PI
    if th >= TWO_PI:
        th = 0.0
    return th


@dataclass(frozen=True)
class GroupElement:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        det = self.a * self.d - self.b * self.c
        scale = max(1.0, abs(self.a * self.d), abs(self.b * self.c))
        if not abs(det - 1.0) <= 1e-12 * scale:
            raise DomainError(f"determinant {det!r} differs from 1")

    @classmethod
    def identity(cls) -> "GroupElement":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, m) -> "GroupElement":
        m = np.asarray(m, dtype=float)
        return cls(float(m[0, 0]), float(m[0, 1]), float(m[1, 0]), float(m[1, 1]))

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def is_integral(self, tol: float = 1e-9) -> bool:
        return all(abs(v - round(v)) <= tol for v in (self.a, self.b, self.c, self.d))

    def max_abs_diff(self, other: "GroupElement") -> float:
        return float(np.max(np.abs(self.as_array() - other.as_array())))


def translation(x: float) -> GroupElement:
    return GroupElement(1.0, float(x), 0.0, 1.0)


S_MATRIX = GroupElement(0.0, -1.0, 1.0, 0.0)
T_MATRIX = GroupElement(1.0, 1.0, 0.0, 1.0)


@dataclass(frozen=True)
class IwasawaCoordinates:
    x: float
    y: float
    theta: float = 0.0

    def __post_init__(self):
        if not (self.y > 0 and math.isfinite(self.y)):
            raise DomainError(f"Iwasawa y must be positive, got {self.y!r}")
        object.__setattr__(self, "theta", canonical_theta(float(self.theta)))

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)


def iwasawa_compose(c: IwasawaCoordinates) -> GroupElement:
    if not c.y > 0:
        raise DomainError("y must be positive")
    ry = math.sqrt(c.y)
    ct, st = math.cos(c.theta), math.sin(c.theta)
    # n(x) a(y) k(theta)
    a, b = ry, c.x / ry
    d = 1.0 / ry
    return GroupElement(a * ct + b * st, -a * st + b * ct, d * st, d * ct)


def iwasawa_decompose(g: GroupElement) -> IwasawaCoordinates:
    r2 = g.c * g.c + g.d * g.d
    y = 1.0 / r2
    theta = math.atan2(g.c, g.d)
    z = complex(g.b, g.a) / complex(g.d, g.c)
    return IwasawaCoordinates(z.real, y, theta)


def act(gamma: GroupElement, x, y, theta):
    """Left action of gamma on (arrays of) Iwasawa coordinates."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    theta = np.asarray(theta, dtype=float)
    z = x + 1j * y
    j = gamma.c * z + gamma.d
    w = (gamma.a * z + gamma.b) / j
    th = np.mod(theta + np.angle(j), TWO_PI)
    return w.real, w.imag, th


# ---------------------------------------------------------------------------
# Cusps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cusp:
    """Cusp of Gamma_0(q) with representative 1/divisor.

    divisor == level is the cusp at infinity; divisor == 1 is the cusp 0.
    """

    level: int
    divisor: int
    width: int

    def __post_init__(self):
        require_squarefree(self.level)
        if self.divisor < 1 or self.level % self.divisor:
            raise DomainError(f"{self.divisor} does not divide {self.level}")
        if self.divisor * self.width != self.level:
            raise DomainError("divisor * width must equal the level")

    @property
    def is_infinity(self) -> bool:
        return self.divisor == self.level

    def label(self) -> str:
        return f"v{self.divisor}"


def cusps_of_level(q: int) -> list:
    q = require_squarefree(q)
    return [Cusp(q, v, q // v) for v in divisors(q)]


def cusp_at_infinity(q: int) -> Cusp:
    q = require_squarefree(q)
    return Cusp(q, q, 1)


def cusp_for_divisor(q: int, v: int) -> Cusp:
    q = require_squarefree(q)
    return Cusp(q, v, q // v)


def scaling_matrix(c: Cusp) -> GroupElement:
    if c.is_infinity:
        return GroupElement.identity()
    rw = math.sqrt(c.width)
    return GroupElement(rw, 0.0, c.divisor * rw, 1.0 / rw)


def stabilizer_generator(c: Cusp) -> GroupElement:
    """Generator of the stabilizer of the cusp inside Gamma_0(q) (up to sign)."""
    if c.is_infinity:
        return T_MATRIX
    q, v, w = c.level, c.divisor, c.width
    return GroupElement(float(1 - q), float(w), float(-v * v * w), float(1 + q))


def coset_matrix(c: Cusp, C: int, D: int) -> GroupElement:
    """gamma in Gamma_0(q) with sigma_c^{-1} gamma = diag(w^{-1/2}, w^{1/2}) tau, bottom row of tau = (C, D).

    Requires gcd(C, D) = 1, divisor | C and gcd(C, width) = 1.
    """
    q, v, w = c.level, c.divisor, c.width
    C, D = int(C), int(D)
    g, a, b = ext_gcd(D, C)
    if g != 1:
        raise DomainError("bottom row must be primitive")
    A, B = a, -b  # A D - B C = 1
    if c.is_infinity:
        if C % q:
            raise DomainError("row not admissible for the cusp at infinity")
        return GroupElement(float(A), float(B), float(C), float(D))
    if C % v or gcd(C, w) != 1:
        raise DomainError("row not admissible for this cusp")
    if w > 1:
        target = (-C * pow(v, -1, w)) % w
        k = ((target - A) * pow(C % w, -1, w)) % w
        A, B = A + k * C, B + k * D
    return GroupElement(float(A), float(B), float(v * A + C), float(v * B + D))


# ---------------------------------------------------------------------------
# Fundamental domain reduction
# ---------------------------------------------------------------------------

def _reduce_z(z: complex):
    """Reduce z into the standard domain, returning (integer matrix entries, reduced z)."""
    a, b, c, d = 1, 0, 0, 1
    for _ in range(10_000):
        k = math.floor(z.real + 0.5)
        if k:
            z -= k
            a, b = a - k * c, b - k * d
        r2 = z.real * z.real + z.imag * z.imag
        if r2 < 1.0 - 1e-14:
            z = -1.0 / z
            a, b, c, d = -c, -d, a, b
            continue
        break
    # boundary tie-breaking: x in [-1/2, 1/2), and x <= 0 on the unit circle
    if z.real >= 0.5:
        z -= 1.0
        a, b = a - c, b - d
    r2 = z.real * z.real + z.imag * z.imag
    if abs(r2 - 1.0) <= 1e-14 and z.real > 0:
        z = -1.0 / z
        a, b, c, d = -c, -d, a, b
    return (a, b, c, d), z


def reduce_to_fundamental_domain(g: GroupElement):
    """(gamma, gamma g) with gamma in SL2(Z) and gamma g in the standard domain."""
    co = iwasawa_decompose(g)
    (a, b, c, d), _ = _reduce_z(co.z)
    gamma = GroupElement(float(a), float(b), float(c), float(d))
    return gamma, gamma @ g


def reduce_points(x, y, theta):
    """Vectorized reduction of Iwasawa coordinates to the standard domain.

    Returns reduced (x, y, theta).  theta picks up arg(cz+d) of the reducing matrix.
    """
    x = np.array(x, dtype=float, copy=True)
    y = np.array(y, dtype=float, copy=True)
    theta = np.array(theta, dtype=float, copy=True)
    z = x + 1j * y
    th = theta.copy()
    for _ in range(10_000):
        k = np.floor(z.real + 0.5)
        z = z - k
        inside = np.abs(z) ** 2 < 1.0 - 1e-14
        if not inside.any():
            break
        # S: z -> -1/z, theta -> theta + arg(z)
        th = np.where(inside, th + np.angle(z), th)
        z = np.where(inside, -1.0 / np.where(inside, z, 1.0), z)
    shift = z.real >= 0.5
    z = np.where(shift, z - 1.0, z)
    circle = (np.abs(np.abs(z) ** 2 - 1.0) <= 1e-14) & (z.real > 0)
    th = np.where(circle, th + np.angle(z), th)
    z = np.where(circle, -1.0 / np.where(circle, z, 1.0), z)
    return z.real, z.imag, np.mod(th, TWO_PI)


# ---------------------------------------------------------------------------
# Height
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HeightResult:
    height: float
    cusp: Cusp
    witness: GroupElement


def _admissible(C: int, D: int, cusp: Cusp) -> bool:
    if gcd(C, D) != 1:
        return False
    if C == 0:
        return cusp.is_infinity and abs(D) == 1
    return C % cusp.divisor == 0 and gcd(C, cusp.width) == 1


def height(g: GroupElement, q: int) -> HeightResult:
    """Exact height: max over cusps and Gamma_0(q) of y(sigma_a^{-1} gamma g).

    Every candidate is a primitive row (C, D) admissible for some cusp with
    value y / (w |Cz+D|^2).  Only finitely many rows beat a positive floor,
    and all of those are enumerated.
    """
    q = require_squarefree(q)
    co = iwasawa_decompose(g)
    z, y = co.z, co.y
    cusps = cusps_of_level(q)
    by_div = {cu.divisor: cu for cu in cusps}

    # initial floor: the bottom row of the level-one reduction
    (_, _, c0, d0), zr = _reduce_z(z)
    if c0 < 0 or (c0 == 0 and d0 < 0):
        c0, d0 = -c0, -d0
    cusp0 = by_div[gcd(c0, q) if c0 else q]
    best = (y / (cusp0.width * abs(c0 * z + d0) ** 2), cusp0, c0, d0)

    for cusp in sorted(cusps, key=lambda cu: -cu.divisor):
        v, w = cusp.divisor, cusp.width
        radius2 = y / (w * best[0]) * (1 + 1e-12)
        cmax = int(math.floor(math.sqrt(radius2) / y))
        for C in range(0, cmax + 1, v):
            if C == 0:
                if cusp.is_infinity:
                    val = y / w
                    if val > best[0] * (1 + 1e-13):
                        best = (val, cusp, 0, 1)
                continue
            if gcd(C, w) != 1:
                continue
            rem = radius2 - (C * y) ** 2
            if rem < 0:
                continue
            half = math.sqrt(rem)
            lo = math.ceil(-C * z.real - half)
            hi = math.floor(-C * z.real + half)
            for D in range(lo, hi + 1):
                if gcd(C, D) != 1:
                    continue
                val = y / (w * abs(C * z + D) ** 2)
                if val > best[0] * (1 + 1e-13):
                    best = (val, cusp, C, D)
                    radius2 = y / (w * best[0]) * (1 + 1e-12)
    val, cusp, C, D = best
    return HeightResult(val, cusp, coset_matrix(cusp, C, D))


def zone_coordinates(g: GroupElement, hr: HeightResult) -> IwasawaCoordinates:
    """Iwasawa coordinates of sigma_a^{-1} gamma g for the height witness."""
    return iwasawa_decompose(scaling_matrix(hr.cusp).inverse() @ hr.witness @ g)


@dataclass(frozen=True)
class ZoneTag:
    kind: str                      # "interior" or "cuspidal"
    cusp: Optional[Cusp] = None

    def __str__(self):
        return self.kind if self.cusp is None else f"cuspidal({self.cusp.label()})"


def classify_zone(g: GroupElement, q: int, T: float) -> ZoneTag:
    if T < 1:
        raise DomainError("T must be at least 1")
    hr = height(g, q)
    if hr.height <= T:
        return ZoneTag("interior")
    return ZoneTag("cuspidal", hr.cusp)


def delta_rectangle_contains(g: GroupElement, delta: float) -> bool:
    if not delta > 0:
        raise DomainError("delta must be positive")
    co = iwasawa_decompose(g)
    th = co.theta if co.theta <= math.pi else co.theta - TWO_PI
    return max(abs(co.x), abs(co.y - 1.0), abs(th)) <= delta


@dataclass
class SmallTranslateReport:
    passed: list
    heights: list
    shifted_heights: list

    @property
    def all_pass(self) -> bool:
        return all(self.passed)


def small_translate_check(gprime: GroupElement, q: int, sample) -> SmallTranslateReport:
    """For each x: h(x)/2 <= h(x g') <= 2 h(x), and same cusp when h(x) > 2."""
    passed, hs, hs2 = [], [], []
    for x in sample:
        h1 = height(x, q)
        h2 = height(x @ gprime, q)
        ok = h1.height / 2 <= h2.height <= 2 * h1.height
        if ok and h1.height > 2:
            ok = h1.cusp == h2.cusp
        passed.append(bool(ok))
        hs.append(h1.height)
        hs2.append(h2.height)
    return SmallTranslateReport(passed, hs, hs2)


def level_coset_representatives(q: int) -> list:
    """Right coset representatives of Gamma_0(q) in SL2(Z), one per point of P^1(Z/q).

    SL2(Z) = union of Gamma_0(q) tau; F_q = union of tau F is a fundamental domain.
    """
    q = require_squarefree(q)
    reps = []
    seen = set()
    # classes (c : d) in P^1(Z/q); representative with bottom row (c, d)
    for c in range(q):
        for d in range(q):
            if gcd(gcd(c, d), q) != 1:
                continue
            key = None
            for u in range(1, q + 1):
                if gcd(u, q) != 1:
                    continue
                cand = ((u * c) % q, (u * d) % q)
                key = cand if key is None or cand < key else key
            if key in seen:
                continue
            seen.add(key)
            cc, dd = c, d
            while gcd(cc, dd) != 1:
                dd += q
            _, a, b = ext_gcd(dd, cc)
            reps.append(GroupElement(float(a), float(-b), float(cc), float(dd)))
    return reps
