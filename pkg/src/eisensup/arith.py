"""Small integer helpers: factorization, divisors, Moebius, Bezout."""

from __future__ import annotations

from functools import lru_cache
from math import gcd

from .errors import DomainError


@lru_cache(maxsize=4096)
def factorize(n: int) -> tuple:
    """Prime factorization as a tuple of (p, e), increasing p."""
    if n < 1:
        raise DomainError("factorize expects a positive integer")
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def is_squarefree(n: int) -> bool:
    return n >= 1 and all(e == 1 for _, e in factorize(n))


def require_squarefree(q: int) -> int:
    if not isinstance(q, (int,)) or isinstance(q, bool):
        try:
            q = int(q)
        except (TypeError, ValueError):
            raise DomainError(f"level must be an integer, got {q!r}") from None
    if not is_squarefree(q):
        raise DomainError(f"level q = {q} is not a squarefree positive integer")
    return q


def primes_of(n: int) -> list:
    return [p for p, _ in factorize(n)]


def divisors(n: int) -> list:
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p ** k for d in divs for k in range(e + 1)]
    return sorted(divs)


def moebius(n: int) -> int:
    f = factorize(n)
    if any(e > 1 for _, e in f):
        return 0
    return -1 if len(f) % 2 else 1


def euler_phi(n: int) -> int:
    out = n
    for p, _ in factorize(n):
        out = out // p * (p - 1)
    return out


def divisor_sigma(m: int, a: complex) -> complex:
    """sigma_a(m) = sum of d^a over positive divisors d of m."""
    return sum(complex(d) ** a for d in divisors(m))


def ext_gcd(a: int, b: int):
    """(g, x, y) with a x + b y = g = gcd(a, b) >= 0."""
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        k = a // b
        a, b = b, a - k * b
        x0, x1 = x1, x0 - k * x1
        y0, y1 = y1, y0 - k * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


__all__ = ["factorize", "is_squarefree", "require_squarefree", "primes_of", "divisors",
           "moebius", "euler_phi", "divisor_sigma", "ext_gcd", "gcd"]
