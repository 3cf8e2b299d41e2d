"""Exact integer and real-quadratic arithmetic.

Pell-type units are kept as ``(p + q*sqrt(d))/2`` with ``p*p - d*q*q == 4``;
all values are Python ints, so nothing overflows.
"""
from dataclasses import dataclass
from math import isqrt as _isqrt

__all__ = [
    "Factorization", "PellUnit", "kronecker", "isqrt", "factorize",
    "max_u", "admissible_divisors", "pell4_fundamental", "unit_power",
    "cheb_trace", "power_ancestors", "divisors",
]


@dataclass(frozen=True)
class Factorization:
    value: int
    factors: tuple  # ((prime, exponent), ...) with primes increasing

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"malformed factorization {self.factors!r}")
            last = p
            prod *= p ** e
        if prod != self.value:
            raise ValueError(f"factors multiply to {prod}, not {self.value}")

    def __iter__(self):
        return iter(self.factors)

    def __mul__(self, other):
        exps = dict(self.factors)
        for p, e in other.factors:
            exps[p] = exps.get(p, 0) + e
        return Factorization(self.value * other.value, tuple(sorted(exps.items())))


@dataclass(frozen=True)
class PellUnit:
    """The unit (p + q*sqrt(d))/2 of norm +1."""
    d: int
    p: int
    q: int

    def __post_init__(self):
        if self.p * self.p - self.d * self.q * self.q != 4:
            raise ValueError(f"({self.p}, {self.q}) does not solve p^2 - {self.d} q^2 = 4")

    def log(self):
        """log((p + q*sqrt(d))/2) in double precision."""
        from math import acosh, log
        if self.p < 1 << 1000:
            return acosh(self.p / 2)
        # eps = p - 1/eps, so log(eps) = log(p) to double precision here
        return log(self.p)


def isqrt(n):
    if n < 0:
        raise ValueError("isqrt of a negative number")
    return _isqrt(n)


def kronecker(d, n):
    """Kronecker symbol (d/n) for n >= 1."""
    if n < 1:
        raise ValueError("kronecker symbol needs n >= 1")
    if n == 1:
        return 1
    result = 1
    if n % 2 == 0:
        if d % 2 == 0:
            return 0
        v = (n & -n).bit_length() - 1
        n >>= v
        if v & 1 and d % 8 in (3, 5):
            result = -result
    a = d % n
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def factorize(n):
    """Trial-division factorization; fine for n up to ~1e14."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    value = n
    out = []
    for p in (2, 3):
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
    p = 5
    step = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += step
        step = 6 - step
    if n > 1:
        out.append((n, 1))
    return Factorization(value, tuple(out))


def divisors(f):
    """Ascending divisors of a Factorization (or positive int)."""
    if isinstance(f, int):
        f = factorize(f)
    divs = [1]
    for p, e in f.factors:
        divs = [x * p ** k for x in divs for k in range(e + 1)]
    return sorted(divs)


def _trace_disc_factorization(t):
    # t^2 - 4 = (t - 2)(t + 2); factoring the halves is much cheaper
    return factorize(t - 2) * factorize(t + 2)


def _max_u_from(fact):
    g = 1
    for p, e in fact.factors:
        g *= p ** (e // 2)
    if (fact.value // (g * g)) % 4 == 1:
        return g
    # squarefree kernel is 2 or 3 mod 4: need (g/u)^2 * kernel divisible by 4
    return g // 2


def max_u(t):
    """U(t): largest u with u^2 | t^2-4 and (t^2-4)/u^2 = 0 or 1 mod 4."""
    if t < 3:
        raise ValueError(f"trace must be >= 3, got {t}")
    return _max_u_from(_trace_disc_factorization(t))


def admissible_divisors(t):
    if t < 3:
        raise ValueError(f"trace must be >= 3, got {t}")
    D = t * t - 4
    fact = _trace_disc_factorization(t)
    U = _max_u_from(fact)
    us = divisors(factorize(U)) if U > 1 else [1]
    for u in us:
        assert D % (u * u) == 0 and (D // (u * u)) % 4 in (0, 1), (t, u)
    return us


def _check_discriminant(d):
    if d < 5 or d % 4 not in (0, 1):
        raise ValueError(f"{d} is not a positive discriminant (d >= 5, d = 0,1 mod 4)")
    r = _isqrt(d)
    if r * r == d:
        raise ValueError(f"{d} is a perfect square")


def pell4_fundamental(d):
    """Minimal (p, q) > 0 with p^2 - d q^2 = 4, as a PellUnit.

    Continued fraction of (P0 + sqrt(d))/2 with P0 = d mod 2.  With
    G_i = 2 A_i - P0 B_i one has G_i^2 - d B_i^2 = (-1)^(i+1) 2 Q_{i+1}, so the
    first index with Q_{i+1} == 2 gives the smallest solution of
    x^2 - d y^2 = +-4; a -4 solution is squared.
    """
    _check_discriminant(d)
    s = _isqrt(d)
    P, Q = d % 2, 2
    A_prev, A = 1, 0   # A_{-1}, A_{-2} rolled below
    B_prev, B = 0, 1
    P0 = P
    i = 0
    while True:
        a = (P + s) // Q
        A_prev, A = a * A_prev + A, A_prev
        B_prev, B = a * B_prev + B, B_prev
        P = a * Q - P
        Q = (d - P * P) // Q
        if Q == 2:
            x = 2 * A_prev - P0 * B_prev
            y = B_prev
            if i % 2 == 1:
                return PellUnit(d, x, y)
            # x^2 - d y^2 = -4
            return PellUnit(d, (x * x + d * y * y) // 2, x * y)
        i += 1


def unit_power(u, k):
    """((p + q sqrt d)/2)^k as (p_k, q_k), via p_{k+1} = p p_k - p_{k-1}."""
    if k < 1:
        raise ValueError("power must be >= 1")
    p, q = u.p, u.q
    pk_1, qk_1 = 2, 0  # k = 0
    pk, qk = p, q
    for _ in range(k - 1):
        pk_1, pk = pk, p * pk - pk_1
        qk_1, qk = qk, p * qk - qk_1
    return pk, qk


def cheb_trace(t0, l):
    """Trace of the l-th power of a matrix with trace t0."""
    if l < 1:
        raise ValueError("power must be >= 1")
    prev, cur = 2, t0
    for _ in range(l - 1):
        prev, cur = cur, t0 * cur - prev
    return cur


def power_ancestors(t):
    """All (t0, l), l >= 2, with cheb_trace(t0, l) == t."""
    out = []
    t0 = 3
    while t0 * t0 - 2 <= t:
        prev, cur, l = t0, t0 * t0 - 2, 2
        while cur < t:
            prev, cur, l = cur, t0 * cur - prev, l + 1
        if cur == t:
            out.append((t0, l))
        t0 += 1
    return out
