"""Reduction theory of indefinite binary quadratic forms.

The class number h(d) counted here is the proper-equivalence (narrow) class
number of primitive forms of discriminant d: the number of cycles of
reduced forms under the right-neighbour map.
"""
from dataclasses import dataclass
from math import gcd, isqrt

import numpy as np

from . import _kernels
from .arith import _check_discriminant

__all__ = [
    "QuadForm", "discriminant", "is_reduced", "neighbor",
    "reduced_primitive_forms", "cycles", "class_number", "class_numbers",
]


class NotReducedError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class QuadForm:
    a: int
    b: int
    c: int

    @property
    def disc(self):
        return self.b * self.b - 4 * self.a * self.c

    @property
    def primitive(self):
        return gcd(gcd(self.a, self.b), self.c) == 1

    def __iter__(self):
        yield self.a
        yield self.b
        yield self.c

    def __repr__(self):
        return f"QuadForm({self.a}, {self.b}, {self.c})"


def discriminant(f):
    return f.b * f.b - 4 * f.a * f.c


def is_reduced(f):
    d = discriminant(f)
    if d <= 0:
        raise ValueError(f"{f} is not indefinite")
    s = isqrt(d)
    if s * s == d:
        raise ValueError(f"discriminant {d} of {f} is a square")
    a2 = 2 * abs(f.a)
    # sqrt(d) irrational, so each strict inequality has an exact integer form
    return 0 < f.b <= s and a2 + f.b > s and a2 - f.b <= s


def neighbor(f):
    """Right neighbour (c, b', c') with b' = -b mod 2|c| and
    sqrt(d) - 2|c| < b' < sqrt(d)."""
    if not is_reduced(f):
        raise NotReducedError(f"{f} is not reduced")
    d = discriminant(f)
    s = isqrt(d)
    c = f.c
    nb = s - (s + f.b) % (2 * abs(c))
    return QuadForm(c, nb, (nb * nb - d) // (4 * c))


def reduced_primitive_forms(d):
    """All reduced primitive forms of discriminant d, sorted by (a, b)."""
    _check_discriminant(d)
    s = isqrt(d)
    out = []
    for b in range(s, 0, -1):
        if (b - d) % 2:
            continue
        n = (d - b * b) // 4
        # need s < 2a + b and 2a - b <= s
        for a in range((s - b) // 2 + 1, (s + b) // 2 + 1):
            if n % a == 0:
                c = n // a
                if gcd(gcd(a, b), c) == 1:
                    out.append(QuadForm(a, b, -c))
                    out.append(QuadForm(-a, b, c))
    out.sort(key=lambda f: (f.a, f.b))
    return out


def cycles(d):
    """Partition the reduced primitive forms of d into neighbour cycles."""
    remaining = set(reduced_primitive_forms(d))
    out = []
    for f in reduced_primitive_forms(d):
        if f not in remaining:
            continue
        cyc = [f]
        remaining.discard(f)
        g = neighbor(f)
        while g != f:
            if g not in remaining:
                raise AssertionError(f"neighbour walk from {f} left the reduced set at {g}")
            remaining.discard(g)
            cyc.append(g)
            g = neighbor(g)
        out.append(cyc)
    return out


_spf_cache = np.zeros(0, dtype=np.int32)
_SPF_MAX = 1 << 27


def _spf_for(d):
    """Smallest-prime-factor table covering (d - b^2)/4, grown by doubling."""
    global _spf_cache
    need = min(d // 4 + 1, _SPF_MAX)
    if _spf_cache.shape[0] <= need:
        size = max(1 << 16, 1 << need.bit_length())
        _spf_cache = _kernels.spf_sieve(min(size, _SPF_MAX))
    return _spf_cache


def class_number(d):
    _check_discriminant(d)
    h = int(_kernels.count_cycles(np.int64(d), _spf_for(d)))
    if h <= 0:
        raise AssertionError(f"cycle walk failed for d={d}")
    return h


def class_numbers(ds):
    """Class numbers for many discriminants at once (numba threads)."""
    ds = [int(d) for d in ds]
    if not ds:
        return []
    for d in ds:
        _check_discriminant(d)
    arr = np.asarray(ds, dtype=np.int64)
    hs = _kernels.count_cycles_batch(arr, _spf_for(max(ds)))
    bad = [d for d, h in zip(ds, hs) if h <= 0]
    if bad:
        raise AssertionError(f"cycle walk failed for d={bad[:5]}")
    return [int(h) for h in hs]
