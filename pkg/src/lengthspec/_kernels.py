"""Hot integer loops: smallest-prime-factor sieve, reduced-form cycle
counting and Kronecker-symbol tables.

Everything here operates on int64 and must stay inside the numba nopython
subset.  Discriminants must satisfy d < 2**62 / 4.
"""
import numpy as np

from ._jit import njit, prange

_DIV_CAP = 8192


@njit(cache=True)
def spf_sieve(limit):
    """spf[n] = smallest prime factor of n for 2 <= n <= limit."""
    spf = np.zeros(limit + 1, dtype=np.int32)
    i = 2
    while i * i <= limit:
        if spf[i] == 0:
            for j in range(i * i, limit + 1, i):
                if spf[j] == 0:
                    spf[j] = i
        i += 1
    for n in range(2, limit + 1):
        if spf[n] == 0:
            spf[n] = n
    return spf


@njit(cache=True)
def isqrt64(n):
    if n < 2:
        return n
    r = np.int64(np.sqrt(np.float64(n)))
    while r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


@njit(cache=True)
def gcd64(a, b):
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


@njit(cache=True)
def _divisors(n, spf, buf):
    """Write all divisors of n into buf, return how many."""
    buf[0] = 1
    cnt = 1
    m = n
    while m > 1:
        if m < spf.shape[0]:
            p = np.int64(spf[m])
        else:
            # beyond the sieve: trial division
            p = m
            q = np.int64(2)
            while q * q <= m:
                if m % q == 0:
                    p = q
                    break
                q += 1
        e = 0
        while m % p == 0:
            m //= p
            e += 1
        prev = cnt
        pk = np.int64(1)
        for _ in range(e):
            pk *= p
            for i in range(prev):
                buf[cnt] = buf[i] * pk
                cnt += 1
    return cnt


@njit(cache=True)
def reduced_forms(d, spf):
    """All reduced primitive forms of discriminant d as (a, b) pairs, with
    a signed.  Reduced means 0 < b < sqrt(d) and
    sqrt(d) - b < 2|a| < sqrt(d) + b, tested in exact integers."""
    s = isqrt64(d)
    cap = 64
    A = np.empty(cap, dtype=np.int64)
    B = np.empty(cap, dtype=np.int64)
    k = 0
    buf = np.empty(_DIV_CAP, dtype=np.int64)
    b = s
    if (b - d) % 2 != 0:
        b -= 1
    while b > 0:
        n = (d - b * b) // 4
        nd = _divisors(n, spf, buf)
        for i in range(nd):
            a = buf[i]
            # s < 2a + b  and  2a - b <= s
            if 2 * a + b > s and 2 * a - b <= s:
                c = n // a
                if gcd64(gcd64(a, b), c) == 1:
                    if k + 2 > cap:
                        cap *= 2
                        A2 = np.empty(cap, dtype=np.int64)
                        B2 = np.empty(cap, dtype=np.int64)
                        A2[:k] = A[:k]
                        B2[:k] = B[:k]
                        A = A2
                        B = B2
                    A[k] = a
                    B[k] = b
                    A[k + 1] = -a
                    B[k + 1] = b
                    k += 2
        b -= 2
    return A[:k], B[:k]


@njit(cache=True)
def count_cycles(d, spf):
    """Number of cycles of reduced primitive forms of discriminant d under
    the right-neighbour map; -1 if a neighbour falls outside the list."""
    A, B = reduced_forms(d, spf)
    n = A.shape[0]
    if n == 0:
        return 0
    s = isqrt64(d)
    w = s + 1
    keys = (A + s) * w + B
    order = np.argsort(keys)
    skeys = keys[order]
    seen = np.zeros(n, dtype=np.bool_)
    cycles = 0
    for start in range(n):
        if seen[start]:
            continue
        cycles += 1
        i = start
        while not seen[i]:
            seen[i] = True
            a = A[order[i]]
            b = B[order[i]]
            c = (b * b - d) // (4 * a)
            m = 2 * c if c > 0 else -2 * c
            nb = s - (s + b) % m
            nk = (c + s) * w + nb
            j = np.searchsorted(skeys, nk)
            if j >= n or skeys[j] != nk:
                return -1
            i = j
    return cycles


@njit(cache=True, parallel=True)
def count_cycles_batch(ds, spf):
    out = np.empty(ds.shape[0], dtype=np.int64)
    for i in prange(ds.shape[0]):
        out[i] = count_cycles(ds[i], spf)
    return out


@njit(cache=True)
def kronecker64(a, n):
    """Kronecker symbol (a/n) for n >= 1."""
    if n == 1:
        return 1
    result = 1
    if n % 2 == 0:
        if a % 2 == 0:
            return 0
        v = 0
        while n % 2 == 0:
            n //= 2
            v += 1
        if v % 2 == 1:
            r8 = a % 8
            if r8 == 3 or r8 == 5:
                result = -result
    # Jacobi symbol (a/n), n odd
    a = a % n
    while a != 0:
        while a % 2 == 0:
            a //= 2
            r8 = n % 8
            if r8 == 3 or r8 == 5:
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a = a % n
    if n == 1:
        return result
    return 0


@njit(cache=True)
def kronecker_row(d, q):
    """chi[i] = (d / i) for 0 <= i <= q (chi[0] unused, set to 0)."""
    out = np.zeros(q + 1, dtype=np.int8)
    for i in range(1, q + 1):
        out[i] = kronecker64(d, i)
    return out
