"""L(1, chi_d) two ways, and the character sums used to show that
L-value sums over trace progressions grow linearly."""
from dataclasses import dataclass, field
from math import sqrt

import numpy as np
from scipy.special import digamma

from . import _kernels
from .arith import _check_discriminant, factorize, kronecker, pell4_fundamental
from .forms import class_number, class_numbers

__all__ = [
    "ConvergenceError", "InsufficientSampleError", "ProgressionSpec",
    "l_value_exact", "l_value_direct", "l_values_at_traces", "chi8", "f_hat",
    "c8n_direct", "c8n_product", "c8n_majorant", "progression", "phi_Knu",
    "estimate_a",
]


class ConvergenceError(ArithmeticError):
    pass


class InsufficientSampleError(ValueError):
    pass


def l_value_exact(d):
    """h(d) log eps(d) / sqrt(d)."""
    _check_discriminant(d)
    return class_number(d) * pell4_fundamental(d).log() / sqrt(d)


def l_value_direct(d, tol=1e-10):
    """sum_{n>=1} (d/n)/n without class numbers.

    (d/.) has period d, so grouping the series by residue class a mod d
    sums every class in closed form:
        L = -(1/d) sum_{a=1}^{d} (d/a) digamma(a/d).
    The only error left is floating-point rounding, which is bounded
    and compared against ``tol``.
    """
    _check_discriminant(d)
    if tol < 1e-10:
        raise ValueError("tol must be >= 1e-10")
    chi = _kernels.kronecker_row(np.int64(d), d)[1:].astype(np.float64)
    if chi.sum() != 0:
        raise AssertionError(f"(d/.) does not sum to zero over a period for d={d}")
    psi = digamma(np.arange(1, d + 1, dtype=np.float64) / d)
    terms = chi * psi
    value = -float(np.sum(terms)) / d
    # pairwise summation: error <~ eps * log2(d) * sum|terms|; digamma itself ~ 4 ulp
    bound = np.finfo(float).eps * (np.log2(d) + 4.0) * float(np.sum(np.abs(terms))) / d
    if bound > tol:
        raise ConvergenceError(f"rounding bound {bound:.2e} exceeds tol {tol:.2e} for d={d}")
    return value


def l_values_at_traces(ts):
    """L(1, chi_{t^2-4}) for many traces, class numbers computed in one batch."""
    ts = list(ts)
    ds = [t * t - 4 for t in ts]
    hs = class_numbers(ds)
    return [h * pell4_fundamental(d).log() / sqrt(d) for d, h in zip(ds, hs)]


def chi8(m):
    r = m % 8
    if r == 1:
        return 1
    if r == 5:
        return -1
    return 0


def _crt(residues, moduli):
    x, M = 0, 1
    for r, m in zip(residues, moduli):
        # solve x + M*k = r mod m
        k = ((r - x) * pow(M, -1, m)) % m
        x += M * k
        M *= m
    return x % M


@dataclass(frozen=True)
class ProgressionSpec:
    """Trace progression t = nu_i mod p_i^e_i for K = prod p_i^e_i.

    ``mu`` is the lift mod K^2 with mu = nu_i mod p_i^(2 e_i), which makes
    K^2 divide mu^2 - 4.  For K = 1 the lift is taken as 2.
    """
    K: int
    nu: tuple = ()
    mu: int = None
    primes: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        fact = factorize(self.K)
        object.__setattr__(self, "primes", fact.factors)
        nu = tuple(self.nu) if self.nu else (2,) * len(fact.factors)
        if len(nu) != len(fact.factors) or any(v not in (2, -2) for v in nu):
            raise ValueError(f"nu must have one entry in {{+2,-2}} per prime of K={self.K}")
        object.__setattr__(self, "nu", nu)
        K2 = self.K * self.K
        if self.mu is None:
            if self.K == 1:
                mu = 2
            else:
                mods = [p ** (2 * e) for p, e in fact.factors]
                mu = _crt([v % m for v, m in zip(nu, mods)], mods)
            object.__setattr__(self, "mu", mu)
        if (self.mu * self.mu - 4) % K2:
            raise ValueError(f"mu={self.mu} violates mu^2 = 4 mod K^2")
        for (p, e), v in zip(fact.factors, nu):
            if (self.mu - v) % p ** e:
                raise ValueError(f"mu={self.mu} is not {v} mod {p}^{e}")

    def contains(self, t):
        return all((t - v) % p ** e == 0 for (p, e), v in zip(self.primes, self.nu))


def f_hat(spec, t):
    K2 = spec.K * spec.K
    return K2 * t * t + 2 * spec.mu * t + (spec.mu * spec.mu - 4) // K2


def c8n_direct(spec, n):
    """sum over 8n <= t < 16n of (f_hat(t) / n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return sum(kronecker(f_hat(spec, t), n) for t in range(8 * n, 16 * n))


def c8n_product(spec, n, literal=False):
    """Closed form of c8n_direct as a product over the primes of n.

    For an odd prime p | K with even exponent, f_hat is linear and nonzero
    in slope mod p, so exactly one residue is a root and the local factor is
    (p - 1) p^(e-1).  ``literal=True`` uses (p - 2) p^(e-1) there instead,
    the value that holds only for p not dividing K.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    fact = factorize(n)
    K = spec.K
    e2 = 0
    val = 1
    for p, e in fact.factors:
        if p == 2:
            e2 = e
            continue
        if e % 2 == 0:
            if K % p == 0 and not literal:
                val *= (p - 1) * p ** (e - 1)
            else:
                val *= (p - 2) * p ** (e - 1)
        else:
            val *= p ** (e - 1) * (0 if K % p == 0 else -1)
    if e2 == 0:
        two = 8
    elif K % 2 == 0:
        two = 0
    else:
        two = 4 * (-2) ** e2
    return two * val


def c8n_majorant(n):
    """2^-e prod_{e_j even} p^-e_j prod_{e_j odd} p^(-e_j-1), as a float."""
    out = 1.0
    for p, e in factorize(n).factors:
        if p == 2:
            out *= 2.0 ** -e
        elif e % 2 == 0:
            out *= float(p) ** -e
        else:
            out *= float(p) ** (-e - 1)
    return out


def progression(spec, T):
    """Traces 3 <= t <= T in the progression."""
    return [t for t in range(3, int(T) + 1) if spec.contains(t)]


def _lvals(ts, table):
    if table is not None and ts and max(ts) <= table.t_max:
        out = []
        for t in ts:
            row = table.records[t].rows[0]
            out.append(row.h * row.eps_d.log() / sqrt(row.d))
        return out
    return l_values_at_traces(ts)


def phi_Knu(spec, k, T, table=None):
    """sum over the progression up to T of L(1, chi_{t^2-4})^k.

    ``table`` may be a SpectrumTable covering T (u = 1 rows are reused)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ts = progression(spec, T)
    return float(np.sum(np.asarray(_lvals(ts, table)) ** k)) if ts else 0.0


def estimate_a(spec, k, T, table=None, min_terms=50):
    ts = progression(spec, T)
    if len(ts) < min_terms:
        raise InsufficientSampleError(
            f"progression K={spec.K} nu={spec.nu} has {len(ts)} < {min_terms} terms up to T={T}")
    return phi_Knu(spec, k, T, table) / T
