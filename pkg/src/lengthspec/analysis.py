"""Power sums over the length spectrum and their asymptotic checks."""
import math
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .spectrum import SpectrumTable, SubgroupDescriptor, build_table, norm_of

__all__ = [
    "CoverageError", "AsymptoticReport", "li_k", "pi_k", "pi_k_series", "psi_k",
    "psi_series", "psi_bounds", "estimate_c", "bound_report",
]

# no exceptional eigenvalues in (0, 1/4) for the groups handled here
OMITTED_TERMS = "secondary terms li_1(x^(1/2 + i r_j)) for exceptional eigenvalues omitted"


class CoverageError(ValueError):
    pass


def li_k(x, k):
    """integral_2^x (log t)^-k dt by adaptive quadrature in s = log t."""
    if x < 2:
        raise ValueError(f"li_k needs x >= 2, got {x}")
    if k < 0:
        raise ValueError("k must be >= 0")
    if k == 0:
        return x - 2.0
    if x == 2:
        return 0.0
    with mpmath.workdps(30):
        a, b = mpmath.log(2), mpmath.log(mpmath.mpf(x))
        pts = [a] + [mpmath.mpf(v) for v in range(1, int(b) + 1) if v > a] + [b]
        val = mpmath.quad(lambda s: mpmath.exp(s) / s ** k, pts)
    return float(val)


def _check_cover(table, x):
    if x > table.coverage:
        raise CoverageError(
            f"x={x:.6g} exceeds table coverage N(t_max+1)={table.coverage:.6g} (t_max={table.t_max})")


def pi_k(table, k, x):
    """sum of m(N)^k over norms N < x with m(N) > 0."""
    _check_cover(table, x)
    total = 0
    for rec in table:
        if rec.N >= x:
            break
        if rec.m:
            total += rec.m ** k
    return total


def pi_k_series(table, k, xs):
    """pi_k at many x in one pass (xs need not be sorted)."""
    xs = np.asarray(xs, dtype=float)
    for x in xs:
        _check_cover(table, x)
    N = np.array([r.N for r in table])
    w = np.array([r.m ** k if r.m else 0 for r in table], dtype=object)
    cum = np.concatenate([[0], np.cumsum(w)])
    idx = np.searchsorted(N, xs, side="left")
    return [int(cum[i]) for i in idx]


def _psi_terms(table, k, variant):
    out = []
    for rec in table:
        if variant == "lemma-literal":
            inner = sum(r.l_value * r.M / r.u for r in rec.rows)
        elif variant == "mhat-derived":
            # mhat(N) / (N^1/2 - N^-1/2) with mhat = 2 log eps(t) mhat_coeff
            inner = 2.0 * rec.log_eps * float(rec.mhat_coeff) / math.sqrt(rec.t * rec.t - 4)
        else:
            raise ValueError(f"unknown variant {variant!r}")
        out.append(inner ** k)
    return out


def psi_series(table, k, Ts, variant="lemma-literal"):
    terms = np.cumsum([0.0] + _psi_terms(table, k, variant))
    out = []
    for T in Ts:
        T = int(math.floor(T))
        if T > table.t_max:
            raise CoverageError(f"T={T} exceeds table t_max={table.t_max}")
        out.append(float(terms[max(T - 2, 0)]))
    return out


def psi_k(table, k, T, variant="lemma-literal"):
    """Trace-indexed L-value power sum up to T.

    ``lemma-literal``: sum_t (sum_u L(1, chi_{d_{t,u}}) M / u)^k.
    ``mhat-derived``: sum_t (mhat(N(t)) / (N^1/2 - N^-1/2))^k.
    """
    return psi_series(table, k, [T], variant)[0]


def psi_bounds(K, index, k, T, full_table=None):
    """(lower, upper) envelope for Psi of any subgroup of level K and given
    index that contains Gamma(K)."""
    if K < 1 or index < 1 or T < 3:
        raise ValueError("need K >= 1, index >= 1, T >= 3")
    T = int(T)
    table = full_table if full_table is not None and full_table.t_max >= T else \
        build_table(SubgroupDescriptor(), T)
    upper = index ** k * psi_k(table, k, T)
    K2 = K * K
    lower = 0.0
    for t in range(3, T + 1):
        if t % K2 not in (2 % K2, (-2) % K2):
            continue
        inner = sum(r.l_value / r.u for r in table.records[t].rows if r.u % K == 0)
        lower += inner ** k
    return index ** k * lower, upper


@dataclass
class AsymptoticReport:
    k: int
    xs: list
    pis: list
    lis: list
    ratios: list
    c: float
    stability: float
    notes: list = field(default_factory=list)

    def rows(self):
        return list(zip(self.xs, self.pis, self.lis, self.ratios))


def estimate_c(table, k, x_grid):
    """Ratios pi_k(x) / li_k(x^((k+1)/2)) on a grid; the last ratio is the
    constant estimate, its drift over the last doubling the stability."""
    xs = sorted(float(x) for x in x_grid)
    if len(xs) < 5 or xs[-1] / xs[0] < 4:
        raise ValueError("grid needs >= 5 points spanning >= 2 doublings")
    if xs[0] <= norm_of(3)[1]:
        raise ValueError("grid must start above the smallest norm N(3)")
    half = xs[-1] / 2
    pis = pi_k_series(table, k, xs + [half])
    lis = [li_k(x ** ((k + 1) / 2), k) for x in xs + [half]]
    ratios = [p / l for p, l in zip(pis, lis)]
    c = ratios[-2]
    stability = abs(c - ratios[-1]) / c
    return AsymptoticReport(k, xs, pis[:-1], lis[:-1], ratios[:-1], c, stability,
                            [OMITTED_TERMS])


def bound_report(table):
    """Envelope ratios for m(N) with witnessing traces."""
    recs = [r for r in table]
    if not recs:
        raise ValueError("empty table")
    out = {}

    def extreme(name, vals, pick):
        i = pick(range(len(vals)), key=lambda j: vals[j][1])
        out[name] = {"value": vals[i][1], "t": vals[i][0]}

    extreme("max_m_over_sqrtN_logN",
            [(r.t, r.m / (math.sqrt(r.N) * r.length)) for r in recs], max)
    extreme("max_m_over_N34", [(r.t, r.m / r.N ** 0.75) for r in recs], max)
    late = [(r.t, r.m / r.N ** 0.45) for r in recs if r.t >= 10]
    if late:
        extreme("min_m_over_N045_t_ge_10", late, min)
    else:
        out["min_m_over_N045_t_ge_10"] = None
    pts = [(r.length, math.log(float(r.mhat_coeff))) for r in recs if r.mhat_coeff > 0]
    if len(pts) >= 2:
        x, y = np.array(pts).T
        out["slope_log_mhat_coeff_vs_logN"] = float(np.polyfit(x, y, 1)[0])
        # mhat(N) = log N * mhat_coeff
        out["slope_log_mhat_vs_logN"] = float(np.polyfit(x, y + np.log(x), 1)[0])
    else:
        out["slope_log_mhat_coeff_vs_logN"] = None
        out["slope_log_mhat_vs_logN"] = None
    out["t_max"] = table.t_max
    out["notes"] = ["envelope exponent eta = 3/4 with 2 rho_0 = 1"]
    return out
