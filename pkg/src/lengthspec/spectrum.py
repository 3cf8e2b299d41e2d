"""Length spectrum with multiplicities from class numbers.

For each trace t >= 3 the weighted class-number sum

    mhat_coeff(t) = sum_{u | U(t)} M(t, u) h(d_{t,u}) / j_{t,u}

equals m(t) + sum m(t0)/l over the (t0, l) with cheb_trace(t0, l) = t,
so multiplicities follow by an exact rational subtraction in increasing t.
"""
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from math import log, sqrt
from types import MappingProxyType

import mpmath

from .arith import PellUnit, admissible_divisors, pell4_fundamental, power_ancestors, unit_power
from .forms import class_numbers

logger = logging.getLogger(__name__)

__all__ = [
    "KINDS", "MTableError", "UnknownMError", "IntegralityError",
    "SubgroupDescriptor", "DivisorRow", "TraceRecord", "SpectrumTable",
    "load_mtable", "M_gamma", "trace_record", "deflate", "build_table",
    "norm_of", "power_ancestor_map",
]

KINDS = ("full", "gamma0", "gamma1", "principal", "custom")


class MTableError(ValueError):
    pass


class UnknownMError(LookupError):
    pass


class IntegralityError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SubgroupDescriptor:
    kind: str = "full"
    level: int = 1
    index: int = 1
    M_table: MappingProxyType = None  # (t mod K^2, u) -> M
    source: str = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown subgroup kind {self.kind!r}")
        if self.level < 1 or self.index < 1:
            raise ValueError("level and index must be positive")
        if self.kind == "full" and (self.level != 1 or self.index != 1):
            raise ValueError("the full modular group has level 1 and index 1")
        table = self.M_table
        if table is not None:
            if not isinstance(table, MappingProxyType):
                table = MappingProxyType(dict(table))
                object.__setattr__(self, "M_table", table)
            K2 = self.level ** 2
            for (r, u), M in table.items():
                if not 0 <= r < K2:
                    raise MTableError(f"residue {r} outside [0, {K2})")
                if u < 1:
                    raise MTableError(f"u must be positive, got {u}")
                if not 0 <= M <= self.index:
                    raise MTableError(f"M({r},{u})={M} outside [0, index={self.index}]")

    @classmethod
    def full(cls):
        return cls()

    def saturated(self, t, u):
        """True where containing Gamma(K) forces M = index."""
        K = self.level
        r = t % (K * K)
        return (r == 2 % (K * K) or r == (-2) % (K * K)) and u % K == 0

    def to_json(self):
        out = {"kind": self.kind, "level": self.level, "index": self.index}
        if self.M_table is not None:
            out["M_table"] = [[r, u, M] for (r, u), M in sorted(self.M_table.items())]
        return out

    @classmethod
    def from_json(cls, obj):
        table = obj.get("M_table")
        if table is not None:
            table = {(r, u): M for r, u, M in table}
        return cls(obj["kind"], obj["level"], obj["index"], table)


def load_mtable(path, kind="custom"):
    """Read an M-table file: header ``K <level> INDEX <index>`` then lines
    ``t_residue u M``.  Blank lines and ``#`` comments are skipped."""
    entries = {}
    header = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if header is None:
                if len(parts) != 4 or parts[0].upper() != "K" or parts[2].upper() != "INDEX":
                    raise MTableError(f"{path}:{lineno}: expected header 'K <level> INDEX <index>'")
                header = (int(parts[1]), int(parts[3]))
                continue
            if len(parts) != 3:
                raise MTableError(f"{path}:{lineno}: expected 't_residue u M'")
            r, u, M = (int(x) for x in parts)
            key = (r % header[0] ** 2, u)
            if key in entries:
                raise MTableError(f"{path}:{lineno}: duplicate entry {key}")
            entries[key] = M
    if header is None:
        raise MTableError(f"{path}: missing header")
    return SubgroupDescriptor(kind, header[0], header[1], entries, source=str(path))


def M_gamma(sub, t, u):
    if sub.kind == "full":
        return 1
    K2 = sub.level ** 2
    key = (t % K2, u)
    if sub.kind == "custom":
        return sub.M_table.get(key, 0) if sub.M_table is not None else 0
    if sub.saturated(t, u):
        return sub.index
    if sub.M_table is None or key not in sub.M_table:
        raise UnknownMError(
            f"M({t},{u}) unknown for {sub.kind}({sub.level}): no table entry and "
            f"saturation does not apply")
    return sub.M_table[key]


@dataclass(frozen=True)
class DivisorRow:
    u: int
    d: int
    h: int
    eps_d: PellUnit
    j: int
    M: int

    @property
    def l_value(self):
        """L(1, chi_d) through the class number formula."""
        return self.h * self.eps_d.log() / sqrt(self.d)


@dataclass(frozen=True)
class TraceRecord:
    t: int
    U: int
    rows: tuple
    mhat_coeff: Fraction
    m: int = None
    N: float = field(init=False, compare=False)
    length: float = field(init=False, compare=False)

    def __post_init__(self):
        _, N, length = norm_of(self.t)
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "length", length)

    @property
    def log_eps(self):
        return 0.5 * self.length


def norm_of(t):
    """N(t) = ((t + sqrt(t^2-4))/2)^2 as an exact surd (p, q, den) meaning
    (p + q sqrt(t^2-4))/den, plus float N and length log N."""
    if t < 3:
        raise ValueError(f"trace must be >= 3, got {t}")
    D = t * t - 4
    # ((t + sqrt D)/2)^2 = (t^2 - 2 + t sqrt D)/2
    exact = (t * t - 2, t, 2)
    # log eps(t) = acosh(t/2), stable for large t
    from math import acosh
    length = 2.0 * acosh(t / 2)
    N = (t * t - 2 + t * sqrt(D)) / 2
    return exact, N, length


def norm_mp(t, digits=30):
    """High-precision N(t) and length, for export."""
    with mpmath.workdps(digits):
        D = mpmath.mpf(t * t - 4)
        N = (t * t - 2 + t * mpmath.sqrt(D)) / 2
        return N, mpmath.log(N)


def _power_index(eps, t, u):
    """j with eps^j = (t + u sqrt d)/2; hard error if none."""
    # eps^j grows like eps.p^j; j <= log(t)/log(eps) + 1
    bound = int(log(t) / eps.log()) + 2
    for j in range(1, bound + 1):
        p, q = unit_power(eps, j)
        if p == t:
            if q != u:
                raise AssertionError(f"eps({eps.d})^{j} has trace {t} but q={q} != u={u}")
            return j
        if p > t:
            break
    raise AssertionError(f"eps(t={t}) is not a power of the fundamental unit of d={eps.d}")


def _rows_for(sub, t, h_of):
    rows = []
    for u in admissible_divisors(t):
        d = (t * t - 4) // (u * u)
        eps = pell4_fundamental(d)
        j = _power_index(eps, t, u)
        rows.append(DivisorRow(u, d, h_of(d), eps, j, M_gamma(sub, t, u)))
    return tuple(rows)


def _record(t, rows):
    coeff = sum((Fraction(r.M * r.h, r.j) for r in rows), Fraction(0))
    return TraceRecord(t, rows[-1].u, rows, coeff)


def trace_record(sub, t):
    """Per-trace arithmetic data; m is left unset."""
    if t < 3:
        raise ValueError(f"trace must be >= 3, got {t}")
    from .forms import class_number
    return _record(t, _rows_for(sub, t, class_number))


def deflate(records, t, ancestors=None):
    """m(t) = mhat_coeff(t) - sum m(t0)/l over power ancestors.  ``records``
    maps trace -> already-deflated TraceRecord."""
    rec = records[t]
    if ancestors is None:
        ancestors = power_ancestors(t)
    value = rec.mhat_coeff
    for t0, l in ancestors:
        m0 = records[t0].m
        if m0 is None:
            raise ValueError(f"ancestor t0={t0} of t={t} not deflated yet")
        value -= Fraction(m0, l)
    if value.denominator != 1 or value < 0:
        raise IntegralityError(f"m({t}) = {value} is not a nonnegative integer")
    return int(value)


def power_ancestor_map(t_max):
    """t -> [(t0, l), ...] for every t <= t_max that is a proper power trace."""
    out = {}
    t0 = 3
    while t0 * t0 - 2 <= t_max:
        prev, cur, l = t0, t0 * t0 - 2, 2
        while cur <= t_max:
            out.setdefault(cur, []).append((t0, l))
            prev, cur, l = cur, t0 * cur - prev, l + 1
        t0 += 1
    for v in out.values():
        v.sort()
    return out


@dataclass(frozen=True)
class SpectrumTable:
    subgroup: SubgroupDescriptor
    t_max: int
    records: MappingProxyType

    def __iter__(self):
        return iter(self.records[t] for t in range(3, self.t_max + 1))

    def __len__(self):
        return self.t_max - 2

    def restrict(self, t_max):
        if t_max > self.t_max:
            raise ValueError(f"table only covers t <= {self.t_max}")
        recs = {t: self.records[t] for t in range(3, t_max + 1)}
        return SpectrumTable(self.subgroup, t_max, MappingProxyType(recs))

    @property
    def coverage(self):
        """Largest x for which power sums over N < x are complete."""
        return norm_of(self.t_max + 1)[1]


class TableBuildError(RuntimeError):
    pass


def build_table(sub, t_max, workers=None):
    """Parallel class numbers, then a sequential deflation pass."""
    if t_max < 3:
        raise ValueError("t_max must be >= 3")
    from ._jit import set_workers
    set_workers(workers)
    ts = range(3, t_max + 1)
    us = {t: admissible_divisors(t) for t in ts}
    ds = sorted({(t * t - 4) // (u * u) for t in ts for u in us[t]})
    logger.info("class numbers for %d discriminants (t <= %d)", len(ds), t_max)
    h = dict(zip(ds, class_numbers(ds)))
    eps = {}
    pending = {}
    for t in ts:
        try:
            rows = []
            for u in us[t]:
                d = (t * t - 4) // (u * u)
                e = eps.get(d)
                if e is None:
                    e = eps[d] = pell4_fundamental(d)
                rows.append(DivisorRow(u, d, h[d], e, _power_index(e, t, u), M_gamma(sub, t, u)))
            pending[t] = _record(t, tuple(rows))
        except Exception as exc:
            raise TableBuildError(f"t={t}: {exc}") from exc
    anc = power_ancestor_map(t_max)
    done = {}
    for t in ts:
        try:
            done[t] = pending[t]
            done[t] = replace(pending[t], m=deflate(done, t, anc.get(t, [])))
        except Exception as exc:
            raise TableBuildError(f"t={t}: {exc}") from exc
    return SpectrumTable(sub, t_max, MappingProxyType(done))
