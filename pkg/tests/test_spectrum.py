import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

import lengthspec.spectrum as spectrum
from lengthspec.arith import cheb_trace
from lengthspec.lfunc import l_value_direct
from lengthspec.spectrum import (
    IntegralityError, MTableError, SubgroupDescriptor, TableBuildError, UnknownMError, M_gamma,
    build_table, deflate, load_mtable, norm_of, power_ancestor_map, trace_record,
)

FULL = SubgroupDescriptor()

# m(t) for the modular group, t = 3..20, frozen from the RL-word enumeration
KNOWN_M = [1, 2, 2, 3, 2, 4, 2, 6, 3, 4, 4, 6, 4, 6, 4, 7, 4, 10]


def test_trace_3():
    rec = trace_record(FULL, 3)
    assert len(rec.rows) == 1
    r = rec.rows[0]
    assert (r.u, r.d, r.h, r.j, r.M) == (1, 5, 1, 1, 1)
    assert (r.eps_d.p, r.eps_d.q) == (3, 1)
    assert rec.mhat_coeff == 1
    assert deflate({3: rec}, 3) == 1


def test_trace_6_two_rows():
    rec = trace_record(FULL, 6)
    assert [(r.u, r.d, r.h, r.j) for r in rec.rows] == [(1, 32, 2, 1), (2, 8, 1, 1)]
    assert rec.U == 2 and rec.mhat_coeff == 3


def test_trace_7_power_of_trace_3():
    tab = build_table(FULL, 7)
    rec = tab.records[7]
    assert [(r.u, r.d, r.h, r.j) for r in rec.rows] == [(1, 45, 2, 1), (3, 5, 1, 2)]
    assert rec.mhat_coeff == Fraction(5, 2)
    # the square of the trace-3 class contributes 1/2
    assert rec.m == 2


def test_small_multiplicities(full300):
    assert [full300.records[t].m for t in range(3, 21)] == KNOWN_M


def test_integrality_and_class_count(full2000):
    anc = power_ancestor_map(2000)
    for rec in full2000:
        assert isinstance(rec.m, int) and rec.m >= 0
        # every class of trace t is a power of exactly one primitive class
        assert sum(r.h for r in rec.rows) == rec.m + sum(full2000.records[t0].m for t0, _ in anc.get(rec.t, []))


def test_mhat_class_number_formula(full300):
    for rec in full300:
        lhs = 2 * rec.log_eps * float(rec.mhat_coeff)
        rhs = sum(2 * math.sqrt(r.d) * l_value_direct(r.d) for r in rec.rows)
        assert lhs == pytest.approx(rhs, rel=1e-4)


def test_norms_monotone_and_recover_trace():
    prev = 0.0
    for t in range(3, 3000):
        (p, q, den), N, length = norm_of(t)
        assert N > prev
        prev = N
        assert length == pytest.approx(math.log(N), rel=1e-14)
        # exact: N + 1/N = ((p + q r)^2 + (p - q r)^2) / (den^2 (p^2 - q^2 D)/den^2) = t^2 - 2
        D = t * t - 4
        assert p * p - q * q * D == den * den  # N has norm 1
        assert 2 * p == den * (t * t - 2)      # N + 1/N = t^2 - 2, so sqrt(N) + 1/sqrt(N) = t
    with mpmath.workdps(40):
        N = spectrum.norm_mp(1000, 40)[0]
        assert mpmath.nint(mpmath.sqrt(N) + 1 / mpmath.sqrt(N)) == 1000


def test_norm_of_values():
    assert norm_of(3)[1] == pytest.approx((7 + 3 * math.sqrt(5)) / 2)
    assert norm_of(3)[2] == pytest.approx(1.9248473002384139)
    with pytest.raises(ValueError):
        norm_of(2)


def test_m_gamma_full_and_custom():
    assert M_gamma(FULL, 10, 2) == 1
    assert M_gamma(SubgroupDescriptor("custom", 2, 3), 10, 2) == 0
    sub = SubgroupDescriptor("custom", 2, 3, {(2, 2): 3, (3, 1): 1})
    assert M_gamma(sub, 6, 2) == 3 and M_gamma(sub, 7, 1) == 1 and M_gamma(sub, 7, 3) == 0


@given(st.integers(1, 6), st.integers(1, 12), st.integers(3, 400), st.integers(1, 40))
def test_saturation_rule(K, index, t, u):
    sub = SubgroupDescriptor("principal", K, index)
    K2 = K * K
    if t % K2 in (2 % K2, (-2) % K2) and u % K == 0:
        assert M_gamma(sub, t, u) == index
    else:
        with pytest.raises(UnknownMError):
            M_gamma(sub, t, u)


def test_descriptor_validation():
    with pytest.raises(ValueError):
        SubgroupDescriptor("nope")
    with pytest.raises(ValueError):
        SubgroupDescriptor("full", 2, 1)
    with pytest.raises(MTableError):
        SubgroupDescriptor("custom", 2, 3, {(5, 1): 1})
    with pytest.raises(MTableError):
        SubgroupDescriptor("custom", 2, 3, {(1, 1): 4})


def test_load_mtable(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# level 2\nK 2 INDEX 6\n2 2 6  # saturated\n3 1 2\n\n5 1 1\n")
    sub = load_mtable(p, kind="gamma0")
    assert (sub.kind, sub.level, sub.index) == ("gamma0", 2, 6)
    assert dict(sub.M_table) == {(2, 2): 6, (3, 1): 2, (1, 1): 1}
    assert SubgroupDescriptor.from_json(sub.to_json()) == SubgroupDescriptor("gamma0", 2, 6, sub.M_table)


@pytest.mark.parametrize("text", ["2 2 6\n", "K 2 INDEX 6\n2 2\n", "K 2 INDEX 6\n1 1 1\n5 1 1\n", ""])
def test_load_mtable_errors(tmp_path, text):
    p = tmp_path / "bad.txt"
    p.write_text(text)
    with pytest.raises(MTableError):
        load_mtable(p)


def test_custom_empty_table_all_zero():
    tab = build_table(SubgroupDescriptor("custom", 2, 6), 50)
    assert all(r.m == 0 for r in tab)


def test_unknown_m_names_trace():
    with pytest.raises(TableBuildError, match=r"t=3: M\(3,1\) unknown"):
        build_table(SubgroupDescriptor("gamma0", 2, 3), 10)


def test_restrict_and_coverage(full300):
    small = full300.restrict(100)
    assert len(small) == 98 and small.t_max == 100
    assert small.coverage == norm_of(101)[1]
    with pytest.raises(ValueError):
        small.restrict(101)


def test_workers_do_not_change_table():
    a = build_table(FULL, 400, workers=1)
    b = build_table(FULL, 400, workers=4)
    assert [(r.m, r.mhat_coeff, r.rows) for r in a] == [(r.m, r.mhat_coeff, r.rows) for r in b]


def test_power_ancestor_map():
    anc = power_ancestor_map(100)
    assert anc[7] == [(3, 2)] and anc[18] == [(3, 3)] and anc[47] == [(3, 4), (7, 2)]
    assert all(cheb_trace(t0, l) == t for t, v in anc.items() for t0, l in v)


@dataclass(frozen=True)
class _FieldUnit:
    """Unit of norm +-1; the wrong normalization for the form automorph."""
    d: int
    p: int
    q: int

    def log(self):
        return math.log((self.p + self.q * math.sqrt(self.d)) / 2)


def _field_unit(d):
    for q in range(1, 10**6):
        for s in (-4, 4):
            p2 = d * q * q + s
            if p2 > 0 and math.isqrt(p2) ** 2 == p2:
                return _FieldUnit(d, math.isqrt(p2), q)


def _ring_power(u, k):
    p, q = 2, 0
    for _ in range(k):
        p, q = (p * u.p + u.d * q * u.q) // 2, (p * u.q + q * u.p) // 2
    return p, q


def test_wrong_normalization_signature(monkeypatch):
    monkeypatch.setattr(spectrum, "pell4_fundamental", _field_unit)
    monkeypatch.setattr(spectrum, "unit_power", _ring_power)
    rec = trace_record(FULL, 3)
    assert rec.rows[0].j == 2 and rec.mhat_coeff == Fraction(1, 2)
    with pytest.raises(IntegralityError, match=r"m\(3\) = 1/2"):
        deflate({3: rec}, 3)
