import math
from types import MappingProxyType

import mpmath
import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from lengthspec.analysis import (
    CoverageError, bound_report, estimate_c, li_k, pi_k, pi_k_series, psi_bounds, psi_k,
    psi_series,
)
from lengthspec.spectrum import SpectrumTable, SubgroupDescriptor, norm_of, trace_record

N3 = norm_of(3)[1]


def test_li_0_and_1():
    assert li_k(100.0, 0) == 98.0
    ref = float(mpmath.li(1e6) - mpmath.li(2))
    assert li_k(1e6, 1) == pytest.approx(ref, rel=1e-12)
    assert li_k(2.0, 3) == 0.0
    with pytest.raises(ValueError):
        li_k(1.5, 1)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("x", [10.0, 1e4, 1e9])
def test_li_integration_by_parts(k, x):
    # li_k = [t / log^k t]_2^x + k li_{k+1}
    boundary = x / math.log(x) ** k - 2 / math.log(2) ** k
    assert li_k(x, k) == pytest.approx(boundary + k * li_k(x, k + 1), rel=1e-12)


def test_li_monotone_and_ordered():
    xs = np.geomspace(math.e ** 2, 1e10, 40)
    for k in range(4):
        vals = [li_k(x, k) for x in xs]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert all(li_k(x, k + 1) < v for x, v in zip(xs, vals))


def test_pi_examples(full300):
    assert pi_k(full300, 0, 100) == 8
    assert pi_k(full300, 1, 100) == 22
    assert pi_k(full300, 2, 100) == 1 + 4 + 4 + 9 + 4 + 16 + 4 + 36


def test_pi_zero_at_first_norm(full300):
    for k in range(3):
        assert pi_k(full300, k, N3) == 0
        assert pi_k(full300, k, N3 * (1 + 1e-12)) == 1


@given(st.lists(st.floats(2.0, 8.0e4), min_size=2, max_size=30), st.integers(0, 3))
def test_pi_nondecreasing(full300, xs, k):
    xs = sorted(xs)
    vals = pi_k_series(full300, k, xs)
    assert vals == [pi_k(full300, k, x) for x in xs]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_coverage_error(full300):
    with pytest.raises(CoverageError):
        pi_k(full300, 1, 1e6)
    with pytest.raises(CoverageError):
        psi_k(full300, 1, 301)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_psi_variant_ratio(full300, k):
    for T in (10, 50, 300):
        ratio = psi_k(full300, k, T, "mhat-derived") / psi_k(full300, k, T, "lemma-literal")
        assert ratio == pytest.approx(2 ** k, rel=1e-4)


def test_psi_first_term(full300):
    # only t = 3: L(1, chi_5) = 2 log(golden) / sqrt 5
    L5 = 2 * math.log((1 + math.sqrt(5)) / 2) / math.sqrt(5)
    assert psi_k(full300, 1, 3) == pytest.approx(L5, rel=1e-14)
    assert psi_series(full300, 2, [3, 4])[0] == pytest.approx(L5 ** 2, rel=1e-14)
    with pytest.raises(ValueError):
        psi_k(full300, 1, 10, "other")


def test_psi_bounds_full_group(full300):
    lo, hi = psi_bounds(1, 1, 1, 300, full300)
    assert lo == pytest.approx(hi) and hi == pytest.approx(psi_k(full300, 1, 300))


@settings(max_examples=25, suppress_health_check=list(HealthCheck))
@given(st.sampled_from([2, 3]), st.integers(1, 12), st.integers(1, 3),
       st.dictionaries(st.tuples(st.integers(0, 8), st.integers(1, 12)), st.integers(0, 12), max_size=40),
       st.integers(20, 150))
def test_psi_bounds_enclose_custom(full300, K, index, k, raw, T):
    K2 = K * K
    table = {(r % K2, u): min(M, index) for (r, u), M in raw.items()}
    for r in range(K2):
        for u in range(K, T + 1, K):
            if r in (2 % K2, (-2) % K2):
                table[(r, u)] = index
    sub = SubgroupDescriptor("custom", K, index, table)
    # arbitrary tables need not deflate to integers; Psi only reads the rows
    recs = MappingProxyType({t: trace_record(sub, t) for t in range(3, T + 1)})
    psi = psi_k(SpectrumTable(sub, T, recs), k, T)
    lo, hi = psi_bounds(K, index, k, T, full300)
    assert lo <= psi * (1 + 1e-12) and psi <= hi * (1 + 1e-12)


def test_estimate_c(full2000):
    x = full2000.coverage
    rep = estimate_c(full2000, 1, np.geomspace(x / 16, x, 9))
    assert 0.9 <= rep.c <= 1.1
    assert rep.stability < 0.05
    assert rep.notes and len(rep.rows()) == 9
    with pytest.raises(ValueError):
        estimate_c(full2000, 1, [100, 200, 300])
    with pytest.raises(ValueError):
        estimate_c(full2000, 1, np.geomspace(5, 500, 6))


def test_bound_report(full300):
    rep = bound_report(full300)
    assert rep["max_m_over_N34"]["value"] < 1
    assert math.isfinite(rep["max_m_over_sqrtN_logN"]["value"])
    assert rep["min_m_over_N045_t_ge_10"]["t"] >= 10
    assert 0.4 < rep["slope_log_mhat_vs_logN"] < 0.6
    assert rep["t_max"] == 300


def test_psi_mhat_first_term(full300):
    L5 = 2 * math.log((1 + math.sqrt(5)) / 2) / math.sqrt(5)
    assert psi_k(full300, 1, 3, "mhat-derived") == pytest.approx(2 * L5, rel=1e-14)
    assert round(psi_k(full300, 1, 3, "mhat-derived"), 4) == 0.8608


def test_psi_empty_range(full300):
    assert psi_k(full300, 1, 2) == 0.0
