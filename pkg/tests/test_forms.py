import math
import random

import pytest
from hypothesis import given, strategies as st

from lengthspec.forms import (
    NotReducedError, QuadForm, class_number, class_numbers, cycles, is_reduced, neighbor,
    reduced_primitive_forms,
)

discs = st.integers(5, 5000).filter(lambda d: d % 4 in (0, 1) and math.isqrt(d) ** 2 != d)


@pytest.mark.parametrize("d,h", [(5, 1), (8, 1), (12, 2), (21, 2), (32, 2), (45, 2), (60, 4), (77, 2), (96, 4)])
def test_class_number_examples(d, h):
    assert class_number(d) == h
    assert len(cycles(d)) == h


def test_kernel_matches_python_cycles():
    ds = [d for d in range(5, 3000) if d % 4 in (0, 1) and math.isqrt(d) ** 2 != d]
    assert class_numbers(ds) == [len(cycles(d)) for d in ds]


def test_batch_equals_single_large():
    rng = random.Random(3)
    ds = []
    while len(ds) < 40:
        d = rng.randint(10**6, 10**8)
        if d % 4 in (0, 1) and math.isqrt(d) ** 2 != d:
            ds.append(d)
    assert class_numbers(ds) == [class_number(d) for d in ds]


def test_neighbor_example():
    f = QuadForm(1, 1, -1)
    assert is_reduced(f)
    g = neighbor(f)
    assert g == QuadForm(-1, 1, 1)
    assert neighbor(g) == f


def test_neighbor_rejects_unreduced():
    with pytest.raises(NotReducedError):
        neighbor(QuadForm(1, 1, -5))


def test_reduced_forms_d12():
    fs = reduced_primitive_forms(12)
    assert all(is_reduced(f) and f.disc == 12 and f.primitive for f in fs)
    assert set(fs) == {QuadForm(1, 2, -2), QuadForm(-1, 2, 2), QuadForm(2, 2, -1), QuadForm(-2, 2, 1)}


@given(discs)
def test_neighbor_preserves_and_closes(d):
    forms = reduced_primitive_forms(d)
    for f in forms:
        g = neighbor(f)
        assert g.disc == d and g.primitive and is_reduced(g)
        steps, h = 1, g
        while h != f:
            h = neighbor(h)
            steps += 1
            assert steps <= len(forms)


@given(discs, st.randoms(use_true_random=False))
def test_cycle_partition_order_independent(d, rnd):
    cs = cycles(d)
    flat = [f for c in cs for f in c]
    assert sorted(flat, key=lambda f: (f.a, f.b)) == reduced_primitive_forms(d)
    assert len(set(flat)) == len(flat)
    # rebuild from a shuffled start order: same partition
    forms = reduced_primitive_forms(d)
    rnd.shuffle(forms)
    seen, parts = set(), set()
    for f in forms:
        if f in seen:
            continue
        cyc = [f]
        g = neighbor(f)
        while g != f:
            cyc.append(g)
            g = neighbor(g)
        seen.update(cyc)
        parts.add(frozenset(cyc))
    assert parts == {frozenset(c) for c in cs}
