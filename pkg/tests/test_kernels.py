from __future__ import annotations

import random
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperfin import kernels
from hyperfin.graphs import random_functional_graph

BACKENDS = kernels.backends()


@pytest.fixture(params=sorted(BACKENDS))
def impl(request):
    return BACKENDS[request.param]


def brute_recurrent(succ, mask):
    """Oracle: direct reading of independence and 4-step recurrence."""
    n = len(succ)
    indep = all(not (mask[x] and succ[x] >= 0 and mask[succ[x]]) for x in range(n))
    rec = True
    for x in range(n):
        z, hit = x, False
        for _ in range(4):
            if z < 0 or mask[z]:
                hit = True
                break
            z = succ[z]
        rec = rec and hit
    return indep, rec


def brute_colorings(succ):
    n = len(succ)
    for cols in product(range(3), repeat=n):
        if all(cols[x] != cols[y] for x, y in enumerate(succ) if y >= 0):
            yield cols


def random_succ(rng: random.Random, n: int, fanin: int = 3) -> np.ndarray:
    return np.asarray(random_functional_graph(n, fanin, rng).succ, dtype=np.int64)


def test_cython_backend_available():
    # the compiled core is part of the package; a missing build is a packaging bug
    assert "cython" in BACKENDS, "compiled extension did not build"
    assert kernels.BACKEND in BACKENDS


def test_three_color_is_proper(impl):
    rng = random.Random(1)
    for _ in range(200):
        succ = random_succ(rng, rng.randint(2, 60))
        col = impl.three_color(succ)
        assert set(col.tolist()) <= {0, 1, 2}
        assert all(col[x] != col[y] for x, y in enumerate(succ))


def test_three_color_handles_terminals(impl):
    col = impl.three_color(np.asarray([1, -1, 1], dtype=np.int64))
    assert col[1] == 0 and col[0] != col[1] and col[2] != col[1]


def test_three_color_rejects_fixed_point(impl):
    with pytest.raises(ValueError):
        impl.three_color(np.asarray([0, 0], dtype=np.int64))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_recurrent_set_all_colorings_small(impl, n):
    choices = [[y for y in range(n) if y != x] for x in range(n)]
    for f in product(*choices):
        succ = np.asarray(f, dtype=np.int64)
        for cols in brute_colorings(f):
            mask = impl.recurrent_mask(succ, np.asarray(cols, dtype=np.int64))
            assert brute_recurrent(f, mask.tolist()) == (True, True)


def test_check_recurrent_agrees_with_oracle(impl):
    rng = random.Random(2)
    for _ in range(300):
        n = rng.randint(2, 12)
        succ = random_succ(rng, n).tolist()
        mask = [rng.random() < 0.3 for _ in range(n)]
        got = impl.check_recurrent(np.asarray(succ, dtype=np.int64), np.asarray(mask, dtype=np.uint8))
        assert tuple(got) == brute_recurrent(succ, mask)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_exhaustive_recurrence(impl, n):
    maps, colorings, failures = impl.exhaustive_recurrence(n)
    assert maps == (n - 1) ** n
    assert failures == 0
    if n >= 2:
        assert colorings > 0


def test_exhaustive_counts_match_brute(impl):
    n = 4
    brute = sum(1 for f in product(*[[y for y in range(n) if y != x] for x in range(n)]) for _ in brute_colorings(f))
    assert impl.exhaustive_recurrence(n)[1] == brute


def test_contraction_class_sizes(impl):
    rng = random.Random(3)
    for _ in range(300):
        d = rng.randint(1, 4)
        succ = random_succ(rng, rng.randint(2, 150), d)
        col = impl.three_color(succ)
        mask = impl.recurrent_mask(succ, col)
        cls, k, _ = impl.contraction_classes(succ, mask)
        sizes = np.bincount(cls, minlength=k)
        assert sizes.min() >= 2
        assert sizes.max() <= 1 + d + d * d + d**3


def test_quotient_succ_rejects_split_class(impl):
    # class 0 = {0, 3} leaves to class 1 and to class 2
    succ = np.asarray([1, 2, 0, 2], dtype=np.int64)
    cls = np.asarray([0, 1, 2, 0], dtype=np.int64)
    with pytest.raises(ValueError):
        impl.quotient_succ(succ, cls, 3)


def test_component_labels_numbered_by_min(impl):
    labels, k = impl.component_labels(6, np.asarray([5, 1], dtype=np.int64), np.asarray([3, 2], dtype=np.int64))
    assert k == 4
    assert labels.tolist() == [0, 1, 1, 2, 3, 2]


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled extension not built")
@given(seed=st.integers(0, 10**6), n=st.integers(2, 120), fanin=st.integers(1, 4))
def test_backends_agree(seed, n, fanin):
    py, cy = BACKENDS["python"], BACKENDS["cython"]
    succ = random_succ(random.Random(seed), n, fanin)
    col_p, col_c = py.three_color(succ), cy.three_color(succ)
    assert col_p.tolist() == col_c.tolist()
    m_p, m_c = py.recurrent_mask(succ, col_p), cy.recurrent_mask(succ, col_c)
    assert m_p.tolist() == m_c.tolist()
    assert tuple(py.check_recurrent(succ, m_p)) == tuple(cy.check_recurrent(succ, m_c))
    cp, kp, jp = py.contraction_classes(succ, m_p)
    cc, kc, jc = cy.contraction_classes(succ, m_c)
    assert (cp.tolist(), kp, jp.tolist()) == (cc.tolist(), kc, jc.tolist())
    assert py.quotient_succ(succ, cp, kp).tolist() == cy.quotient_succ(succ, cc, kc).tolist()
    us, vs = np.arange(n, dtype=np.int64), succ
    lp, np_ = py.component_labels(n, us, vs)
    lc, nc = cy.component_labels(n, us, vs)
    assert (lp.tolist(), np_) == (lc.tolist(), nc)
