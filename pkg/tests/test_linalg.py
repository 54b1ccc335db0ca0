import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from relbrauer.errors import DimensionMismatch
from relbrauer.linalg import (
    Lattice,
    UnitEchelon,
    UnitTriangular,
    _determinant_mod,
    covolume,
    det,
    hnf,
    independent_rows,
    is_power_of,
    is_unimodular,
    kernel_lattice,
    lattice_compare,
    lattice_intersect,
    lattice_sum,
    matmul,
    saturation,
    snf,
    snf_diagonal,
    solve_in_span,
    to_sparse,
)

small_ints = st.integers(-6, 6)


def matrices(max_rows=5, max_cols=5):
    return st.integers(1, max_cols).flatmap(
        lambda n: st.lists(st.lists(small_ints, min_size=n, max_size=n), min_size=1, max_size=max_rows))


def is_hnf(h):
    last = -1
    seen_zero = False
    for row in h:
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            seen_zero = True
            continue
        if seen_zero:
            return False
        j = nz[0]
        if j <= last or row[j] <= 0:
            return False
        last = j
    for i, row in enumerate(h):
        nz = [j for j, x in enumerate(row) if x]
        if nz:
            j, pivot = nz[0], row[nz[0]]
            if any(not 0 <= h[k][j] < pivot for k in range(i)):
                return False
    return True


def gram_det(rows):
    """Covolume of a full-rank row lattice of Z^n from float determinants."""
    a = np.array(rows, dtype=float)
    return round(abs(np.linalg.det(a @ a.T)) ** 0.5)


def test_hnf_examples():
    h, u = hnf([[1, 0], [0, 1]])
    assert h == [[1, 0], [0, 1]]
    h, u = hnf([[2, 4], [1, 3]])
    assert h == [[1, 1], [0, 2]]
    assert matmul(u, [[2, 4], [1, 3]]) == h
    h, u = hnf([[0, 0], [0, 0]])
    assert h == [[0, 0], [0, 0]] and is_unimodular(u)


def test_hnf_2x2_exhaustive_oracle():
    # the HNF of a nonsingular 2x2 matrix is [[a, b], [0, d]] with a = gcd of the first column,
    # a d = |det| and 0 <= b < d; b is pinned down by membership of both rows in the lattice
    vals = range(-3, 4)
    for m in ([[x, y], [z, w]] for x in vals for y in vals for z in vals for w in vals):
        D = abs(m[0][0] * m[1][1] - m[0][1] * m[1][0])
        if D == 0:
            continue
        h, u = hnf(m)
        a = math.gcd(m[0][0], m[1][0])
        assert h[0][0] == a and h[1][0] == 0 and a * h[1][1] == D and 0 <= h[0][1] < h[1][1]
        assert matmul(u, m) == h and is_unimodular(u)


@given(matrices())
@settings(max_examples=150, deadline=None)
def test_hnf_properties(a):
    h, u = hnf(a)
    assert matmul(u, a) == h
    assert is_unimodular(u)
    assert is_hnf(h)


def test_snf_examples():
    assert snf([[2, 0], [0, 3]])[0] == [[1, 0], [0, 6]]
    assert snf([[1, 0], [0, 1]])[0] == [[1, 0], [0, 1]]
    assert snf([[2, 0], [0, 2]])[0] == [[2, 0], [0, 2]]
    assert snf_diagonal([[0, 0], [0, 0]]) == []


@given(matrices(4, 4))
@settings(max_examples=150, deadline=None)
def test_snf_properties(a):
    s, u, v = snf(a)
    assert matmul(matmul(u, a), v) == s
    assert is_unimodular(u) and is_unimodular(v)
    d = [s[i][i] for i in range(min(len(s), len(s[0])))]
    nz = [x for x in d if x]
    assert all(x > 0 for x in nz)
    assert all(nz[i + 1] % nz[i] == 0 for i in range(len(nz) - 1))
    assert snf_diagonal(a) == nz
    assert all(s[i][j] == 0 for i in range(len(s)) for j in range(len(s[0])) if i != j)


def test_kernel_examples():
    k = kernel_lattice([[1], [1]])
    assert k.rank == 1 and k.basis in ([[1, -1]], [[-1, 1]])
    assert kernel_lattice([[1, 0], [0, 1]]).rank == 0


@given(matrices())
@settings(max_examples=150, deadline=None)
def test_kernel_is_saturated_left_kernel(a):
    k = kernel_lattice(a)
    m, n = len(a), len(a[0])
    A = np.array(a, dtype=object)
    for row in k.basis:
        assert not any(np.array(row, dtype=object) @ A)
    assert k.rank == m - np.linalg.matrix_rank(np.array(a, dtype=float))
    assert saturation(k) == k


def test_lattice_operations():
    Z2 = Lattice.full(2)
    a = Lattice.from_generators(2, [[2, 0]])
    b = Lattice.from_generators(2, [[0, 3]])
    assert lattice_sum(a, Lattice.zero(2)) == a
    assert lattice_intersect(a, Z2) == a
    assert lattice_compare(lattice_sum(a, b), Z2).index == 6
    assert lattice_compare(Z2, Z2).equal and lattice_compare(Z2, Z2).index == 1
    two = Lattice.from_generators(2, [[2, 0], [0, 2]])
    cmp = lattice_compare(two, Z2)
    assert cmp.index == 4 and cmp.saturation_equal and cmp.a_in_b and not cmp.equal
    with pytest.raises(DimensionMismatch):
        lattice_sum(a, Lattice.full(3))


@given(matrices(4, 3), matrices(4, 3))
@settings(max_examples=80, deadline=None)
def test_intersection_membership(a, b):
    n = min(len(a[0]), len(b[0]))
    A = Lattice.from_generators(n, [r[:n] for r in a])
    B = Lattice.from_generators(n, [r[:n] for r in b])
    C = lattice_intersect(A, B)
    for r in C.sparse_rows:
        assert A.contains(r) and B.contains(r)
    assert lattice_compare(C, A).a_in_b
    # the rational spans meet in a space of dimension rank A + rank B - rank(A + B)
    assert C.rank == A.rank + B.rank - lattice_sum(A, B).rank


def test_solve_in_span():
    gens = [[1, 2, 0], [0, 1, 1]]
    assert solve_in_span(gens, [1, 2, 0]) == [1, 0]
    assert solve_in_span(gens, [0, 0, 0]) == [0, 0]
    assert solve_in_span(gens, [1, 3, 1]) == [1, 1]
    assert solve_in_span(gens, [0, 0, 1]) is None


@given(st.integers(1, 6), st.integers(0, 10 ** 6))
@settings(max_examples=200, deadline=None)
def test_covolume_matches_hnf(n, seed):
    rng = random.Random(seed)
    m = n + rng.randrange(0, 4)
    rows = [[rng.choice([0, 0, 1, -1, 2, 3, -4]) for _ in range(n)] for _ in range(m)]
    h, _ = hnf(rows)
    pivots = [r for r in h if any(r)]
    expect = None
    if len(pivots) == n:
        expect = 1
        for i, r in enumerate(pivots):
            expect *= r[i]
    assert covolume([to_sparse(r) for r in rows], n) == expect


@given(st.integers(1, 5), st.integers(0, 10 ** 6))
@settings(max_examples=200, deadline=None)
def test_determinant_mod_matches_hnf(n, seed):
    rng = random.Random(seed)
    rows = [{j: rng.randrange(-9, 10) for j in range(n) if rng.random() < 0.7} for _ in range(n + 2)]
    rows += [{i: rng.choice([1, 2, 3, 4, 8, 9])} for i in range(n)]  # full rank
    index = gram_det([r for r in hnf([[r.get(j, 0) for j in range(n)] for r in rows])[0] if any(r)])
    # any multiple of the index is a valid modulus
    assert _determinant_mod(rows, n, index * rng.choice([1, 2, 3, 12])) == index


def test_independent_rows():
    vecs = [{0: 1, 1: 1}, {0: 2, 1: 2}, {1: 1}, {0: 5}]
    assert independent_rows(vecs) == [0, 2]
    assert independent_rows(vecs, limit=1) == [0]


def test_unit_echelon_covolume():
    ue = UnitEchelon()
    for v in [{0: 1, 1: 2}, {1: 2, 2: 2}, {2: 4}]:
        ue.add(v)
    assert ue.covolume(3) == abs(det([[1, 2, 0], [0, 2, 2], [0, 0, 4]]))
    full = UnitEchelon()
    for v in [{0: 3, 1: 1}, {0: 2}, {1: 5}]:
        full.add(v)
    assert full.covolume(2) == 1


@given(st.integers(0, 10 ** 6))
@settings(max_examples=100, deadline=None)
def test_unit_triangular_certificates(seed):
    rng = random.Random(seed)
    n = rng.randrange(2, 7)
    gens = [{j: rng.choice([0, 1, -1, 2]) for j in range(n)} for _ in range(rng.randrange(1, 6))]
    gens = [{k: x for k, x in g.items() if x} for g in gens]
    tri = UnitTriangular()
    for t, g in enumerate(gens):
        tri.offer(g, t) or tri.add_reduced(g, {t: 1})
    for c, row in tri.rows.items():
        assert min(row) == c and row[c] == 1
        expand = {}
        for t, q in tri.trans[c].items():
            for k, x in gens[t].items():
                expand[k] = expand.get(k, 0) + q * x
        assert {k: x for k, x in expand.items() if x} == row
    coeffs = [rng.randrange(-3, 4) for _ in gens]
    target = {}
    for q, g in zip(coeffs, gens):
        for k, x in g.items():
            target[k] = target.get(k, 0) + q * x
    rest, combo = tri.reduce(target, track=True)
    if not rest:
        back = {}
        for t, q in combo.items():
            for k, x in gens[t].items():
                back[k] = back.get(k, 0) + q * x
        assert {k: x for k, x in back.items() if x} == {k: x for k, x in target.items() if x}


def test_is_power_of():
    assert is_power_of(1, 2) and is_power_of(27, 3) and not is_power_of(6, 2) and not is_power_of(0, 2)
