"""Rational characters of abelian sections and the linearization map f.

A section ``top/bottom`` of the ambient group is represented by a
:class:`~relbrauer.lattice.LatticeIndex`; characters of the section are stored
as functions on the elements of ``top`` (constant on ``bottom``-cosets), so
inflation is the identity on value vectors.
"""

import csv
import io
from dataclasses import dataclass
from functools import lru_cache
from math import gcd

import numpy as np

from .errors import NotACharacter, NotASubgroup
from .groups import graph_classify
from .linalg import Echelon, snf_diagonal, to_sparse


@lru_cache(maxsize=None)
def factorize(n):
    out = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return tuple(sorted(out.items()))


def euler_phi(n):
    r = n
    for q, _ in factorize(n):
        r = r // q * (q - 1)
    return r


def mobius(n):
    fac = factorize(n)
    if any(k > 1 for _, k in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def ramanujan_sum(m, a):
    """Sum of the ``a``-th powers of the primitive ``m``-th roots of unity."""
    if m < 1:
        raise ValueError("m must be positive")
    d = gcd(a, m)
    return mobius(m // d) * euler_phi(m) // euler_phi(m // d)


@dataclass(frozen=True)
class RationalCharacter:
    """Integer-valued class function on the elements ``codes`` (sorted)."""

    codes: tuple
    values: tuple

    def __post_init__(self):
        if len(self.codes) != len(self.values):
            raise ValueError("codes and values differ in length")

    def __add__(self, other):
        self._check(other)
        return RationalCharacter(self.codes, tuple(a + b for a, b in zip(self.values, other.values)))

    def __sub__(self, other):
        return self + other.scaled(-1)

    def __mul__(self, other):
        self._check(other)
        return RationalCharacter(self.codes, tuple(a * b for a, b in zip(self.values, other.values)))

    def scaled(self, k):
        return RationalCharacter(self.codes, tuple(k * a for a in self.values))

    def _check(self, other):
        if self.codes != other.codes:
            raise ValueError("characters live on different groups")

    def value(self, code):
        return dict(zip(self.codes, self.values))[code]

    def is_rational(self, spec):
        """Equal values on elements generating the same cyclic subgroup."""
        val = dict(zip(self.codes, self.values))
        p = spec.p
        for c, v in val.items():
            o = spec.element_order(c)
            for k in range(2, o):
                if k % p and val[spec.scale(c, k)] != v:
                    return False
        return True

    def to_json(self):
        return {"values": list(self.values)}


def _check_member(index, L):
    if L.spec != index.spec or L.codes not in index.position:
        raise NotASubgroup(f"{L!r} is not a subgroup of this section")


def perm_character(index, L):
    """Character of the permutation module on ``top/L``."""
    _check_member(index, L)
    top = index.top
    k = top.order // L.order
    members = L.members
    return RationalCharacter(top.codes, tuple(k if c in members else 0 for c in top.codes))


def fixed_point_character(index, L):
    """Oracle: count cosets ``tL`` fixed by each element by explicit action."""
    spec = index.spec
    top = index.top
    cosets = {}
    for t in top.codes:
        key = min(spec.add(t, x) for x in L.codes)
        cosets.setdefault(key, t)
    values = []
    for g in top.codes:
        fixed = 0
        for rep in cosets:
            image = min(spec.add(spec.add(g, rep), x) for x in L.codes)
            fixed += image == rep
        values.append(fixed)
    return RationalCharacter(top.codes, tuple(values))


@dataclass(frozen=True)
class IrreducibleItem:
    kernel: int  # canonical index of N in the section
    order: int  # m = |top/N|
    character: RationalCharacter


@dataclass(frozen=True)
class IrreducibleBasis:
    codes: tuple
    items: tuple

    def __len__(self):
        return len(self.items)

    @property
    def kernels(self):
        return [it.kernel for it in self.items]


def _cyclic_generator(spec, top, N):
    """An element of ``top`` whose image generates the cyclic group ``top/N``."""
    m = top.order // N.order
    members = N.members
    for g in top.codes:
        x, k = g, 1
        while x not in members:
            x = spec.times_p(x)
            k *= spec.p
        if k == m:
            return g
    return None


def cocyclic_indices(index):
    """Indices of subgroups ``N`` of the section with ``top/N`` cyclic."""
    spec = index.spec
    out = []
    for i, N in enumerate(index.subgroups):
        if _cyclic_generator(spec, index.top, N) is not None:
            out.append(i)
    return out


def _dlog_table(spec, top, N, g):
    m = top.order // N.order
    logs = {}
    x = 0
    for j in range(m):
        for n in N.codes:
            logs[spec.add(x, n)] = j
        x = spec.add(x, g)
    return logs


def irreducible_basis(index):
    """One irreducible rational character per subgroup with cyclic quotient."""
    cached = getattr(index, "_irr_basis", None)
    if cached is not None:
        return cached
    spec, top = index.spec, index.top
    items = []
    for i, N in enumerate(index.subgroups):
        g = _cyclic_generator(spec, top, N)
        if g is None:
            continue
        m = top.order // N.order
        logs = _dlog_table(spec, top, N, g)
        vals = tuple(ramanujan_sum(m, logs[c]) for c in top.codes)
        items.append(IrreducibleItem(i, m, RationalCharacter(top.codes, vals)))
    basis = IrreducibleBasis(top.codes, tuple(items))
    index._irr_basis = basis
    return basis


def decompose(psi, basis):
    """Multiplicities of the irreducible rational characters in ``psi``."""
    if psi.codes != basis.codes:
        raise NotACharacter("character and basis live on different groups")
    n = len(psi.codes)
    out = []
    for it in basis.items:
        s = sum(x * y for x, y in zip(psi.values, it.character.values))
        q, r = divmod(s, n * euler_phi(it.order))
        if r:
            raise NotACharacter(f"non-integral multiplicity at kernel #{it.kernel}")
        out.append(q)
    if build_character(out, basis).values != psi.values:
        raise NotACharacter("multiplicities do not reconstruct the character")
    return out


def build_character(mults, basis):
    vals = [0] * len(basis.codes)
    for k, it in zip(mults, basis.items):
        if k:
            for j, v in enumerate(it.character.values):
                vals[j] += k * v
    return RationalCharacter(basis.codes, tuple(vals))


def graph_rows(index):
    """Canonical indices of the graph subgroups of ``G x C_p``."""
    return [i for i, s in enumerate(index.subgroups) if graph_classify(s) is not None]


def f_matrix(index, columns="all"):
    """Rows: f of each basis subgroup (all, or graph subgroups only), in irreducible coordinates.

    Computed as ``(1/|L|) sum_{g in L} chi_N(g) / phi(m)`` with exact division
    checks; the result equals ``[L <= N]`` for cocyclic ``N``.
    """
    if columns not in ("all", "graphs_only"):
        raise ValueError(f"unknown column selection {columns!r}")
    rows = range(len(index)) if columns == "all" else graph_rows(index)
    return _f_block(index, tuple(rows))


def _f_block(index, rows):
    basis = irreducible_basis(index)
    top = index.top
    pos = {c: j for j, c in enumerate(top.codes)}
    chars = np.array([it.character.values for it in basis.items], dtype=np.int64).T
    member = np.zeros((len(rows), len(top.codes)), dtype=np.int64)
    for r, i in enumerate(rows):
        member[r, [pos[c] for c in index.subgroups[i].codes]] = 1
    sums = member @ chars
    denom = np.outer([index.orders[i] for i in rows], [euler_phi(it.order) for it in basis.items])
    if np.any(sums % denom):
        raise NotACharacter("non-integral entry in the f-matrix")
    return (sums // denom).astype(object).tolist()


def f_closed_form(index, columns="all"):
    """``[L <= N]`` over cocyclic ``N``; an independent route to :func:`f_matrix`."""
    rows = range(len(index)) if columns == "all" else graph_rows(index)
    cols = cocyclic_indices(index)
    return [[int(index.contains(n, i)) for n in cols] for i in rows]


def f_image(element_coeffs, index):
    """f applied to a coefficient vector or sparse dict over the section's basis."""
    if not isinstance(element_coeffs, dict):
        element_coeffs = to_sparse(element_coeffs)
    fm = f_matrix_cached(index)
    out = [0] * len(fm[0]) if fm else []
    for i, k in element_coeffs.items():
        for j, v in enumerate(fm[i]):
            if v:
                out[j] += k * v
    return out


def f_matrix_cached(index):
    cached = getattr(index, "_f_all", None)
    if cached is None:
        cached = f_matrix(index, "all")
        index._f_all = cached
    return cached


def rank(matrix):
    ech = Echelon(None)
    for row in matrix:
        ech.add(to_sparse(row))
    return ech.rank


def cokernel_invariants(matrix):
    """Nonzero Smith invariants of the matrix; all ones when f is onto."""
    return snf_diagonal(matrix)


def character_of(coeffs, index):
    """Character of a virtual set given by a coefficient dict over the section basis."""
    top = index.top
    total = [0] * len(top.codes)
    pos = {c: j for j, c in enumerate(top.codes)}
    for i, k in coeffs.items():
        L = index.subgroups[i]
        val = k * (top.order // L.order)
        for c in L.codes:
            total[pos[c]] += val
    return RationalCharacter(top.codes, tuple(total))


def induce_character(psi, index_from, index_to):
    """Induction from the section ``index_from`` (a subgroup section) to ``index_to``."""
    top = index_to.top
    k = top.order // index_from.top.order
    val = dict(zip(psi.codes, psi.values))
    return RationalCharacter(top.codes, tuple(k * val.get(c, 0) for c in top.codes))


def f_matrix_csv(index, columns="all"):
    rows = list(range(len(index))) if columns == "all" else graph_rows(index)
    matrix = f_matrix(index, columns)
    cols = irreducible_basis(index).kernels
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["subgroup"] + [f"chi_{n}" for n in cols])
    for i, row in zip(rows, matrix):
        w.writerow([i] + row)
    return buf.getvalue()
