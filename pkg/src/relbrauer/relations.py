"""Brauer relations of G x C_p: kernels, indufted generators and certificates.

Everything is expressed in the canonical subgroup basis of ``Gamma = G x C_p``.
The relative kernel ``K(G,C_p)`` is the kernel of f restricted to graph
subgroups; ``K'`` is the lattice generated by relative relations indufted
from sub-quotients ``K/N`` of type ``C_p^3``.
"""

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .burnside import BurnsideElement, pretty, signature
from .errors import NoCertificate, NotARelation, VerificationFailure, WrongQuotientType
from .groups import quotient_invariants, subgroup_from_generators
from .lattice import ambient, build_selection_list, resolutions, subquotient_pairs
from .linalg import (
    Lattice,
    UnitEchelon,
    UnitTriangular,
    covolume,
    _axpy,
    is_power_of,
    kernel_vectors,
    lattice_compare,
)
from .rational import cokernel_invariants, f_matrix, graph_rows, rank


@dataclass(frozen=True)
class GeneratorRecord:
    kind: str  # Theta, Type1, Type2, Type3 or Induft
    provenance: tuple
    element: BurnsideElement = field(compare=False)

    def to_json(self):
        return {"kind": self.kind, "provenance": list(self.provenance), "element": self.element.to_json()}


@dataclass(frozen=True)
class Certificate:
    target: BurnsideElement
    terms: tuple  # (GeneratorRecord, coefficient)

    def expand(self):
        out = BurnsideElement(self.target.index)
        for rec, k in self.terms:
            out = out + k * rec.element
        return out

    def to_json(self):
        return {
            "target": self.target.to_json(),
            "terms": [{"coefficient": k, "K": rec.provenance[0], "N": rec.provenance[1],
                       "element": rec.element.to_json()} for rec, k in self.terms],
        }


# ----------------------------------------------------------- small helpers

def _index_pair_check(index, k, n, target):
    p = index.p
    inv = quotient_invariants(index[k], index[n])
    if inv != [p] * len(target):
        raise WrongQuotientType(f"quotient type {inv}, expected {target}")


def _intermediate(index, k, n):
    """Subgroups ``C`` with ``N < C < K`` and ``[C : N] = p``."""
    mk = index.masks[k]
    return sorted(c for c in index.up_covers[n] if index.masks[c] & ~mk == 0 and c != k)


def theta_vector(index, k, n):
    """``N - sum C' + pK`` as a sparse dict (``K/N`` elementary of rank 2)."""
    out = {n: 1, k: index.p}
    for c in _intermediate(index, k, n):
        out[c] = out.get(c, 0) - 1
    return out


def theta_induft(index, K, N):
    """Indufted ``Theta_{K/N} = N - sum C' + pK`` for ``K/N = C_p x C_p``."""
    k, n = index.index_of(K), index.index_of(N)
    _index_pair_check(index, k, n, [index.p] * 2)
    return GeneratorRecord("Theta", (k, n), BurnsideElement(index, theta_vector(index, k, n)))


def kernel_absolute(index):
    """``K(Gamma)`` as an HNF lattice."""
    return _kernel_of_rows(index, range(len(index)))


def _kernel_of_rows(index, rows):
    rows = list(rows)
    fm = f_matrix(index, "all")
    sparse = [{j: x for j, x in enumerate(fm[i]) if x} for i in rows]
    vecs = []
    for t in kernel_vectors(sparse):
        vecs.append({rows[i]: x for i, x in t.items()})
    return Lattice.from_generators(len(index), vecs)


# --------------------------------------------------- indufted C_p^3 kernels

_PATTERN_CACHE = {}


def _interval(index, k, n):
    """Positions of the ``C_p^3`` interval ``[N, K]`` and its cache key."""
    mk, mn = index.masks[k], index.masks[n]
    atoms = sorted(a for a in index.up_covers[n] if index.masks[a] & ~mk == 0)
    coatoms = sorted(c for c in index.down_covers[k] if mn & ~index.masks[c] == 0)
    masks = index.masks
    bits = tuple(masks[a] & ~masks[c] == 0 for a in atoms for c in coatoms)
    return [n] + atoms + coatoms + [k], bits


def _relative_pattern_kernel(index, members, key, is_graph):
    """HNF basis (over interval positions) of graph-supported relations of ``K/N``."""
    hit = _PATTERN_CACHE.get(key)
    if hit is not None:
        return hit
    sec = index.section(members[-1], members[0])
    if [index.position[s.codes] for s in sec.subgroups] != members:
        raise AssertionError("section order disagrees with interval order")
    fm = f_matrix(sec, "all")
    rows = [i for i in range(len(members)) if is_graph[members[i]]]
    sparse = [{j: x for j, x in enumerate(fm[i]) if x} for i in rows]
    vecs = [{rows[i]: x for i, x in t.items()} for t in kernel_vectors(sparse)]
    basis = Lattice.from_generators(len(members), vecs).sparse_rows
    _PATTERN_CACHE[key] = basis
    return basis


def full_pattern_kernel(index, k, n):
    """``K(K/N)`` mapped through Induf, computed afresh on the section (no cache)."""
    sec = index.section(k, n)
    ker = kernel_absolute(sec)
    return [{index.position[sec[i].codes]: x for i, x in r.items()} for r in ker.sparse_rows]


def induft_vectors(amb, k, n):
    """Generators of ``Induf(K(K/N))`` intersected with graph coordinates."""
    index = amb.gamma
    members, bits = _interval(index, k, n)
    flags = tuple(amb.is_graph[m] for m in members)
    key = (index.p, bits, flags)
    basis = _relative_pattern_kernel(index, members, key, amb.is_graph)
    return [{members[i]: x for i, x in r.items()} for r in basis]


def induft_relative_lattice(G, K, N):
    amb = ambient(G)
    index = amb.gamma
    k, n = index.index_of(K), index.index_of(N)
    _index_pair_check(index, k, n, [index.p] * 3)
    return Lattice.from_generators(len(index), induft_vectors(amb, k, n))


# ------------------------------------------------------------- the context

class RelationContext:
    """Lazily computed relation data for one ``G``."""

    def __init__(self, G):
        self.G = G
        self.amb = ambient(G)
        self.gamma = self.amb.gamma
        self.p = G.p

    @cached_property
    def f_all(self):
        return f_matrix(self.gamma, "all")

    @cached_property
    def f_np(self):
        return np.array(self.f_all, dtype=np.int64)

    @cached_property
    def k_abs(self):
        return kernel_absolute(self.gamma)

    @cached_property
    def k_rel(self):
        return _kernel_of_rows(self.gamma, graph_rows(self.gamma))

    @cached_property
    def ppp_pairs(self):
        return subquotient_pairs(self.gamma, [self.p] * 3)

    def f_image(self, vec):
        out = np.zeros(self.f_np.shape[1], dtype=object)
        for i, x in vec.items():
            out += x * self.f_np[i].astype(object)
        return out

    def is_relation(self, vec):
        return not any(self.f_image(vec))

    def is_relative_relation(self, vec):
        return all(self.amb.is_graph[i] for i in vec) and self.is_relation(vec)

    @cached_property
    def kprime_data(self):
        """Sum ``K'`` of the indufted relative lattices over all ``C_p^3`` sub-quotients.

        Equality with ``T = K(G,C_p)`` is shown constructively: collect
        generators, or short combinations of them, whose leftmost coefficient
        is 1 in pairwise distinct columns.  If these leading columns are
        exactly the HNF pivot columns ``P`` of ``T``, the rows lie in
        ``K' <= T``, their ``P``-block is unitriangular and the projection to
        ``P`` is injective on ``T``'s span, so they span ``T``.  Certificates
        are then forward substitutions against these rows.

        Otherwise the index is computed from covolumes after projecting to
        ``P``: ``[T : L] = [Z^P : pi(L)] / det(T)`` for ``L <= T``.
        """
        amb = self.amb
        target = self.k_rel
        r, d_t = target.rank, target.determinant()
        cols = {c for c, _ in target.pivots}
        gens = []
        for pair in self.ppp_pairs:
            for vec in induft_vectors(amb, *pair):
                gens.append((pair, vec))
        bad = self._check_generators(gens)

        tri = UnitTriangular()
        for gid, (_, vec) in enumerate(gens):
            tri.offer(vec, gid)
        grown = True
        while len(tri) < r and grown:
            grown = False
            for gid, (_, vec) in enumerate(gens):
                if tri.add_reduced(vec, {gid: 1}):
                    grown = True
                    if len(tri) == r:
                        break
        triangular = not bad and set(tri.rows) == cols and self._rows_expand(tri, gens)

        if triangular:
            index, lat = 1, target
        else:
            index = None
            if not bad:
                cov = covolume([{c: x for c, x in v.items() if c in cols} for _, v in gens], r)
                if cov is not None and cov % d_t == 0:
                    index = cov // d_t
            lat = Lattice.from_generators(len(self.gamma), [v for _, v in gens])
        return {"lattice": lat, "triangular": tri, "covered": len(tri), "rank": r,
                "generators": gens, "bad_generators": bad, "index": index,
                "equal": triangular}

    def _rows_expand(self, tri, gens):
        """Each stored row equals the combination of generators recorded for it."""
        for c, row in tri.rows.items():
            total = {}
            for gid, k in tri.trans[c].items():
                _axpy(total, k, gens[gid][1])
            if total != row:
                return False
        return True

    def _check_generators(self, gens, relative=True):
        """Indices of generators that are not (relative) relations; expected: none."""
        bad = []
        F = self.f_np
        is_graph = self.amb.is_graph
        chunk = 4096
        for start in range(0, len(gens), chunk):
            part = gens[start:start + chunk]
            rows, cols, vals = [], [], []
            for r, (_, vec) in enumerate(part):
                for i, x in vec.items():
                    rows.append(r)
                    cols.append(i)
                    vals.append(x)
                    if relative and not is_graph[i]:
                        bad.append(start + r)
            img = np.zeros((len(part), F.shape[1]), dtype=np.int64)
            np.add.at(img, np.array(rows), np.array(vals, dtype=np.int64)[:, None] * F[np.array(cols)])
            bad.extend(start + r for r in np.nonzero(np.any(img != 0, axis=1))[0].tolist())
        return sorted(set(bad))

    @property
    def kprime(self):
        return self.kprime_data["lattice"]

    def in_kprime(self, vec):
        return self.kprime.contains(vec)

    # ---------------------------------------------------------- certificates

    def certificate(self, vec):
        """Express ``vec`` over the indufted generators, or raise NoCertificate."""
        data = self.kprime_data
        rest, sol = data["triangular"].reduce(vec, track=True)
        if rest:
            sol = None
        gens = data["generators"]
        if sol is not None:
            total = {}
            for gid, k in sol.items():
                _axpy(total, k, gens[gid][1])
            if total != {i: x for i, x in vec.items() if x}:
                sol = None
        if sol is None:
            raise NoCertificate("relation is not in the span of indufted C_p^3 relations",
                                {"group": str(self.G), "element": {str(i): x for i, x in sorted(vec.items())}})
        terms = []
        for gid in sorted(sol):
            pair, gvec = gens[gid]
            rec = GeneratorRecord("Induft", pair, BurnsideElement(self.gamma, gvec))
            terms.append((rec, sol[gid]))
        return Certificate(BurnsideElement(self.gamma, vec), tuple(terms))

    # ------------------------------------------------------ selection basis

    def selection_elements(self, policy="first"):
        sel = build_selection_list(self.amb, policy)
        gamma = self.gamma
        return [(pr, theta_vector(gamma, pr.K, pr.N)) for pr in sel.graph_pairs(self.amb)]

    def selection_check(self, policy="first"):
        """Independence, rank, saturation and index of the selection-list graph elements.

        Each element ``N' - sum C' + pK`` has coefficient ``p`` at its own ``K``
        and is otherwise supported strictly below ``K``.  With distinct ``K``
        this makes the block on the ``K`` columns triangular with diagonal
        ``p``, so the elements are independent and, inside ``T = K(G,C_p)`` of
        the same rank, ``[T : S] = p^r / [Z^K : pi_K(T)]``.  Without that shape
        the comparison falls back to generic lattice arithmetic.
        """
        gamma, p = self.gamma, self.p
        elems = self.selection_elements(policy)
        target = self.k_rel
        r = target.rank
        ks = [pr.K for pr, _ in elems]
        relations_ok = not self._check_generators([(pr, v) for pr, v in elems])
        shaped = len(set(ks)) == len(ks) and all(
            v.get(pr.K) == p and all(i == pr.K or (gamma.contains(pr.K, i) and gamma.orders[i] < gamma.orders[pr.K])
                                     for i in v)
            for pr, v in elems)
        out = {"policy": policy, "count": len(elems), "rank": r, "relations": relations_ok,
               "triangular": shaped}
        if shaped and relations_ok and len(elems) == r:
            kcols = set(ks)
            span = UnitEchelon()
            for row in target.sparse_rows:
                span.add({c: x for c, x in row.items() if c in kcols})
            cov = span.covolume(r)
            index = None if cov is None or p ** r % cov else p ** r // cov
            out.update(independent=True, saturation_equal=cov is not None, index=index)
        else:
            cmp = lattice_compare(Lattice.from_generators(len(gamma), [v for _, v in elems]), target)
            independent = Lattice.from_generators(len(gamma), [v for _, v in elems]).rank == len(elems)
            out.update(independent=independent, saturation_equal=cmp.saturation_equal, index=cmp.index)
        out["index_is_p_power"] = out["index"] is not None and is_power_of(out["index"], p)
        out["ok"] = (relations_ok and out["independent"] and len(elems) == r
                     and out["saturation_equal"] and out["index_is_p_power"])
        return out

    # ------------------------------------------------- classified generators

    def type1(self):
        amb, g, gamma = self.amb, self.amb.g, self.gamma
        out = []
        for gi, li in subquotient_pairs(g, [self.p] * 2):
            for j in amb.graphs_over[gi]:
                n = amb.restrict_graph(j, li)
                out.append(GeneratorRecord("Type1", (gi, li, j), BurnsideElement(gamma, theta_vector(gamma, j, n))))
        return out

    def type3(self):
        amb, g, gamma = self.amb, self.amb.g, self.gamma
        out = []
        for gi, li in subquotient_pairs(g, [self.p] * 2):
            vec = theta_vector(gamma, amb.times_cp[gi], amb.times_cp[li])
            out.append(GeneratorRecord("Type3", (gi, li), BurnsideElement(gamma, vec)))
        return out

    def type2_vector(self, gi, ci, beta):
        """``C x beta - sum G' x beta~ - C x C_p + p G' x C_p``; ``None`` if beta does not extend."""
        amb = self.amb
        ext = amb.extensions(beta, gi)
        if not ext:
            return None
        if len(ext) != self.p:
            raise AssertionError("a homomorphism extends in exactly p ways")
        out = {beta: 1, amb.times_cp[ci]: -1, amb.times_cp[gi]: self.p}
        for j in ext:
            out[j] = out.get(j, 0) - 1
        return {i: x for i, x in out.items() if x}

    def b_eps(self, gi, ci):
        """``B_{G'L}`` with trivial ``beta``."""
        return self.type2_vector(gi, ci, self.amb.times_eps[ci])

    def type2(self):
        amb, g, gamma = self.amb, self.amb.g, self.gamma
        out = []
        for ci, gi in g.covers:
            for beta in amb.graphs_over[ci]:
                vec = self.type2_vector(gi, ci, beta)
                if vec is not None:
                    out.append(GeneratorRecord("Type2", (gi, ci, beta), BurnsideElement(gamma, vec)))
        return out

    def classified_generators(self):
        return self.type1() + self.type2() + self.type3()

    def square_section_vector(self, gi, li):
        """``(p+1) D_{G',L} - sum B_{G',C',eps} + sum B_{C',L,eps}``."""
        amb, g, p = self.amb, self.amb.g, self.p
        out = {}
        d = theta_vector(self.gamma, amb.times_cp[gi], amb.times_cp[li])
        _axpy(out, p + 1, d)
        for c in _intermediate(g, gi, li):
            _axpy(out, -1, self.b_eps(gi, c))
            _axpy(out, 1, self.b_eps(c, li))
        return out

    # ---------------------------------------------------------- telescopes

    def telescope_vector(self, res):
        """``sum_j p^(e-j) B_{G_{j-1} G_j}`` for a resolution (chain listed bottom first)."""
        chain = res.chain
        e = len(chain) - 1
        out = {}
        for step in range(e):
            small, big = chain[step], chain[step + 1]
            # step counts from the bottom; the weight is p^step
            _axpy(out, self.p ** step, self.b_eps(big, small))
        return out

    def telescope_signature_ok(self, res):
        vec = self.telescope_vector(res)
        sig = signature(BurnsideElement(self.gamma, vec), self.amb)
        chain, e = res.chain, len(res.chain) - 1
        expect = {}
        expect[chain[0]] = expect.get(chain[0], 0) - 1
        expect[chain[-1]] = expect.get(chain[-1], 0) + self.p ** e
        return sig.terms == {i: x for i, x in expect.items() if x}


@lru_cache(maxsize=16)
def context(G):
    return RelationContext(G)


# ----------------------------------------------------------- public layer

def kernel_relative(G):
    return context(G).k_rel


def classified_generators(G):
    return context(G).classified_generators()


def kprime(G):
    return context(G).kprime


def decompose_relation(G, x):
    ctx = context(G)
    if x.index is not ctx.gamma:
        raise NotARelation("element does not live on the subgroup lattice of G x C_p")
    vec = dict(x.terms)
    if not ctx.is_relative_relation(vec):
        raise NotARelation("element is not a relative Brauer relation")
    cert = ctx.certificate(vec)
    if cert.expand() != x:
        raise NoCertificate("certificate does not re-expand to the target")
    return cert


def telescope_check(G, res):
    """Telescope signature plus: differences of telescopes with equal endpoints lie in K'."""
    ctx = context(G)
    if not ctx.telescope_signature_ok(res):
        return False
    base = ctx.telescope_vector(res)
    for other in resolutions(ctx.amb.g, res.start, res.end):
        diff = dict(base)
        _axpy(diff, -1, ctx.telescope_vector(other))
        if diff and not ctx.in_kprime(diff):
            return False
    return True
