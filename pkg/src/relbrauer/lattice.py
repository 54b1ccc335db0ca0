"""Subgroup lattices, index-p covers, resolutions and sub-quotient pairs.

A :class:`LatticeIndex` lists every subgroup ``S`` of a *section*
``bottom <= S <= top`` in canonical order ``(order, sorted codes)``.  The
full lattice of a group is the section ``1 <= S <= G``; sections with a
non-trivial bottom model the subgroup lattice of a quotient.
"""

import json
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .errors import NotASubgroup, OrderBoundExceeded, UnsupportedTarget
from .groups import (
    GroupSpec,
    _adjoin,
    graph_classify,
    product_subgroup,
    quotient_invariants,
    subgroup_from_codes,
    trivial_subgroup,
    whole_group,
)

MAX_SUBGROUPS = 20000


# ------------------------------------------------------------ subgroup counts

def _conjugate(partition):
    if not partition:
        return []
    return [sum(1 for x in partition if x > i) for i in range(max(partition))]


def _gaussian_binomial(n, k, q):
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _sub_partitions(lam):
    def rec(i, cap):
        if i == len(lam):
            yield []
            return
        for v in range(min(cap, lam[i]), -1, -1):
            for rest in rec(i + 1, v):
                yield [v] + rest

    for mu in rec(0, max(lam) if lam else 0):
        yield [x for x in mu if x]


def count_subgroups_of_type(lam, mu, p):
    """Number of subgroups of type ``mu`` in the abelian p-group of type ``lam`` (Birkhoff)."""
    lc = _conjugate(lam)
    mc = _conjugate(mu)
    width = len(lc) + 2
    lc = lc + [0] * (width - len(lc))
    mc = mc + [0] * (width - len(mc))
    total = 1
    for i in range(width - 1):
        total *= p ** (mc[i + 1] * (lc[i] - mc[i]))
        total *= _gaussian_binomial(lc[i] - mc[i + 1], mc[i] - mc[i + 1], p)
    return total


def count_subgroups(spec):
    lam = list(spec.exponents)
    return sum(count_subgroups_of_type(lam, mu, spec.p) for mu in _sub_partitions(lam))


# ------------------------------------------------------------------ the index

class LatticeIndex:
    """Canonically ordered subgroups of a section with their index-p covers."""

    def __init__(self, top, bottom, subgroups, covers):
        self.spec = top.spec
        self.top = top
        self.bottom = bottom
        self.subgroups = list(subgroups)
        self.covers = list(covers)
        self.position = {s.codes: i for i, s in enumerate(self.subgroups)}
        self.by_mask = {s.mask: i for i, s in enumerate(self.subgroups)}

    def __len__(self):
        return len(self.subgroups)

    def __getitem__(self, i):
        return self.subgroups[i]

    def __repr__(self):
        return f"LatticeIndex({self.spec}, {len(self)} subgroups)"

    @property
    def p(self):
        return self.spec.p

    @property
    def top_index(self):
        return len(self.subgroups) - 1

    def index_of(self, sub):
        try:
            return self.position[sub.codes]
        except KeyError:
            raise NotASubgroup(f"{sub!r} is not in this lattice") from None

    @cached_property
    def masks(self):
        return [s.mask for s in self.subgroups]

    @cached_property
    def orders(self):
        return [s.order for s in self.subgroups]

    def contains(self, i, j):
        """True when subgroup ``j`` is contained in subgroup ``i``."""
        return self.masks[j] & ~self.masks[i] == 0

    def meet_index(self, i, j):
        return self.by_mask[self.masks[i] & self.masks[j]]

    @cached_property
    def _join_cache(self):
        return {}

    def join_index(self, i, j):
        if self.contains(i, j):
            return i
        if self.contains(j, i):
            return j
        key = (i, j) if i < j else (j, i)
        cache = self._join_cache
        if key not in cache:
            a, b = self.subgroups[i], self.subgroups[j]
            members = set(a.members)
            for g in b.gens:
                if g not in members:
                    members = _adjoin(self.spec, members, g)
            m = 0
            for c in members:
                m |= 1 << c
            cache[key] = self.by_mask[m]
        return cache[key]

    @cached_property
    def up_covers(self):
        up = [[] for _ in self.subgroups]
        for i, j in self.covers:
            up[i].append(j)
        return up

    @cached_property
    def down_covers(self):
        down = [[] for _ in self.subgroups]
        for i, j in self.covers:
            down[j].append(i)
        return down

    @cached_property
    def by_order(self):
        buckets = {}
        for i, s in enumerate(self.subgroups):
            buckets.setdefault(s.order, []).append(i)
        return buckets

    @cached_property
    def frattini_masks(self):
        """Mask of ``p*S`` for each subgroup ``S``."""
        out = []
        for s in self.subgroups:
            m = 0
            for c in s.codes:
                m |= 1 << self.spec.times_p(c)
            out.append(m)
        return out

    def subgroups_below(self, i):
        """Indices of subgroups of ``S_i`` inside this section, in canonical order."""
        mi = self.masks[i]
        return [j for j in range(i + 1) if self.masks[j] & ~mi == 0]

    def section(self, top_i, bottom_i):
        """The sub-index of subgroups ``S`` with ``S_bottom <= S <= S_top``."""
        mt, mb = self.masks[top_i], self.masks[bottom_i]
        if mb & ~mt:
            raise NotASubgroup("bottom is not contained in top")
        keep = [j for j in range(len(self)) if self.masks[j] & ~mt == 0 and mb & ~self.masks[j] == 0]
        where = {j: k for k, j in enumerate(keep)}
        covers = [(where[a], where[b]) for a, b in self.covers if a in where and b in where]
        return LatticeIndex(self.subgroups[top_i], self.subgroups[bottom_i],
                            [self.subgroups[j] for j in keep], covers)

    @cached_property
    def cyclic_flags(self):
        return [is_cyclic_in(self, i) for i in range(len(self))]

    def to_json(self):
        return {
            "group": str(self.spec),
            "count": len(self),
            "subgroups": [dict(index=i, **s.to_json()) for i, s in enumerate(self.subgroups)],
            "covers": [list(e) for e in self.covers],
        }

    def to_dot(self):
        lines = ["digraph subgroups {"]
        for i, s in enumerate(self.subgroups):
            lines.append(f'  n{i} [label="#{i}:{s.order}"];')
        for a, b in self.covers:
            lines.append(f"  n{a} -> n{b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _enumerate(spec):
    """All subgroups with cover edges, by breadth-first index-p extension."""
    p = spec.p
    start = frozenset((0,))
    found = {start: None}
    order = [start]
    edges = []
    head = 0
    while head < len(order):
        s = order[head]
        head += 1
        covered = set(s)
        for g in range(spec.order):
            if g in covered or spec.times_p(g) not in s:
                continue
            t = frozenset(_adjoin(spec, s, g))
            covered |= t
            if t not in found:
                found[t] = None
                order.append(t)
            edges.append((s, t))
    return order, edges


@lru_cache(maxsize=64)
def all_subgroups(spec, max_subgroups=MAX_SUBGROUPS):
    """Complete canonical subgroup lattice of ``spec``."""
    expected = count_subgroups(spec)
    if expected > max_subgroups:
        raise OrderBoundExceeded(
            f"{spec} has {expected} subgroups, more than the limit {max_subgroups}")
    sets, edges = _enumerate(spec)
    subs = [subgroup_from_codes(spec, s) for s in sets]
    subs.sort(key=lambda s: s.key)
    where = {s.members: i for i, s in enumerate(subs)}
    covers = sorted({(where[a], where[b]) for a, b in edges})
    assert len(subs) == expected, (spec, len(subs), expected)
    return LatticeIndex(subs[-1], subs[0], subs, covers)


def is_cyclic(s):
    """True iff some element of ``s`` has order ``|s|``."""
    return any(s.spec.element_order(c) == s.order for c in s.codes)


def is_cyclic_in(index, i):
    """Cyclicity of the section quotient ``S_i / bottom``."""
    s = index.subgroups[i]
    if index.bottom.order == 1:
        return is_cyclic(s)
    return len(quotient_invariants(s, index.bottom)) <= 1


# ---------------------------------------------------------------- resolutions

@dataclass(frozen=True)
class Resolution:
    """Chain ``G_e < G_{e-1} < ... < G_0`` of lattice indices, bottom first.

    Both endpoints are included, so a resolution of ``L`` to itself has a
    single entry and no steps.
    """

    chain: tuple

    @property
    def steps(self):
        return len(self.chain) - 1

    @property
    def start(self):
        return self.chain[0]

    @property
    def end(self):
        return self.chain[-1]


def resolutions(index, low, high):
    """All index-p chains from ``low`` up to ``high``, in lexicographic order."""
    if not index.contains(high, low):
        raise NotASubgroup("the start of a resolution must lie in its end")
    out = []
    up = index.up_covers

    def walk(path):
        cur = path[-1]
        if cur == high:
            out.append(Resolution(tuple(path)))
            return
        for nxt in up[cur]:
            if index.contains(high, nxt):
                path.append(nxt)
                walk(path)
                path.pop()

    walk([low])
    return out


# ------------------------------------------------------ sub-quotient pairs

def subquotient_pairs(index, target):
    """All ``(K, N)`` index pairs with ``K/N`` elementary abelian of the target type."""
    p = index.p
    target = list(target)
    if target not in ([p, p], [p, p, p]):
        raise UnsupportedTarget(f"target {target} not supported; use [p,p] or [p,p,p]")
    ratio = p ** len(target)
    out = []
    masks = index.masks
    frat = index.frattini_masks
    buckets = index.by_order
    for k in range(len(index)):
        small = buckets.get(index.orders[k] // ratio, []) if index.orders[k] % ratio == 0 else []
        mk, fk = masks[k], frat[k]
        for n in small:
            mn = masks[n]
            if mn & ~mk == 0 and fk & ~mn == 0:
                out.append((k, n))
    return out


# --------------------------------------------------- G and Gamma side by side

class Ambient:
    """The lattices of ``G`` and ``Gamma = G x C_p`` with their cross references."""

    def __init__(self, g_spec):
        self.g_spec = g_spec
        self.spec = g_spec.with_cp()
        self.p = g_spec.p
        self.g = all_subgroups(g_spec)
        self.gamma = all_subgroups(self.spec)
        gamma = self.gamma
        self.times_eps = [gamma.index_of(product_subgroup(self.spec, L, False)) for L in self.g]
        self.times_cp = [gamma.index_of(product_subgroup(self.spec, L, True)) for L in self.g]
        self.descriptors = [graph_classify(S) for S in gamma]
        self.is_graph = [d is not None for d in self.descriptors]
        self.domain = []
        for S in gamma:
            m = 0
            for c in S.codes:
                m |= 1 << (c // self.p)
            self.domain.append(self.g.by_mask[m])
        graphs_over = [[] for _ in self.g]
        for j, d in enumerate(self.descriptors):
            if d is not None:
                graphs_over[self.domain[j]].append(j)
        self.graphs_over = graphs_over
        self.graph_indices = [j for j, g in enumerate(self.is_graph) if g]

    def __repr__(self):
        return f"Ambient({self.g_spec})"

    def restrict_graph(self, j, i):
        """Index of ``(K x rho)|_{L_i}`` for a graph ``j`` whose domain contains ``L_i``."""
        return self.gamma.meet_index(j, self.times_cp[i])

    def extensions(self, t, i):
        """Graphs with domain ``L_i`` restricting to the graph ``t``."""
        return [j for j in self.graphs_over[i] if self.restrict_graph(j, self.domain[t]) == t]

    def is_surjective_graph(self, j):
        return not self.gamma.contains(self.times_eps[self.domain[j]], j)


@lru_cache(maxsize=64)
def ambient(g_spec):
    return Ambient(g_spec)


# ---------------------------------------------------------- selection list

@dataclass(frozen=True)
class SelectionPair:
    K: int
    N: int
    case: str  # "fiber", "lambda", "epsilon" or "mixed"
    source: int  # G-index of G'
    choice: int  # G-index of L'


@dataclass(frozen=True)
class SelectionList:
    pairs: tuple

    def __len__(self):
        return len(self.pairs)

    def graph_pairs(self, amb):
        return [pr for pr in self.pairs if amb.is_graph[pr.K]]

    def to_json(self, amb):
        gamma = amb.gamma
        return {
            "group": str(amb.g_spec),
            "count": len(self.pairs),
            "pairs": [
                {"K": pr.K, "N": pr.N, "case": pr.case,
                 "K_generators": [list(x) for x in gamma[pr.K].generators],
                 "N_generators": [list(x) for x in gamma[pr.N].generators]}
                for pr in self.pairs
            ],
        }


def choose_complement(gidx, i, policy="first"):
    """Subgroup ``L' < G'_i`` with ``G'/L'`` elementary of the largest rank available (1 or 2)."""
    p = gidx.p
    cands2, cands1 = [], []
    for j in gidx.subgroups_below(i):
        ratio = gidx.orders[i] // gidx.orders[j]
        if ratio == p * p and gidx.frattini_masks[i] & ~gidx.masks[j] == 0:
            cands2.append(j)
        elif ratio == p:
            cands1.append(j)
    cands = cands2 or cands1
    if not cands:
        return None, 0
    pick = cands[0] if policy == "first" else cands[-1]
    return pick, (2 if cands2 else 1)


def build_selection_list(amb, policy="first"):
    """The list of pairs ``(K, N')`` in which each non-cyclic ``K <= Gamma`` occurs once."""
    gidx, gamma = amb.g, amb.gamma
    pairs = []
    for i in range(len(gidx)):
        if gidx.orders[i] == 1:
            continue
        lp, kind = choose_complement(gidx, i, policy)
        if kind == 2:
            pairs.append(SelectionPair(amb.times_cp[i], amb.times_cp[lp], "fiber", i, lp))
            for j in amb.graphs_over[i]:
                n = amb.restrict_graph(j, lp)
                case = "epsilon" if j == amb.times_eps[i] else "lambda"
                if case == "lambda" and not amb.is_surjective_graph(j):
                    continue
                pairs.append(SelectionPair(j, n, case, i, lp))
        else:
            pairs.append(SelectionPair(amb.times_cp[i], amb.times_eps[lp], "mixed", i, lp))
    pairs.sort(key=lambda pr: (pr.K, pr.N))
    return SelectionList(tuple(pairs))


def lattice_json(index):
    return json.dumps(index.to_json(), sort_keys=True)
