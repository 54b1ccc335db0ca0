"""Finite abelian p-groups, their subgroups, and the Goursat correspondence.

A group ``C_{p^e1} x ... x C_{p^er}`` is described by a :class:`GroupSpec`.
Group elements are residue tuples (``GroupElement``); internally every element
also has an integer *code*, the mixed-radix value of its residues with the
first coordinate most significant.  Codes therefore sort exactly like residue
tuples, which makes sorted code tuples a canonical lexicographic key.

The ambient group ``Gamma = G x C_p`` is the spec of ``G`` with one extra
exponent 1 appended; its last coordinate is the ``C_p`` factor.
"""

import json
import re
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .errors import (
    AmbientMismatch,
    InvalidQuintuple,
    NotASubgroup,
    ParseError,
    ValidationError,
    OrderBoundExceeded,
)

DEFAULT_MAX_LOG_ORDER = 6
_TABLE_LIMIT = 1024

GroupElement = tuple


def is_prime(n):
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


@dataclass(frozen=True)
class GroupSpec:
    """``C_{p^e1} x ... x C_{p^er}`` with ``e1 >= ... >= er >= 1``."""

    p: int
    exponents: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "exponents", tuple(int(e) for e in self.exponents))
        if not is_prime(self.p):
            raise ValidationError(f"{self.p} is not prime")
        if any(e < 1 for e in self.exponents):
            raise ValidationError("exponents must be positive")
        if list(self.exponents) != sorted(self.exponents, reverse=True):
            raise ValidationError("exponents must be non-increasing")

    def __str__(self):
        return f"{self.p}:[{','.join(map(str, self.exponents))}]"

    def describe(self):
        if not self.exponents:
            return "1"
        return " x ".join(f"C{self.p ** e}" for e in self.exponents)

    @property
    def rank(self):
        return len(self.exponents)

    @cached_property
    def moduli(self):
        return tuple(self.p ** e for e in self.exponents)

    @cached_property
    def log_order(self):
        return sum(self.exponents)

    @cached_property
    def order(self):
        return self.p ** self.log_order

    @property
    def _tables(self):
        return _group_tables(self.p, self.exponents)

    @property
    def _weights(self):
        return self._tables.weights

    @property
    def _residues(self):
        return self._tables.residues

    def encode(self, residues):
        """Code of a residue tuple; residues must already be reduced."""
        residues = tuple(residues)
        if len(residues) != self.rank:
            raise ValidationError(f"element {residues} does not match {self}")
        code = 0
        for x, m, w in zip(residues, self.moduli, self._weights):
            if not 0 <= x < m:
                raise ValidationError(f"residue {x} out of range for modulus {m}")
            code += x * w
        return code

    def decode(self, code):
        return self._residues[code]

    def add(self, a, b):
        table = self._tables.add
        if table is not None:
            return table[a][b]
        ra, rb = self._residues[a], self._residues[b]
        return sum(((x + y) % m) * w for x, y, m, w in zip(ra, rb, self.moduli, self._weights))

    def neg(self, a):
        return self._tables.neg[a]

    def scale(self, a, k):
        r = self._residues[a]
        return sum(((k * x) % m) * w for x, m, w in zip(r, self.moduli, self._weights))

    def times_p(self, a):
        return self._tables.times_p[a]

    def element_order(self, a):
        times_p = self._tables.times_p
        n = 1
        while a != 0:
            a = times_p[a]
            n *= self.p
        return n

    def with_cp(self):
        """The spec of ``self x C_p``."""
        return GroupSpec(self.p, self.exponents + (1,))

    def factor_cp(self):
        """Inverse of :meth:`with_cp`: the spec of ``G`` when ``self = G x C_p``."""
        if not self.exponents or self.exponents[-1] != 1:
            raise ValidationError(f"{self} is not of the form G x C_{self.p}")
        return GroupSpec(self.p, self.exponents[:-1])


class _Tables:
    """Residues and arithmetic tables of one group, shared by equal specs."""

    def __init__(self, p, exponents):
        moduli = np.array([p ** e for e in exponents], dtype=np.int64)
        n = int(np.prod(moduli)) if len(exponents) else 1
        weights = np.ones(len(exponents), dtype=np.int64)
        for i in range(len(exponents) - 2, -1, -1):
            weights[i] = weights[i + 1] * moduli[i + 1]
        codes = np.arange(n, dtype=np.int64)
        res = (codes[:, None] // weights[None, :]) % moduli[None, :] if len(exponents) \
            else np.zeros((1, 0), dtype=np.int64)
        self.weights = tuple(int(w) for w in weights)
        self.residues = [tuple(int(x) for x in row) for row in res]
        self.neg = (((-res) % moduli) @ weights).tolist() if len(exponents) else [0]
        self.times_p = (((p * res) % moduli) @ weights).tolist() if len(exponents) else [0]
        if n <= _TABLE_LIMIT and len(exponents):
            self.add = [(((res[a] + res) % moduli) @ weights).tolist() for a in range(n)]
        elif n == 1:
            self.add = [[0]]
        else:
            self.add = None


@lru_cache(maxsize=None)
def _group_tables(p, exponents):
    return _Tables(p, exponents)


def parse_group_spec(text, max_log_order=DEFAULT_MAX_LOG_ORDER):
    """Parse ``"<p>:[e1,e2,...]"``, e.g. ``"2:[2,1]"`` for ``C4 x C2``."""
    m = re.fullmatch(r"\s*(\d+)\s*:\s*\[\s*((?:\d+\s*(?:,\s*\d+\s*)*)?)\]\s*", text or "")
    if m is None:
        raise ParseError(f"malformed group spec {text!r}; expected <p>:[e1,...,er]")
    p = int(m.group(1))
    body = m.group(2).strip()
    exps = tuple(int(x) for x in body.split(",")) if body else ()
    spec = GroupSpec(p, exps)
    check_order_bound(spec, max_log_order)
    return spec


def check_order_bound(spec, max_log_order=DEFAULT_MAX_LOG_ORDER):
    if spec.log_order > max_log_order:
        raise OrderBoundExceeded(
            f"|G| = {spec.p}^{spec.log_order} exceeds the bound {spec.p}^{max_log_order}")
    return spec


def partitions(n, cap=None):
    """Partitions of ``n`` as non-increasing tuples, largest first."""
    cap = n if cap is None else cap
    if n == 0:
        yield ()
        return
    for first in range(min(n, cap), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def abelian_family(p, max_order):
    """Every abelian ``p``-group of order at most ``max_order``, trivial group included."""
    out = []
    n = 0
    while p ** n <= max_order:
        out.extend(GroupSpec(p, lam) for lam in partitions(n))
        n += 1
    return out


# ---------------------------------------------------------------- subgroups

@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup stored extensionally by its sorted element codes.

    Equality and hashing only look at the ambient spec and the element set;
    ``gens`` is the canonical generating list derived from the elements.
    """

    spec: GroupSpec
    codes: tuple
    gens: tuple = field(default=())

    def __eq__(self, other):
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.spec == other.spec and self.codes == other.codes

    def __hash__(self):
        return hash((self.spec, self.codes))

    def __lt__(self, other):
        return self.key < other.key

    def __contains__(self, code):
        return code in self.members

    def __len__(self):
        return len(self.codes)

    def __repr__(self):
        return f"Subgroup({self.spec}, order={self.order}, gens={list(self.generators)})"

    @property
    def order(self):
        return len(self.codes)

    @property
    def key(self):
        return (len(self.codes), self.codes)

    @cached_property
    def members(self):
        return frozenset(self.codes)

    @cached_property
    def mask(self):
        m = 0
        for c in self.codes:
            m |= 1 << c
        return m

    @property
    def elements(self):
        return tuple(self.spec.decode(c) for c in self.codes)

    @property
    def generators(self):
        return tuple(self.spec.decode(c) for c in self.gens)

    def issubset(self, other):
        _same_ambient(self, other)
        return self.mask & ~other.mask == 0

    def to_json(self):
        return {"order": self.order, "generators": [list(g) for g in self.generators]}


def _same_ambient(a, b):
    if a.spec != b.spec:
        raise AmbientMismatch(f"subgroups live in different groups: {a.spec} vs {b.spec}")


def _adjoin(spec, members, g):
    """Element set of ``<members, g>`` for a subgroup given as a set."""
    if g in members:
        return set(members)
    out = set(members)
    shift = g
    while shift not in members:
        out.update(spec.add(s, shift) for s in members)
        shift = spec.add(shift, g)
    return out


def _close(spec, codes):
    members = {0}
    for g in codes:
        if g not in members:
            members = _adjoin(spec, members, g)
    return members


def _canonical_gens(spec, members):
    """Minimal generating list: greedy over the Frattini quotient.

    Candidates are scanned by decreasing order, then by code.  An element is
    kept when it is not in the span of the Frattini subgroup and the previous
    choices, so the count equals the rank of the subgroup.
    """
    frattini = _close(spec, {spec.times_p(x) for x in members})
    span = frattini
    gens = []
    for g in sorted(members, key=lambda c: (-spec.element_order(c), c)):
        if len(span) == len(members):
            break
        if g not in span:
            gens.append(g)
            span = _adjoin(spec, span, g)
    return tuple(gens)


def subgroup_from_codes(spec, codes):
    """Build a :class:`Subgroup` from a set of codes already closed under the group law."""
    members = frozenset(codes)
    sub = Subgroup(spec, tuple(sorted(members)), _canonical_gens(spec, members))
    sub.__dict__["members"] = members
    return sub


def trivial_subgroup(spec):
    return Subgroup(spec, (0,), ())


def whole_group(spec):
    return subgroup_from_codes(spec, range(spec.order))


def subgroup_from_generators(spec, gens):
    """Smallest subgroup containing ``gens`` (residue tuples)."""
    codes = [spec.encode(g) for g in gens]
    return subgroup_from_codes(spec, _close(spec, codes))


def meet_join(a, b):
    """(intersection, join) of two subgroups of the same group."""
    _same_ambient(a, b)
    meet = subgroup_from_codes(a.spec, a.members & b.members)
    join = subgroup_from_codes(a.spec, _join_members(a, b))
    return meet, join


def _join_members(a, b):
    members = set(a.members)
    for g in b.gens:
        if g not in members:
            members = _adjoin(a.spec, members, g)
    return members


def join(a, b):
    _same_ambient(a, b)
    return subgroup_from_codes(a.spec, _join_members(a, b))


def meet(a, b):
    _same_ambient(a, b)
    return subgroup_from_codes(a.spec, a.members & b.members)


def _require_sub(n, k):
    _same_ambient(n, k)
    if not n.issubset(k):
        raise NotASubgroup("expected N to be contained in K")


def quotient_invariants(K, N):
    """Invariant factors of ``K/N``, non-increasing powers of ``p``.

    Uses an element-order census: ``|Q[p^j]|`` for every ``j`` determines the
    conjugate partition of the type of ``Q``.
    """
    _require_sub(N, K)
    spec = K.spec
    p = spec.p
    census = {}
    for k in K.codes:
        j = 0
        while k not in N.members:
            k = spec.times_p(k)
            j += 1
        census[j] = census.get(j, 0) + 1
    top = max(census)
    sizes = []
    running = 0
    for j in range(top + 1):
        running += census.get(j, 0)
        sizes.append(running // N.order)
    conj = []
    for j in range(1, top + 1):
        ratio = sizes[j] // sizes[j - 1]
        e = 0
        while ratio > 1:
            ratio //= p
            e += 1
        conj.append(e)
    parts = [sum(1 for c in conj if c >= i) for i in range(1, (conj[0] if conj else 0) + 1)]
    return [p ** e for e in parts]


def subgroup_is_cyclic(s):
    # canonical generating lists are minimal
    return len(s.gens) <= 1


# ----------------------------------------------------- G x C_p correspondences

def split_element(gamma, code):
    """(code in G, residue in C_p) of an element of ``Gamma = G x C_p``."""
    return code // gamma.p, code % gamma.p


def join_element(gamma, g_code, c):
    return g_code * gamma.p + c


def product_subgroup(gamma, L, fiber):
    """``L x 1`` (``fiber=False``) or ``L x C_p`` (``fiber=True``) inside Gamma."""
    p = gamma.p
    cs = range(p) if fiber else (0,)
    return subgroup_from_codes(gamma, {g * p + c for g in L.codes for c in cs})


def project_to_g(gamma, S):
    g_spec = gamma.factor_cp()
    return subgroup_from_codes(g_spec, {c // gamma.p for c in S.codes})


@dataclass(frozen=True)
class GoursatQuintuple:
    """``(K, N, A, B, theta)`` with ``theta : K/N -> A/B`` an isomorphism.

    ``theta`` maps the smallest code of each coset of ``N`` in ``K`` to the
    smallest residue of the matching coset of ``B`` in ``A``; it is stored as
    a sorted tuple of pairs so that the quintuple stays hashable.
    """

    K: Subgroup
    N: Subgroup
    A: Subgroup
    B: Subgroup
    theta: tuple


def _coset_rep(spec, x, sub):
    return min(spec.add(x, n) for n in sub.codes)


def goursat_decompose(S):
    gamma = S.spec
    g_spec = gamma.factor_cp()
    c_spec = GroupSpec(gamma.p, (1,))
    k_set, n_set, a_set, b_set = set(), set(), set(), set()
    for code in S.codes:
        g, c = split_element(gamma, code)
        k_set.add(g)
        a_set.add(c)
        if c == 0:
            n_set.add(g)
        if g == 0:
            b_set.add(c)
    K = subgroup_from_codes(g_spec, k_set)
    N = subgroup_from_codes(g_spec, n_set)
    A = subgroup_from_codes(c_spec, a_set)
    B = subgroup_from_codes(c_spec, b_set)
    theta = {}
    for code in S.codes:
        g, c = split_element(gamma, code)
        theta[_coset_rep(g_spec, g, N)] = _coset_rep(c_spec, c, B)
    return GoursatQuintuple(K, N, A, B, tuple(sorted(theta.items())))


def goursat_compose(q):
    K, N, A, B = q.K, q.N, q.A, q.B
    g_spec, c_spec = K.spec, A.spec
    if not N.issubset(K) or not B.issubset(A):
        raise InvalidQuintuple("need N <= K and B <= A")
    if K.order * B.order != A.order * N.order:
        raise InvalidQuintuple("|K/N| != |A/B|")
    theta = dict(q.theta)
    k_reps = {_coset_rep(g_spec, k, N) for k in K.codes}
    a_reps = {_coset_rep(c_spec, a, B) for a in A.codes}
    if set(theta) != k_reps or set(theta.values()) != a_reps or len(theta) != len(a_reps):
        raise InvalidQuintuple("theta is not a bijection K/N -> A/B")
    for x in k_reps:
        for y in k_reps:
            lhs = theta[_coset_rep(g_spec, g_spec.add(x, y), N)]
            rhs = _coset_rep(c_spec, c_spec.add(theta[x], theta[y]), B)
            if lhs != rhs:
                raise InvalidQuintuple("theta is not a homomorphism")
    gamma = g_spec.with_cp()
    codes = set()
    for k in K.codes:
        base = theta[_coset_rep(g_spec, k, N)]
        for b in B.codes:
            codes.add(join_element(gamma, k, c_spec.add(base, b)))
    return subgroup_from_codes(gamma, codes)


@dataclass(frozen=True)
class GraphDescriptor:
    """A homomorphism ``rho : K -> C_p`` given by its values on ``K.gens``."""

    domain: Subgroup
    rho: tuple

    @property
    def is_trivial(self):
        return not any(self.rho)


def graph_classify(S):
    """Descriptor ``(K, rho)`` when ``S`` is the graph of ``rho``, else ``None``."""
    gamma = S.spec
    p = gamma.p
    if any(code % p for code in S.codes if code // p == 0):
        return None
    K = project_to_g(gamma, S)
    values = {}
    for code in S.codes:
        values[code // p] = code % p
    return GraphDescriptor(K, tuple(values[g] for g in K.gens))


def graph_subgroup(desc):
    """The graph ``K x rho = {(k, rho(k))}`` inside ``G x C_p``."""
    K = desc.domain
    gamma = K.spec.with_cp()
    if len(desc.rho) != len(K.gens):
        raise ValidationError("rho must give one value per generator of its domain")
    gens = [join_element(gamma, g, v % gamma.p) for g, v in zip(K.gens, desc.rho)]
    S = subgroup_from_codes(gamma, _close(gamma, gens))
    if S.order != K.order:
        raise ValidationError("rho does not define a homomorphism on its domain")
    return S


def subgroup_json(sub):
    return json.dumps(sub.to_json(), sort_keys=True)
