"""The Burnside module on the canonical subgroup basis of an abelian section.

Elements are sparse integer combinations of subgroups of a fixed
:class:`~relbrauer.lattice.LatticeIndex`.  For a section ``top/bottom`` the
basis element ``S`` stands for the transitive set ``top/S``.
"""

from .errors import AmbientMismatch, NotAQuotient, NotASubgroup


class BurnsideElement:
    """A virtual ``top``-set ``sum n_i S_i``; equality is coefficient equality."""

    __slots__ = ("index", "terms")

    def __init__(self, index, coeffs=None):
        self.index = index
        if coeffs is None:
            terms = {}
        elif isinstance(coeffs, dict):
            terms = {int(i): int(k) for i, k in coeffs.items() if k}
        else:
            if len(coeffs) != len(index):
                raise ValueError(f"expected {len(index)} coefficients, got {len(coeffs)}")
            terms = {i: int(k) for i, k in enumerate(coeffs) if k}
        n = len(index)
        for i in terms:
            if not 0 <= i < n:
                raise ValueError(f"basis position {i} out of range")
        self.terms = terms

    @classmethod
    def basis(cls, index, i):
        return cls(index, {i: 1})

    @classmethod
    def of(cls, index, sub):
        return cls(index, {index.index_of(sub): 1})

    @property
    def coeffs(self):
        out = [0] * len(self.index)
        for i, k in self.terms.items():
            out[i] = k
        return out

    def __getitem__(self, i):
        return self.terms.get(i, 0)

    def _same(self, other):
        if not isinstance(other, BurnsideElement):
            return NotImplemented
        if other.index is not self.index:
            raise AmbientMismatch("Burnside elements over different lattices")
        return True

    def __add__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        out = dict(self.terms)
        for i, k in other.terms.items():
            out[i] = out.get(i, 0) + k
        return BurnsideElement(self.index, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return BurnsideElement(self.index, {i: -k for i, k in self.terms.items()})

    def __rmul__(self, k):
        if isinstance(k, int):
            return BurnsideElement(self.index, {i: k * v for i, v in self.terms.items()})
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, int):
            return other * self
        return product(self, other)

    def __eq__(self, other):
        if not isinstance(other, BurnsideElement):
            return NotImplemented
        return self.index is other.index and self.terms == other.terms

    def __hash__(self):
        return hash((id(self.index), frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"BurnsideElement({pretty(self)})"

    def to_json(self):
        return {str(i): k for i, k in sorted(self.terms.items())}


def zero(index):
    return BurnsideElement(index)


def product(x, y):
    """Bilinear product: ``L * M = [top : L v M] (L ^ M)``."""
    x._same(y)
    index = x.index
    top = index.top.order
    out = {}
    for i, a in x.terms.items():
        for j, b in y.terms.items():
            m = index.meet_index(i, j)
            w = top // index.orders[index.join_index(i, j)]
            out[m] = out.get(m, 0) + a * b * w
    return BurnsideElement(index, out)


def _coset_key(spec, g, sub_codes):
    return min(spec.add(g, s) for s in sub_codes)


def orbit_oracle_product(index, L, M):
    """Decompose ``top/L x top/M`` into orbits under the diagonal action."""
    spec = index.spec
    top = index.top.codes
    left = sorted({_coset_key(spec, g, L.codes) for g in top})
    right = sorted({_coset_key(spec, g, M.codes) for g in top})
    seen = set()
    out = {}
    for a in left:
        for b in right:
            if (a, b) in seen:
                continue
            stab = []
            for g in top:
                pt = (_coset_key(spec, spec.add(g, a), L.codes), _coset_key(spec, spec.add(g, b), M.codes))
                seen.add(pt)
                if pt == (a, b):
                    stab.append(g)
            pos = index.position.get(tuple(sorted(stab)))
            if pos is None:
                raise NotASubgroup("stabilizer is not in the section")
            out[pos] = out.get(pos, 0) + 1
    return BurnsideElement(index, out)


def transport(x, target):
    """Re-index ``x`` into ``target``, sending each subgroup ``S`` to itself.

    This is induction to a larger top, inflation from a quotient, or their
    composite (indufting) ``S/N -> S``.
    """
    out = {}
    for i, k in x.terms.items():
        pos = target.position.get(x.index.subgroups[i].codes)
        if pos is None:
            raise NotASubgroup(f"{x.index.subgroups[i]!r} is not in the target lattice")
        out[pos] = k
    return BurnsideElement(target, out)


def induce(x, target):
    if not x.index.top.issubset(target.top) or x.index.bottom != target.bottom:
        raise NotASubgroup("induction needs a subgroup section with the same bottom")
    return transport(x, target)


def inflate(x, target):
    if x.index.top != target.top or not target.bottom.issubset(x.index.bottom):
        raise NotAQuotient("inflation needs a quotient section with the same top")
    return transport(x, target)


def induft(x, target):
    """Induction composed with inflation from a section ``K/N`` of ``target``."""
    src = x.index
    if not src.top.issubset(target.top) or not target.bottom.issubset(src.bottom):
        raise NotASubgroup("source is not a section of the target")
    return transport(x, target)


def restrict(x, target):
    """``Res_L M = [top : L v M] (L ^ M)`` into the sub-section with top ``L``."""
    src = x.index
    if target.bottom != src.bottom or not target.top.issubset(src.top):
        raise NotASubgroup("restriction needs a subgroup section with the same bottom")
    li = src.index_of(target.top)
    top = src.top.order
    out = {}
    for i, k in x.terms.items():
        m = target.index_of(src.subgroups[src.meet_index(li, i)])
        w = top // src.orders[src.join_index(li, i)]
        out[m] = out.get(m, 0) + k * w
    return BurnsideElement(target, out)


def deflate(x, target):
    """``Def M = (M v N)/N`` into the quotient section with bottom ``N``."""
    src = x.index
    if target.top != src.top or not src.bottom.issubset(target.bottom):
        raise NotAQuotient("deflation needs a quotient section with the same top")
    ni = src.index_of(target.bottom)
    out = {}
    for i, k in x.terms.items():
        j = target.index_of(src.subgroups[src.join_index(ni, i)])
        out[j] = out.get(j, 0) + k
    return BurnsideElement(target, out)


# ----------------------------------------------- relative structure on G x C_p

def module_action(amb, m, j):
    """``M * (K x rho) = [G : K v M] ((K ^ M) x rho|)`` for ``M = G[m]``, graph ``j``."""
    if not amb.is_graph[j]:
        raise AmbientMismatch("module action is defined on graph subgroups")
    k = amb.domain[j]
    w = amb.g.top.order // amb.g.orders[amb.g.join_index(k, m)]
    return BurnsideElement(amb.gamma, {amb.restrict_graph(j, m): w})


def is_relative(x, amb):
    return all(amb.is_graph[i] for i in x.terms)


def project_nongraph(x, amb):
    return BurnsideElement(x.index, {i: k for i, k in x.terms.items() if not amb.is_graph[i]})


class SignatureElement:
    """An element of B(G) on the canonical basis of ``G``'s subgroups."""

    __slots__ = ("index", "terms")

    def __init__(self, index, terms):
        self.index = index
        self.terms = {i: k for i, k in terms.items() if k}

    @property
    def coeffs(self):
        out = [0] * len(self.index)
        for i, k in self.terms.items():
            out[i] = k
        return out

    def __eq__(self, other):
        return isinstance(other, SignatureElement) and self.index is other.index and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"SignatureElement({self.terms})"


def signature(x, amb):
    """``L x C_p -> L``, every other basis subgroup to zero."""
    back = {j: i for i, j in enumerate(amb.times_cp)}
    return SignatureElement(amb.g, {back[i]: k for i, k in x.terms.items() if i in back})


def signature_section(y, amb):
    """The section ``L -> L x C_p`` of the signature."""
    return BurnsideElement(amb.gamma, {amb.times_cp[i]: k for i, k in y.terms.items()})


# ------------------------------------------------------------------ printing

def subgroup_label(index, i):
    s = index.subgroups[i]
    if i == index.top_index:
        return "Γ"
    if s == index.bottom:
        return "1"
    gens = ",".join("(" + ",".join(map(str, g)) + ")" for g in s.generators)
    return f"⟨{gens}⟩"


def pretty(x, labels=None, key=None):
    """Render as ``1 − ⟨a⟩ + 2Γ``; ``labels`` maps positions to names, ``key`` orders terms."""
    if not x.terms:
        return "0"
    parts = []
    for n, i in enumerate(sorted(x.terms, key=key)):
        k = x.terms[i]
        name = labels[i] if labels and i in labels else subgroup_label(x.index, i)
        mag = "" if abs(k) == 1 else str(abs(k))
        if n == 0:
            parts.append(("−" if k < 0 else "") + mag + name)
        else:
            parts.append(("− " if k < 0 else "+ ") + mag + name)
    return " ".join(parts)
