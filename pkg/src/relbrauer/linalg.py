"""Exact integer linear algebra: normal forms, kernels and lattices.

Row-vector convention throughout: a matrix acts on the right of row vectors,
lattices are spanned by rows, and the kernel of ``a`` is ``{x : x a = 0}``.

Dense matrices are lists of lists of Python ints.  The workhorse for large
inputs is :class:`Echelon`, an incremental row echelon form over sparse
``{column: value}`` dicts that can also record how each row was obtained
from the inserted generators.
"""

import heapq
from dataclasses import dataclass
from functools import cached_property

from .errors import DimensionMismatch


def xgcd(a, b):
    """``(g, x, y)`` with ``x*a + y*b == g == gcd(a, b) >= 0``."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def _axpy(v, q, r):
    """``v += q * r`` in place for sparse dicts; returns the keys that appeared."""
    new = []
    for k, x in r.items():
        y = v.get(k)
        if y is None:
            v[k] = q * x
            new.append(k)
        else:
            y += q * x
            if y:
                v[k] = y
            else:
                del v[k]
    return new


def _lincomb(a, u, b, w):
    """Sparse ``a*u + b*w``."""
    out = {}
    for k, x in u.items():
        out[k] = a * x
    for k, x in w.items():
        y = out.get(k, 0) + b * x
        if y:
            out[k] = y
        else:
            out.pop(k, None)
    return {k: x for k, x in out.items() if x}


def to_sparse(row):
    return {j: x for j, x in enumerate(row) if x}


def to_dense(vec, dim):
    out = [0] * dim
    for j, x in vec.items():
        out[j] = x
    return out


class Echelon:
    """Incremental integer row echelon form.

    Every pivot row has a positive leading entry and a distinct leading
    column.  Insertion applies only unimodular row operations, so with
    ``track=True`` the recorded transforms of the pivot rows together with the
    transforms returned for rows that reduced to zero form a unimodular change
    of basis of the inserted generators.
    """

    def __init__(self, dim, track=False):
        self.dim = dim
        self.track = track
        self.rows = {}
        self.trans = {}

    def __len__(self):
        return len(self.rows)

    @property
    def rank(self):
        return len(self.rows)

    def pivots(self):
        return sorted((c, r[c]) for c, r in self.rows.items())

    def add(self, vec, tag=None, trans=None):
        """Insert a sparse row.

        Returns the transform of the zero remainder (a relation among the
        inserted rows) when the row was dependent, otherwise ``None``.  With
        tracking, ``trans`` overrides the initial transform ``{tag: 1}``.
        """
        v = {k: x for k, x in vec.items() if x}
        t = None
        if self.track:
            t = dict(trans) if trans is not None else {tag: 1}
        heap = list(v)
        heapq.heapify(heap)
        rows, trans = self.rows, self.trans
        while v:
            c = heapq.heappop(heap)
            if c not in v:
                continue
            a = v[c]
            r = rows.get(c)
            if r is None:
                if a < 0:
                    v = {k: -x for k, x in v.items()}
                    if t is not None:
                        t = {k: -x for k, x in t.items()}
                rows[c] = v
                if t is not None:
                    trans[c] = t
                return None
            b = r[c]
            if a % b == 0:
                q = a // b
                for k in _axpy(v, -q, r):
                    heapq.heappush(heap, k)
                if t is not None:
                    _axpy(t, -q, trans[c])
                continue
            g, x, y = xgcd(b, a)
            new_row = _lincomb(x, r, y, v)
            other = _lincomb(a // g, r, -(b // g), v)
            if t is not None:
                rt = trans[c]
                trans[c] = _lincomb(x, rt, y, t)
                t = _lincomb(a // g, rt, -(b // g), t)
            rows[c] = new_row
            v = other
            heap = list(v)
            heapq.heapify(heap)
        return t if t is not None else {}

    def reduce(self, vec):
        """Reduce ``vec`` by the pivot rows.

        Returns ``(remainder, combination)`` where ``combination`` maps pivot
        columns to the multiples that were subtracted, so that
        ``vec = remainder + sum(q * rows[c])``.
        """
        v = {k: x for k, x in vec.items() if x}
        combo = {}
        heap = list(v)
        heapq.heapify(heap)
        rows = self.rows
        while v and heap:
            c = heapq.heappop(heap)
            if c not in v:
                continue
            r = rows.get(c)
            if r is None:
                break
            a, b = v[c], r[c]
            if a % b:
                break
            q = a // b
            combo[c] = combo.get(c, 0) + q
            for k in _axpy(v, -q, r):
                heapq.heappush(heap, k)
        return v, combo

    def contains(self, vec):
        rem, _ = self.reduce(vec)
        return not rem

    def solve(self, vec):
        """Coefficients over the inserted tags expressing ``vec``, or ``None``."""
        if not self.track:
            raise ValueError("solve needs an echelon built with track=True")
        rem, combo = self.reduce(vec)
        if rem:
            return None
        out = {}
        for c, q in combo.items():
            _axpy(out, q, self.trans[c])
        return {k: x for k, x in out.items() if x}

    def in_span_q(self, vec):
        """Rational membership: is some nonzero multiple of ``vec`` in the span?"""
        v = {k: x for k, x in vec.items() if x}
        heap = list(v)
        heapq.heapify(heap)
        while v:
            c = heapq.heappop(heap)
            if c not in v:
                continue
            r = self.rows.get(c)
            if r is None:
                return False
            a, b = v[c], r[c]
            g = xgcd(a, b)[0]
            v = _lincomb(b // g, v, -(a // g), r)
            heap = list(v)
            heapq.heapify(heap)
        return True

    def hermite(self):
        """Reduce entries above pivots into ``[0, pivot)``; returns sorted pivot columns."""
        cols = sorted(self.rows)
        rows, trans = self.rows, self.trans
        holders = {}
        for c in cols:
            for k in rows[c]:
                if k != c:
                    holders.setdefault(k, set()).add(c)
        for c in cols:
            r = rows[c]
            d = r[c]
            for h in sorted(holders.get(c, ())):
                if h >= c:
                    continue
                row = rows[h]
                x = row.get(c, 0)
                q = x // d
                if not q:
                    continue
                for k in _axpy(row, -q, r):
                    if k != h:
                        holders.setdefault(k, set()).add(h)
                if c not in row:
                    holders[c].discard(h)
                if self.track:
                    _axpy(trans[h], -q, trans[c])
                    trans[h] = {k: y for k, y in trans[h].items() if y}
        return cols


class UnitEchelon:
    """Span of many sparse integer rows, kept as ``span(U) + span(D)``.

    ``U`` holds rows with pivot entry 1 in a column that is zero in every
    other stored row; rows without any entry +-1 after reduction are deferred
    to ``D``.  ``Z^n = span(U) + Z^rest`` with ``rest`` the non-pivot columns,
    so covolumes reduce to the deferred part, which is usually small.
    """

    def __init__(self):
        self.rows = {}
        self.where = {}  # column -> pivot columns of U-rows that use it
        self.deferred = []

    def reduce(self, vec):
        """Eliminate the pivot columns of ``U`` (one pass suffices)."""
        v = {k: x for k, x in vec.items() if x}
        rows = self.rows
        for c in [c for c in v if c in rows]:
            q = v.get(c)
            if q:
                _axpy(v, -q, rows[c])
        return v

    def add(self, vec):
        """Insert a row; returns ``False`` when it visibly lies in ``U``'s span."""
        v = self.reduce(vec)
        if not v:
            return False
        self._place(v)
        return True

    def _place(self, v):
        units = [c for c, x in v.items() if x == 1 or x == -1]
        if not units:
            self.deferred.append(v)
            return
        where = self.where
        c = min(units, key=lambda k: (len(where.get(k, ())), k))
        if v[c] < 0:
            v = {k: -x for k, x in v.items()}
        for r in sorted(where.pop(c, ())):
            row = self.rows[r]
            q = row[c]
            for k, x in v.items():
                y = row.get(k, 0) - q * x
                if y:
                    if k not in row and k != c:
                        where.setdefault(k, set()).add(r)
                    row[k] = y
                else:
                    row.pop(k, None)
                    if k != c:
                        where[k].discard(r)
        self.rows[c] = v
        for k in v:
            if k != c:
                where.setdefault(k, set()).add(c)

    def settle(self):
        """Re-reduce deferred rows until none of them can join ``U``."""
        while True:
            pending, self.deferred = self.deferred, []
            promoted = False
            for v in pending:
                if any(c in self.rows for c in v):
                    v = self.reduce(v)
                if not v:
                    continue
                if any(x in (1, -1) for x in v.values()):
                    promoted = True
                self._place(v)
            if not promoted:
                break

    def covolume(self, dim):
        """``[Z^dim : span]`` for a full-rank span in ``Z^dim``, else ``None``."""
        self.settle()
        return covolume(self.deferred, dim - len(self.rows))


_BIG_PRIME = (1 << 61) - 1


def independent_rows(vectors, limit=None):
    """Indices of a maximal independent subset, found modulo a large prime.

    Independence mod a prime implies independence over Q; the returned set
    can only be too small if the prime divides some minor, which callers
    detect through a rank shortfall.
    """
    q = _BIG_PRIME
    rows = {}
    chosen = []
    for i, vec in enumerate(vectors):
        v = {k: x % q for k, x in vec.items() if x % q}
        while v:
            c = min(v)
            row = rows.get(c)
            if row is None:
                inv = pow(v[c], -1, q)
                rows[c] = {k: x * inv % q for k, x in v.items()}
                chosen.append(i)
                break
            f = v[c]
            for k, x in row.items():
                y = (v.get(k, 0) - f * x) % q
                if y:
                    v[k] = y
                else:
                    v.pop(k, None)
        if limit is not None and len(chosen) == limit:
            break
    return chosen


def covolume(vectors, dim):
    """``[Z^dim : L]`` for ``L`` spanned by sparse ``vectors``; ``None`` if not full rank.

    A full-rank subset gives ``D = |det|`` with ``D Z^dim <= L``, so the
    Hermite form is computed modulo ``D``; the scan stops as soon as every
    pivot is 1.  The pivot rows lie in ``L`` and together with ``D Z^dim``
    they span it, which gives the exact answer otherwise.
    """
    if dim == 0:
        return 1
    chosen = independent_rows(vectors, dim)
    if len(chosen) < dim:
        return None
    cols = sorted({k for i in chosen for k in vectors[i]})
    if len(cols) != dim:
        return None
    where = {c: j for j, c in enumerate(cols)}
    d = abs(det([[vectors[i].get(c, 0) for c in cols] for i in chosen]))
    if d == 1:
        return 1
    piv = {j: {j: d} for j in range(dim)}
    ones = 0
    for vec in [vectors[i] for i in chosen] + vectors:
        if any(k not in where for k in vec):
            return None
        v = {where[k]: x % d for k, x in vec.items() if x % d}
        while v:
            c = min(v)
            row = piv[c]
            a, b = v[c], row[c]
            if a % b == 0:
                f = a // b
                for k, x in row.items():
                    y = (v.get(k, 0) - f * x) % d
                    if y:
                        v[k] = y
                    else:
                        v.pop(k, None)
                continue
            g, x1, y1 = xgcd(a, b)
            new = {}
            for k in set(v) | set(row):
                y = (x1 * v.get(k, 0) + y1 * row.get(k, 0)) % d
                if y:
                    new[k] = y
            new[c] = g
            rest = {}
            for k in set(v) | set(row):
                if k == c:
                    continue
                y = ((b // g) * v.get(k, 0) - (a // g) * row.get(k, 0)) % d
                if y:
                    rest[k] = y
            if b != 1 and g == 1:
                ones += 1
            piv[c] = new
            v = rest
        if ones == dim:
            return 1
    # every pivot row lies in L and L = span(rows) + D Z^dim
    return _determinant_mod(list(piv.values()), dim, d)


def _determinant_mod(rows, dim, modulus):
    """``[Z^dim : span(rows) + modulus Z^dim]`` by a column sweep.

    Requires that this index divides ``modulus`` (true whenever the rows
    contain a full-rank sublattice of determinant ``modulus``).

    After extracting the pivot ``g`` of a column, the part of the lattice
    supported on later columns has determinant dividing ``R / g`` and so
    contains ``(R / g) Z``; entries are reduced modulo that shrinking ``R``.
    """
    R = modulus
    total = 1
    active = [{k: x % R for k, x in r.items() if x % R} for r in rows]
    for c in range(dim):
        if R == 1:
            break
        w = None
        rest = []
        for r in active:
            if not r.get(c):
                rest.append(r)
                continue
            if w is None:
                w = r
                continue
            a, b = w[c], r[c]
            g, x, y = xgcd(a, b)
            keys = set(w) | set(r)
            new = {k: x * w.get(k, 0) + y * r.get(k, 0) for k in keys}
            other = {k: (b // g) * w.get(k, 0) - (a // g) * r.get(k, 0) for k in keys if k != c}
            new[c] = g
            rest.append(other)
            w = new
        g = R if w is None else xgcd(w[c], R)[0]
        total *= g
        R //= g
        active = []
        for r in rest:
            v = {k: x % R for k, x in r.items() if x % R}
            if v:
                active.append(v)
    return total


class UnitTriangular:
    """Rows with leading (leftmost) coefficient 1 in pairwise distinct columns.

    Such rows are independent and reduction against them never divides, so
    membership and coefficient recovery are plain forward substitution.  Each
    row carries the combination of tagged inputs that produced it.
    """

    def __init__(self):
        self.rows = {}
        self.trans = {}

    def __len__(self):
        return len(self.rows)

    def offer(self, vec, tag):
        """Keep ``vec`` if it leads with +-1 in a new column; returns whether it was kept."""
        if not vec:
            return False
        c = min(vec)
        x = vec[c]
        if c in self.rows or x not in (1, -1):
            return False
        self.rows[c] = dict(vec) if x == 1 else {k: -y for k, y in vec.items()}
        self.trans[c] = {tag: x}
        return True

    def reduce(self, vec, track=False):
        """Forward-reduce ``vec``; returns ``(remainder, combination)``.

        The remainder is zero exactly when ``vec`` lies in the span, and then
        ``vec = sum_t combination[t] * input_t``.
        """
        v = {k: x for k, x in vec.items() if x}
        combo = {} if track else None
        heap = list(v)
        heapq.heapify(heap)
        rows = self.rows
        while heap:
            c = heapq.heappop(heap)
            q = v.get(c)
            if not q:
                continue
            if c not in rows:
                break
            for k in _axpy(v, -q, rows[c]):
                heapq.heappush(heap, k)
            if track:
                _axpy(combo, q, self.trans[c])
        return v, combo

    def add_reduced(self, vec, tag_of):
        """Reduce ``vec`` and keep the remainder when it leads with a unit.

        ``tag_of`` gives the input combination of ``vec`` itself; the stored
        transform accounts for the reduction.
        """
        rest, _ = self.reduce(vec)
        if not rest:
            return False
        c = min(rest)
        if c in self.rows or rest[c] not in (1, -1):
            return False
        rest, combo = self.reduce(vec, track=True)
        trans = dict(tag_of)
        _axpy(trans, -1, combo)
        if rest[c] == -1:
            rest = {k: -y for k, y in rest.items()}
            trans = {k: -y for k, y in trans.items()}
        self.rows[c] = rest
        self.trans[c] = {k: y for k, y in trans.items() if y}
        return True


# ------------------------------------------------------------------ lattices

@dataclass(frozen=True)
class Lattice:
    """A sublattice of ``Z^n`` stored by its Hermite normal form.

    ``rows`` holds the nonzero HNF rows as tuples of ``(column, value)``
    pairs, so two lattices are equal exactly when their stored data agree.
    """

    ambient_dim: int
    rows: tuple = ()

    @classmethod
    def from_generators(cls, dim, gens):
        """HNF lattice spanned by rows given densely or as sparse dicts."""
        ech = Echelon(dim)
        for g in gens:
            ech.add(g if isinstance(g, dict) else to_sparse(g))
        return cls.from_echelon(ech)

    @classmethod
    def from_echelon(cls, ech):
        cols = ech.hermite()
        rows = tuple(tuple(sorted(ech.rows[c].items())) for c in cols)
        return cls(ech.dim, rows)

    @classmethod
    def zero(cls, dim):
        return cls(dim, ())

    @classmethod
    def full(cls, dim):
        return cls(dim, tuple(((j, 1),) for j in range(dim)))

    @classmethod
    def coordinate(cls, dim, cols):
        """The sublattice spanned by the unit vectors of ``cols``."""
        return cls(dim, tuple(((j, 1),) for j in sorted(set(cols))))

    @property
    def rank(self):
        return len(self.rows)

    @property
    def basis(self):
        return [to_dense(dict(r), self.ambient_dim) for r in self.rows]

    @property
    def pivots(self):
        return tuple(r[0] for r in self.rows)

    @cached_property
    def sparse_rows(self):
        return [dict(r) for r in self.rows]

    @cached_property
    def echelon(self):
        ech = Echelon(self.ambient_dim, track=True)
        for i, r in enumerate(self.sparse_rows):
            ech.rows[r_lead(r)] = r
            ech.trans[r_lead(r)] = {i: 1}
        return ech

    def contains(self, vec):
        if not isinstance(vec, dict):
            vec = to_sparse(vec)
        return self.echelon.contains(vec)

    def coordinates(self, vec):
        """Integer coefficients over ``rows`` expressing ``vec``, or ``None``."""
        if not isinstance(vec, dict):
            vec = to_sparse(vec)
        sol = self.echelon.solve(vec)
        if sol is None:
            return None
        return [sol.get(i, 0) for i in range(self.rank)]

    def determinant(self):
        """Product of the HNF pivots (the covolume in its own rational span)."""
        d = 1
        for _, x in self.pivots:
            d *= x
        return d

    def to_json(self):
        return {"ambient_dim": self.ambient_dim, "rank": self.rank, "basis": self.basis}


def r_lead(r):
    return min(r)


# ------------------------------------------------------------ dense forms

def identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a, b):
    if not a:
        return []
    cols = len(b[0]) if b else 0
    return [[sum(x * b[k][j] for k, x in enumerate(row) if x) for j in range(cols)] for row in a]


def transpose(a, ncols=None):
    if not a:
        return [[] for _ in range(ncols or 0)]
    return [list(col) for col in zip(*a)]


def det(a):
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _shape(a, ncols=None):
    rows = len(a)
    cols = len(a[0]) if rows else (ncols or 0)
    return rows, cols


def hnf(a, ncols=None):
    """Row Hermite normal form ``(h, u)`` with ``u`` unimodular and ``u a = h``.

    Pivots are positive, entries above a pivot lie in ``[0, pivot)`` and zero
    rows come last.
    """
    m, n = _shape(a, ncols)
    ech = Echelon(n, track=True)
    kernel = []
    for i, row in enumerate(a):
        t = ech.add(to_sparse(row), tag=i)
        if t is not None:
            kernel.append(t)
    cols = ech.hermite()
    h = [to_dense(ech.rows[c], n) for c in cols] + [[0] * n for _ in kernel]
    u = [to_dense(ech.trans[c], m) for c in cols] + [to_dense(t, m) for t in kernel]
    return h, u


def snf(a, ncols=None):
    """Smith normal form ``(s, u, v)`` with ``u a v = s`` and ``d_i | d_{i+1}``."""
    m, n = _shape(a, ncols)
    s = [list(r) for r in a]
    u = identity(m)
    v = identity(n)

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):
        if q:
            s[dst] = [x + q * y for x, y in zip(s[dst], s[src])]
            u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        if q:
            for row in s:
                row[dst] += q * row[src]
            for row in v:
                row[dst] += q * row[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(s[i][j]), i, j) for i in range(t, m) for j in range(t, n) if s[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            d = s[t][t]
            bad = False
            for i in range(t + 1, m):
                q = s[i][t] // d
                add_row(i, t, -q)
                if s[i][t]:
                    bad = True
            for j in range(t + 1, n):
                q = s[t][j] // d
                add_col(j, t, -q)
                if s[t][j]:
                    bad = True
            if not bad:
                # divisibility of the remaining block by the pivot
                culprit = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                                if s[i][j] % d), None)
                if culprit is None:
                    break
                add_row(t, culprit[0], 1)
                continue
            nz = [(abs(s[i][t]), i, t) for i in range(t, m) if s[i][t]]
            nz += [(abs(s[t][j]), t, j) for j in range(t, n) if s[t][j]]
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return s, u, v


def snf_diagonal(a, ncols=None):
    """Nonzero Smith invariants of ``a`` (via an HNF of the row space first)."""
    m, n = _shape(a, ncols)
    ech = Echelon(n)
    for row in a:
        ech.add(row if isinstance(row, dict) else to_sparse(row))
    cols = ech.hermite()
    small = [to_dense(ech.rows[c], n) for c in cols]
    s, _, _ = snf(small, n)
    return [s[i][i] for i in range(min(len(small), n)) if s[i][i]]


# ------------------------------------------------------------------- kernels

def kernel_vectors(rows, order=None):
    """A basis of ``{x : x a = 0}`` for ``a`` given by sparse rows.

    Rows are inserted in ``order`` (default: last row first).
    """
    ech = Echelon(None, track=True)
    out = []
    seq = range(len(rows) - 1, -1, -1) if order is None else order
    for i in seq:
        t = ech.add(rows[i], tag=i)
        if t is not None:
            out.append(t)
    return out


def kernel_lattice(a, ncols=None):
    """Full integer left kernel of ``a`` as an HNF lattice in ``Z^rows``."""
    m, _ = _shape(a, ncols)
    rows = [r if isinstance(r, dict) else to_sparse(r) for r in a]
    return Lattice.from_generators(m, kernel_vectors(rows))


def _check_dims(a, b):
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")


def lattice_sum(a, b):
    _check_dims(a, b)
    return Lattice.from_generators(a.ambient_dim, a.sparse_rows + b.sparse_rows)


def lattice_intersect(a, b):
    """``a`` meet ``b`` from the kernel of the stacked bases."""
    _check_dims(a, b)
    stacked = a.sparse_rows + b.sparse_rows
    gens = []
    for t in kernel_vectors(stacked, order=range(len(stacked))):
        vec = {}
        for i, q in t.items():
            if i < a.rank:
                _axpy(vec, q, a.sparse_rows[i])
        gens.append({k: x for k, x in vec.items() if x})
    return Lattice.from_generators(a.ambient_dim, gens)


def lattice_combine(a, b, mode):
    if mode == "sum":
        return lattice_sum(a, b)
    if mode == "intersect":
        return lattice_intersect(a, b)
    raise ValueError(f"unknown mode {mode!r}")


def saturation(lat):
    """``span_Q(lat) ∩ Z^n``: the left kernel of the orthogonal complement."""
    n = lat.ambient_dim
    cols = [dict() for _ in range(n)]
    for i, r in enumerate(lat.sparse_rows):
        for j, x in r.items():
            cols[j][i] = x
    perp = kernel_vectors(cols)
    perp_cols = [dict() for _ in range(n)]
    for i, y in enumerate(perp):
        for j, x in y.items():
            perp_cols[j][i] = x
    return Lattice.from_generators(n, kernel_vectors(perp_cols))


@dataclass(frozen=True)
class LatticeComparison:
    equal: bool
    a_in_b: bool
    index: object
    saturation_equal: bool


def same_rational_span(a, b):
    if a.rank != b.rank:
        return False
    ech = Echelon(a.ambient_dim)
    for r in a.sparse_rows:
        ech.add(r)
    return all(ech.in_span_q(r) for r in b.sparse_rows)


def lattice_compare(a, b):
    """Equality, containment ``a <= b``, the index ``[b : a]`` and rational-span equality."""
    _check_dims(a, b)
    equal = a.rows == b.rows
    a_in_b = equal or all(b.contains(r) for r in a.sparse_rows)
    index = None
    if a_in_b and a.rank == b.rank:
        index = a.determinant() // b.determinant()
    sat = equal or same_rational_span(a, b)
    return LatticeComparison(equal, a_in_b, index, sat)


def solve_in_span(gens, target):
    """Integer ``c`` with ``c . gens = target``, or ``None`` when no solution exists."""
    dim = len(target)
    ech = Echelon(dim, track=True)
    for i, g in enumerate(gens):
        ech.add(g if isinstance(g, dict) else to_sparse(g), tag=i)
    sol = ech.solve(target if isinstance(target, dict) else to_sparse(target))
    if sol is None:
        return None
    return [sol.get(i, 0) for i in range(len(gens))]


def is_unimodular(u):
    if any(len(r) != len(u) for r in u):
        return False
    return abs(det(u)) == 1


def is_power_of(n, p):
    if n < 1:
        return False
    while n % p == 0:
        n //= p
    return n == 1
