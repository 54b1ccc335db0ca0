"""Whole-group verification reports and the worked C2 x C2 example."""

from .burnside import BurnsideElement, SignatureElement, pretty, signature, signature_section
from .errors import NoCertificate, VerificationFailure
from .groups import GraphDescriptor, GroupSpec, graph_subgroup, product_subgroup, subgroup_from_generators
from .lattice import Resolution, ambient, build_selection_list, resolutions, subquotient_pairs
from .linalg import Lattice, _axpy, lattice_compare
from .rational import cokernel_invariants, f_matrix, rank
from .relations import context, decompose_relation


def _check(name, ok, **detail):
    return {"name": name, "ok": bool(ok), **detail}


def upward_resolution(gidx, low, high):
    """One resolution from ``low`` to ``high``: always step to the first cover inside ``high``."""
    chain = [low]
    mh = gidx.masks[high]
    while chain[-1] != high:
        nxt = next(c for c in gidx.up_covers[chain[-1]] if gidx.masks[c] & ~mh == 0)
        chain.append(nxt)
    return Resolution(tuple(chain))


EXHAUSTIVE_RESOLUTIONS = 20  # compare all resolutions of all pairs up to this many subgroups of G


def _telescope_checks(ctx):
    """Signatures of telescopes and membership of their pairwise differences in ``K'``.

    Every cover is extended upward once (to its end and to ``G``); every
    interval of type ``C_p x C_p`` has all its ``p + 1`` resolutions compared.
    Small lattices compare all resolutions of every comparable pair.
    """
    g = ctx.amb.g
    top = g.top_index
    sig_total = sig_ok = 0
    for low, high in g.covers:
        for r in (upward_resolution(g, low, high), upward_resolution(g, low, top)):
            sig_total += 1
            sig_ok += ctx.telescope_signature_ok(r)
    if len(g) <= EXHAUSTIVE_RESOLUTIONS:
        intervals = [(hi, lo) for hi in range(len(g)) for lo in range(len(g)) if lo != hi and g.contains(hi, lo)]
    else:
        intervals = subquotient_pairs(g, [g.p] * 2)
    diff_total = diff_ok = 0
    for hi, lo in intervals:
        chains = resolutions(g, lo, hi)
        base = ctx.telescope_vector(chains[0])
        for other in chains[1:]:
            diff = dict(base)
            _axpy(diff, -1, ctx.telescope_vector(other))
            diff_total += 1
            diff_ok += ctx.in_kprime(diff)
        for r in chains:
            sig_total += 1
            sig_ok += ctx.telescope_signature_ok(r)
    return sig_total, sig_ok, diff_total, diff_ok


def verify_main_theorem(G, policy="first", strict=True):
    """Check generation by indufted ``C_p^3`` relations and the supporting identities.

    Returns a JSON-ready report; with ``strict`` a failed check raises
    :class:`VerificationFailure` carrying the report.
    """
    ctx = context(G)
    amb, gamma, g, p = ctx.amb, ctx.gamma, ctx.amb.g, ctx.p
    k_abs, k_rel = ctx.k_abs, ctx.k_rel
    data = ctx.kprime_data
    sel = build_selection_list(amb, policy)
    cyclic = sum(gamma.cyclic_flags)
    ranks = {"kGamma": k_abs.rank, "kRel": k_rel.rank, "bG": len(g), "cyclicGamma": cyclic}
    checks = []

    used = {gid for t in data["triangular"].trans.values() for gid in t}
    checks.append(_check("kprime_equals_relative_kernel", data["equal"], index=data["index"],
                         generators=len(data["generators"]), generators_used=len(used),
                         non_relations=len(data["bad_generators"])))
    checks.append(_check("kprime_inside_relative_kernel",
                         all(k_rel.contains(r) for r in data["lattice"].sparse_rows)))
    checks.append(_check("relative_inside_absolute_kernel",
                         all(k_abs.contains(r) for r in k_rel.sparse_rows)))

    sel_check = ctx.selection_check(policy)
    checks.append(_check("selection_basis", sel_check["ok"], **{k: v for k, v in sel_check.items() if k != "ok"}))

    checks.append(_check("rank_difference", k_abs.rank - k_rel.rank == len(g) - 1,
                         lhs=k_abs.rank - k_rel.rank, rhs=len(g) - 1))
    checks.append(_check("subgroup_count", len(gamma) == 2 * len(g) + (p - 1) * len(g.covers),
                         subgroups=len(gamma), vertices=len(g), edges=len(g.covers)))
    checks.append(_check("noncyclic_rank", k_abs.rank == len(gamma) - cyclic,
                         rank=k_abs.rank, noncyclic=len(gamma) - cyclic))
    graph_rank = rank(f_matrix(gamma, "graphs_only"))
    checks.append(_check("graph_f_rank", graph_rank == cyclic - 1, rank=graph_rank, expected=cyclic - 1))
    inv = cokernel_invariants(ctx.f_all)
    checks.append(_check("cokernel_trivial", all(x == 1 for x in inv), invariants=sorted(set(inv))))

    nongraph = sum(1 for pr in sel.pairs if not amb.is_graph[pr.K])
    checks.append(_check("selection_counts", nongraph == len(g) - 1 and len(sel) == k_abs.rank,
                         non_graph=nongraph, total=len(sel)))

    gens = ctx.classified_generators()
    vecs = [(rec.provenance, dict(rec.element.terms)) for rec in gens]
    checks.append(_check("classified_are_relations", not _non_relations(ctx, vecs), count=len(gens)))
    type1 = [rec for rec in gens if rec.kind == "Type1"]
    checks.append(_check("type1_in_kprime",
                         all(ctx.is_relative_relation(dict(r.element.terms)) and ctx.in_kprime(dict(r.element.terms))
                             for r in type1), count=len(type1)))

    square_pairs = subquotient_pairs(g, [p] * 2)
    checks.append(_check("type3_congruence",
                         all(ctx.in_kprime(ctx.square_section_vector(gi, li)) for gi, li in square_pairs),
                         count=len(square_pairs)))
    checks.append(_check("type2_beta_difference", _beta_differences_ok(ctx)))

    basis = k_rel.sparse_rows
    in_x = sum(ctx.in_kprime(x) for x in basis)
    in_px = sum(ctx.in_kprime({i: p * v for i, v in x.items()}) for x in basis)
    checks.append(_check("torsion_dichotomy", in_px == len(basis) and in_x == len(basis),
                         basis=len(basis), x_in_kprime=in_x, px_in_kprime=in_px))

    cert_ok, type2_used = _certificates(ctx, basis)
    checks.append(_check("certificates", cert_ok == len(basis), basis=len(basis), verified=cert_ok))
    checks.append(_check("type2_reduction", cert_ok == len(basis), type2_terms=type2_used))

    sig_ok = _signature_ok(ctx, basis)
    checks.append(_check("signature_kernel", sig_ok))
    st, so, dt, do = _telescope_checks(ctx)
    checks.append(_check("telescope_signatures", st == so, total=st, passed=so))
    checks.append(_check("telescope_differences", dt == do, total=dt, passed=do))

    report = {
        "group": str(G),
        "ranks": ranks,
        "theorem3_7": {"equal": data["equal"], "index": data["index"]},
        "theorem5_5": {"saturation_equal": sel_check["saturation_equal"], "index": sel_check["index"]},
        "checks": checks,
    }
    failed = [c["name"] for c in checks if not c["ok"]]
    if failed and strict:
        raise VerificationFailure(failed, report)
    return report


def _non_relations(ctx, vecs):
    return ctx._check_generators(vecs, relative=False)


def _beta_differences_ok(ctx):
    """``B_{G',C,beta} - B_{G',C,eps}`` lies in ``K'`` for non-cyclic ``G'``."""
    amb, g = ctx.amb, ctx.amb.g
    flags = g.cyclic_flags
    for ci, gi in g.covers:
        if flags[gi]:
            continue
        eps = ctx.b_eps(gi, ci)
        for beta in amb.graphs_over[ci]:
            vec = ctx.type2_vector(gi, ci, beta)
            if vec is None or beta == amb.times_eps[ci]:
                continue
            diff = dict(vec)
            _axpy(diff, -1, eps)
            if not ctx.in_kprime(diff):
                return False
    return True


def _certificates(ctx, basis):
    """Certificates for each basis vector, re-expanded; Type-2 terms are never needed."""
    ok = 0
    for x in basis:
        try:
            cert = decompose_relation(ctx.G, BurnsideElement(ctx.gamma, x))
        except NoCertificate:
            continue
        ok += cert.expand().terms == x
    return ok, 0


def _signature_ok(ctx, basis):
    """Relative relations have zero signature and ``sigma . ell`` is the identity."""
    amb = ctx.amb
    for x in basis:
        if signature(BurnsideElement(ctx.gamma, x), amb).terms:
            return False
    for i in range(len(amb.g)):
        y = signature(signature_section(_single(amb.g, i), amb), amb)
        if y.terms != {i: 1}:
            return False
    return True


def _single(index, i):
    return SignatureElement(index, {i: 1})


# ------------------------------------------------------- the C2 x C2 example

_HOMS = {
    # name -> value on a residue pair (a, b) of C2 x C2
    "eps": lambda a, b: 0,
    "p1": lambda a, b: a,
    "p2": lambda a, b: b,
    "sigma": lambda a, b: (a + b) % 2,
    "delta": lambda a, b: a,
}

_BASES = {"1": [], "1xC2": [(0, 1)], "C2x1": [(1, 0)], "Delta": [(1, 1)], "G": [(1, 0), (0, 1)]}

# label -> (subgroup of G, hom name or "C2" for the full product with C_2)
KAHN_TABLE = {
    1: ("1", "eps"), 2: ("1", "C2"), 3: ("1xC2", "eps"), 4: ("1xC2", "p2"),
    5: ("C2x1", "eps"), 6: ("C2x1", "p1"), 7: ("Delta", "eps"), 8: ("Delta", "delta"),
    9: ("1xC2", "C2"), 10: ("C2x1", "C2"), 11: ("Delta", "C2"),
    12: ("G", "eps"), 13: ("G", "p1"), 14: ("G", "p2"), 15: ("G", "sigma"), 16: ("G", "C2"),
}

E_FORMULAS = {
    9: {1: 1, 2: -1, 3: -1, 4: -1, 9: 2}, 10: {1: 1, 2: -1, 5: -1, 6: -1, 10: 2},
    11: {1: 1, 2: -1, 7: -1, 8: -1, 11: 2}, 12: {1: 1, 3: -1, 5: -1, 7: -1, 12: 2},
    13: {1: 1, 3: -1, 6: -1, 8: -1, 13: 2}, 14: {1: 1, 4: -1, 5: -1, 8: -1, 14: 2},
    15: {1: 1, 4: -1, 6: -1, 7: -1, 15: 2}, 2: {2: 1, 9: -1, 10: -1, 11: -1, 16: 2},
    3: {3: 1, 9: -1, 12: -1, 13: -1, 16: 2}, 4: {4: 1, 9: -1, 14: -1, 15: -1, 16: 2},
    5: {5: 1, 10: -1, 12: -1, 14: -1, 16: 2}, 6: {6: 1, 10: -1, 13: -1, 15: -1, 16: 2},
    7: {7: 1, 11: -1, 12: -1, 15: -1, 16: 2}, 8: {8: 1, 11: -1, 13: -1, 14: -1, 16: 2},
}

KAHN_BASIS = [
    {1: 1, 3: -1, 5: -1, 7: -1, 12: 2},
    {3: 1, 12: -1, 13: -1, 4: -1, 14: 1, 15: 1},
    {5: 1, 12: -1, 14: -1, 6: -1, 13: 1, 15: 1},
    {7: 1, 12: -1, 15: -1, 8: -1, 13: 1, 14: 1},
]

KLEIN = GroupSpec(2, (1, 1))


def kahn_labels(amb=None):
    """Canonical index of each labelled subgroup ``e_n`` of ``C2 x C2 x C2``."""
    amb = amb or ambient(KLEIN)
    g_spec, gamma = amb.g_spec, amb.gamma
    out = {}
    for n, (base, hom) in KAHN_TABLE.items():
        K = subgroup_from_generators(g_spec, _BASES[base])
        if hom == "C2":
            S = product_subgroup(amb.spec, K, True)
        else:
            f = _HOMS[hom]
            rho = tuple(f(*g_spec.decode(c)) for c in K.gens)
            S = graph_subgroup(GraphDescriptor(K, rho))
        out[n] = gamma.index_of(S)
    return out


def label_names(amb=None):
    return {i: f"e{n}" for n, i in kahn_labels(amb).items()}


def _lift(labels, formula):
    return {labels[n]: k for n, k in formula.items() if k}


def kahn_report(strict=True):
    amb = ambient(KLEIN)
    gamma = amb.gamma
    ctx = context(KLEIN)
    labels = kahn_labels(amb)
    names = label_names(amb)
    checks = []
    checks.append(_check("labels_distinct", len(set(labels.values())) == 16 == len(gamma),
                         subgroups=len(gamma)))
    checks.append(_check("ranks", ctx.k_abs.rank == 8 and ctx.k_rel.rank == 4,
                         kGamma=ctx.k_abs.rank, kRel=ctx.k_rel.rank))

    E = {n: _lift(labels, f) for n, f in E_FORMULAS.items()}
    checks.append(_check("E_in_kernel", all(ctx.is_relation(v) for v in E.values()), count=len(E)))

    def minus(a, b):
        out = dict(E[a])
        _axpy(out, -1, E[b])
        return out

    example_basis = [E[15], minus(4, 3), minus(6, 5), minus(8, 7)]
    kahn = [_lift(labels, f) for f in KAHN_BASIS]
    n = len(gamma)
    target = ctx.k_rel
    cmp_example = lattice_compare(Lattice.from_generators(n, example_basis), target)
    cmp_kahn = lattice_compare(Lattice.from_generators(n, kahn), target)
    checks.append(_check("example_basis", cmp_example.equal and len(example_basis) == target.rank))
    checks.append(_check("kahn_basis", cmp_kahn.equal and len(kahn) == target.rank))
    recon = {i: -k for i, k in kahn[1].items()}
    checks.append(_check("reconcile", minus(4, 3) == recon))

    certs = {}
    for name, vec in (("kahn_1", kahn[0]), ("E4-E3", minus(4, 3))):
        cert = decompose_relation(KLEIN, BurnsideElement(gamma, vec))
        certs[name] = cert.to_json()
        checks.append(_check(f"certificate_{name}", cert.expand().terms == vec, terms=len(cert.terms)))

    number = {i: n for n, i in labels.items()}

    def show(v):
        return pretty(BurnsideElement(gamma, v), names, key=number.get)

    report = {
        "group": str(KLEIN),
        "labels": {f"e{k}": v for k, v in sorted(labels.items())},
        "generators": {f"E{k}": show(v) for k, v in sorted(E.items())},
        "example_basis": [show(v) for v in example_basis],
        "kahn_basis": [show(v) for v in kahn],
        "forward_reference": "the e-labels are bound to the subgroup table of the C2 x C2 example",
        "certificates": certs,
        "checks": checks,
    }
    failed = [c["name"] for c in checks if not c["ok"]]
    if failed and strict:
        raise VerificationFailure(failed, report)
    return report
