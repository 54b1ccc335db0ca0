"""Command-line front end.

Exit codes: 0 success, 1 a mathematical check failed (or the element is not a
relation), 2 bad input, 3 internal contract violation such as a missing
certificate.
"""

import argparse
import csv
import io
import json
import sys

from .burnside import BurnsideElement, pretty
from .errors import NoCertificate, NotARelation, RelBrauerError, VerificationFailure
from .groups import DEFAULT_MAX_LOG_ORDER, abelian_family, is_prime, parse_group_spec
from .lattice import all_subgroups, ambient
from .relations import context, decompose_relation, kernel_absolute, kernel_relative
from .verify import KLEIN, kahn_report, label_names, verify_main_theorem

EXIT_OK, EXIT_FALSIFIED, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3

FORMATS = {
    "subgroups": ("json", "csv", "dot", "pretty"),
    "kernel": ("json", "csv", "pretty"),
    "verify": ("json", "csv", "pretty"),
    "sweep": ("json", "csv", "pretty"),
    "decompose": ("json", "pretty"),
    "example-kahn": ("json", "pretty"),
}

CSV_COLUMNS = ["group", "|Γ|", "#subgroups", "#cyclic", "rank kΓ", "rank kRel", "thm3_7_equal", "thm5_5_index"]


class InputError(Exception):
    pass


def _dump(obj):
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def _labels(G):
    return label_names(ambient(G)) if G == KLEIN else None


def _show(x, labels):
    if labels is None:
        return pretty(x)
    return pretty(x, labels, key=lambda i: int(labels[i][1:]))


def _power_text(n, p):
    if n is None:
        return ""
    k = 0
    while n % p == 0 and n > 1:
        n //= p
        k += 1
    return f"{p}^{k}" if n == 1 else str(n * p ** k)


def _csv_text(rows, header):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _rank_row(report, G):
    gamma = all_subgroups(G.with_cp())
    r = report["ranks"]
    return [report["group"], gamma.top.order, len(gamma), r["cyclicGamma"], r["kGamma"], r["kRel"],
            str(report["theorem3_7"]["equal"]).lower(), _power_text(report["theorem5_5"]["index"], G.p)]


# ---------------------------------------------------------------- commands

def cmd_subgroups(args):
    G = parse_group_spec(args.group)
    index = all_subgroups(G)
    if args.format == "dot":
        return EXIT_OK, index.to_dot()
    if args.format == "json":
        return EXIT_OK, _dump(index.to_json())
    if args.format == "csv":
        rows = [[i, s.order, " ".join("(" + ",".join(map(str, g)) + ")" for g in s.generators),
                 str(index.cyclic_flags[i]).lower()] for i, s in enumerate(index.subgroups)]
        return EXIT_OK, _csv_text(rows, ["index", "order", "generators", "cyclic"])
    lines = [f"{G}: {len(index)} subgroups, {len(index.covers)} covers"]
    for i, s in enumerate(index.subgroups):
        gens = ", ".join("(" + ",".join(map(str, g)) + ")" for g in s.generators) or "-"
        lines.append(f"#{i:<4} order {s.order:<5} gens {gens}")
    return EXIT_OK, "\n".join(lines) + "\n"


def cmd_kernel(args):
    """``K(G,C_p)`` with ``--relative``; otherwise the kernel ``K(G)`` of the named group itself."""
    G = parse_group_spec(args.group)
    if args.relative:
        index, lat, which = context(G).gamma, kernel_relative(G), "K(G,C_p)"
        labels = _labels(G)
    else:
        index = all_subgroups(G)
        lat, which = kernel_absolute(index), "K(G)"
        labels = label_names(ambient(KLEIN)) if G == KLEIN.with_cp() else None
    if args.format == "json":
        return EXIT_OK, _dump({"group": str(G), "kernel": which, "subgroups": len(index), **lat.to_json()})
    if args.format == "csv":
        rows = [[r, i, x] for r, row in enumerate(lat.sparse_rows) for i, x in sorted(row.items())]
        return EXIT_OK, _csv_text(rows, ["row", "subgroup", "coefficient"])
    lines = [f"{which} for G = {G}: rank {lat.rank}"]
    for row in lat.sparse_rows:
        lines.append("  " + _show(BurnsideElement(index, row), labels))
    return EXIT_OK, "\n".join(lines) + "\n"


def _report_text(report):
    lines = [f"{report['group']}: ranks {report['ranks']}",
             f"  generation by C_p^3 relations: equal={report['theorem3_7']['equal']} index={report['theorem3_7']['index']}",
             f"  selection basis: saturation_equal={report['theorem5_5']['saturation_equal']}"]
    for c in report["checks"]:
        lines.append(f"  [{'ok' if c['ok'] else 'FAIL'}] {c['name']}")
    return "\n".join(lines) + "\n"


def cmd_verify(args):
    G = parse_group_spec(args.group)
    report = verify_main_theorem(G, policy=args.policy, strict=False)
    ok = all(c["ok"] for c in report["checks"])
    if args.format == "json":
        text = _dump(report)
    elif args.format == "csv":
        text = _csv_text([_rank_row(report, G)], CSV_COLUMNS)
    else:
        text = _report_text(report)
    return (EXIT_OK if ok else EXIT_FALSIFIED), text


def cmd_sweep(args):
    if not is_prime(args.prime):
        raise InputError(f"{args.prime} is not prime")
    if args.max_order < 1:
        raise InputError("--max-order must be positive")
    groups = abelian_family(args.prime, args.max_order)
    if any(G.log_order > DEFAULT_MAX_LOG_ORDER for G in groups):
        raise InputError(f"--max-order exceeds the bound {args.prime}^{DEFAULT_MAX_LOG_ORDER}")
    reports = [verify_main_theorem(G, policy=args.policy, strict=False) for G in groups]
    ok = all(c["ok"] for r in reports for c in r["checks"])
    if args.format == "json":
        text = _dump({"prime": args.prime, "max_order": args.max_order, "groups": len(groups),
                      "all_ok": ok, "reports": reports})
    elif args.format == "csv":
        text = _csv_text([_rank_row(r, G) for r, G in zip(reports, groups)], CSV_COLUMNS)
    else:
        text = "".join(_report_text(r) for r in reports) + f"{len(groups)} groups, all_ok={ok}\n"
    return (EXIT_OK if ok else EXIT_FALSIFIED), text


def _read_element(path, gamma):
    try:
        raw = sys.stdin.read() if path == "-" else open(path, encoding="utf-8").read()
        data = json.loads(raw)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read element: {exc}") from exc
    if isinstance(data, dict) and "terms" in data:
        data = data["terms"]
    try:
        if isinstance(data, list):
            return BurnsideElement(gamma, [int(x) for x in data])
        if isinstance(data, dict):
            return BurnsideElement(gamma, {int(k): int(v) for k, v in data.items()})
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad element: {exc}") from exc
    raise InputError("element must be a JSON object {index: coefficient} or a coefficient list")


def cmd_decompose(args):
    G = parse_group_spec(args.group)
    gamma = context(G).gamma
    x = _read_element(args.element, gamma)
    cert = decompose_relation(G, x)
    if args.format == "json":
        return EXIT_OK, _dump({"group": str(G), **cert.to_json()})
    labels = _labels(G)
    lines = [f"target: {_show(x, labels)}"]
    for rec, k in cert.terms:
        lines.append(f"  {k:+d} x Induf from pair {rec.provenance}: {_show(rec.element, labels)}")
    return EXIT_OK, "\n".join(lines) + "\n"


def cmd_example_kahn(args):
    report = kahn_report(strict=False)
    ok = all(c["ok"] for c in report["checks"])
    if args.format == "json":
        text = _dump(report)
    else:
        lines = [f"C2 x C2 example: {len(report['labels'])} labelled subgroups"]
        lines += [f"  {k} = {v}" for k, v in report["generators"].items()]
        lines.append("  basis from the generators: " + "; ".join(report["example_basis"]))
        lines.append("  Kahn's basis: " + "; ".join(report["kahn_basis"]))
        lines += [f"  [{'ok' if c['ok'] else 'FAIL'}] {c['name']}" for c in report["checks"]]
        text = "\n".join(lines) + "\n"
    return (EXIT_OK if ok else EXIT_FALSIFIED), text


COMMANDS = {
    "subgroups": cmd_subgroups,
    "kernel": cmd_kernel,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
    "decompose": cmd_decompose,
    "example-kahn": cmd_example_kahn,
}


def build_parser():
    parser = argparse.ArgumentParser(prog="relbrauer",
                                     description="Brauer relations of G x C_p supported on graph subgroups, for abelian p-groups G.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text, group=True):
        p = sub.add_parser(name, help=help_text)
        if group:
            p.add_argument("--group", required=True, help='group spec "p:[e1,...]", e.g. "2:[2,1]"')
        p.add_argument("--format", default="json", help="one of " + ", ".join(FORMATS[name]))
        p.add_argument("--output", default="-", help="output file (default: standard output)")
        return p

    add("subgroups", "subgroup lattice of G")
    add("kernel", "kernel of the linearization map").add_argument(
        "--relative", action="store_true", help="relative kernel K(G,C_p) instead of K(G x C_p)")
    for name, text in (("verify", "check one group"), ("sweep", "check every abelian p-group up to an order")):
        p = add(name, text, group=name == "verify")
        p.add_argument("--policy", choices=("first", "last"), default="first",
                       help="which complement the selection list picks")
        if name == "sweep":
            p.add_argument("--prime", type=int, required=True)
            p.add_argument("--max-order", type=int, required=True)
    add("decompose", "certificate for a relative relation").add_argument(
        "--element", required=True, help="JSON file with {subgroup index: coefficient}, or - for stdin")
    add("example-kahn", "the worked C2 x C2 example", group=False)
    return parser


def _write(path, text):
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    if args.format not in FORMATS[args.command]:
        print(f"error: format {args.format!r} is not available for {args.command}", file=sys.stderr)
        return EXIT_INPUT
    try:
        code, text = COMMANDS[args.command](args)
    except (InputError, ValueError) as exc:
        if isinstance(exc, NotARelation):
            print(f"not a relation: {exc}", file=sys.stderr)
            return EXIT_FALSIFIED
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoCertificate as exc:
        print(f"falsification: {exc}", file=sys.stderr)
        _write(args.output, _dump({"error": str(exc), "diagnostics": exc.diagnostics}))
        return EXIT_INTERNAL
    except VerificationFailure as exc:
        print(f"falsification: {exc}", file=sys.stderr)
        return EXIT_FALSIFIED
    except RelBrauerError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    try:
        _write(args.output, text)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return code


if __name__ == "__main__":
    sys.exit(main())
