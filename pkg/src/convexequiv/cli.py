"""Command-line entry point.

Exit status: 0 on success, 1 when a check or assertion fails, 2 on bad usage
or unreadable input.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import GeometryError

SUBCOMMANDS = (
    "hausdorff", "minkowski", "invariant-point", "symmetry", "fixed-set", "containment",
    "blend", "properness", "constant-width", "demo", "verify-all",
)


class UsageError(Exception):
    pass


def _tol_pair(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got {text!r}")
    try:
        return name.strip(), float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {value!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="convexequiv", description="Equivariant maps on convex polytopes.",
                                allow_abbrev=False)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--seed", dest="g_seed", type=int, default=0, metavar="N", help="random seed (default 0)")
    p.add_argument("--trials", dest="g_trials", type=int, default=None, metavar="N", help="trial count for sampled checks")
    p.add_argument("--csv", dest="g_csv", default=None, metavar="PATH", help="also write tabular output to this CSV file")
    p.add_argument("--svg", dest="g_svg", default=None, metavar="PATH", help="write a figure to this file (.svg or .png)")
    p.add_argument("--tol", dest="g_tol", action="append", type=_tol_pair, default=[],
                   metavar="NAME=VALUE", help="override a named tolerance (repeatable)")
    sub = p.add_subparsers(dest="command", metavar="COMMAND")

    def add(name, help_):
        sp = sub.add_parser(name, help=help_, description=help_, allow_abbrev=False)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--trials", type=int, default=None)
        sp.add_argument("--csv", default=None)
        sp.add_argument("--svg", default=None)
        return sp

    sp = add("hausdorff", "Hausdorff distance between two bodies")
    sp.add_argument("--a", required=True, help="body document or path")
    sp.add_argument("--b", required=True)

    sp = add("minkowski", "Minkowski combination (1-t)A + tB")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--t", type=float, default=0.5)

    sp = add("invariant-point", "evaluate a selector on a body")
    sp.add_argument("--method", required=True, choices=[s.value for s in _selector_ids()])
    sp.add_argument("--body", required=True)

    sp = add("symmetry", "list the stabilizer of a body")
    sp.add_argument("--body", required=True)
    sp.add_argument("--group", default="Euclidean")

    sp = add("fixed-set", "fixed-point set of a body's stabilizer")
    sp.add_argument("--body", required=True)
    sp.add_argument("--group", default="Euclidean")

    sp = add("containment", "distance of each selector to the stabilizer's fixed set")
    sp.add_argument("--body", required=True)
    sp.add_argument("--group", default="Euclidean")
    sp.add_argument("--selectors", default=None, help="comma-separated selector ids (default all)")
    sp.add_argument("--tolerance", type=float, default=1e-6)

    sp = add("blend", "evaluate or verify an equivariant extension scenario")
    sp.add_argument("--scenario", required=True)
    mode = sp.add_mutually_exclusive_group(required=True)
    mode.add_argument("--probe", help="body to evaluate the extension on")
    mode.add_argument("--verify", action="store_true", help="run interpolation and equivariance checks")
    sp.add_argument("--probes", type=int, default=20)

    sp = add("properness", "sample the similarity properness bounds around a body")
    sp.add_argument("--body", required=True)
    sp.add_argument("--delta", type=float, required=True)

    sp = add("constant-width", "test whether a body has constant width")
    sp.add_argument("--body", required=True)
    sp.add_argument("--tol", dest="cw_tol", type=float, default=2e-3)

    sp = add("demo", "worked examples")
    sp.add_argument("name", choices=["segment-midpoint", "triangle-counterexample"])
    sp.add_argument("--a", default="0,0", help="segment endpoint, comma-separated")
    sp.add_argument("--b", default="0,1")
    sp.add_argument("--n-max", type=int, default=1000)

    sp = add("verify-all", "run every acceptance check")
    sp.add_argument("--filter", default=None, help="comma-separated criterion numbers or name fragments")
    return p


def _selector_ids():
    from .selectors import SelectorId

    return list(SelectorId)


def _resolve(args, name):
    own = getattr(args, name, None)
    return own if own is not None else getattr(args, "g_" + name)


def _write_csv(path, header_lines, columns, rows) -> str:
    buf = _io.StringIO()
    for line in header_lines:
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    text = buf.getvalue()
    if path:
        Path(path).write_text(text)
    return text


def _run_config(args):
    from .verify import RunConfig

    return RunConfig(seed=_resolve(args, "seed"), trials=_resolve(args, "trials"), overrides=dict(args.g_tol))


def _point_text(p) -> str:
    from .io import fmt

    return " ".join(fmt(v) for v in np.asarray(p, dtype=float).ravel())


def _cmd_hausdorff(args, out):
    from .body import hausdorff
    from .io import fmt, read_body

    out.write(fmt(hausdorff(read_body(args.a), read_body(args.b))) + "\n")
    return 0


def _cmd_minkowski(args, out):
    from .body import minkowski_combination
    from .io import body_doc, dumps, read_body

    out.write(dumps(body_doc(minkowski_combination(read_body(args.a), read_body(args.b), args.t))))
    return 0


def _cmd_invariant_point(args, out):
    from .io import dumps, read_body
    from .selectors import SelectorId, chebyshev, circumball, evaluate, john, lowner

    body = read_body(args.body)
    sel = SelectorId(args.method)
    doc = {"type": "invariant-point", "method": sel.value, "point": evaluate(sel, body)}
    if sel is SelectorId.CHEBYSHEV:
        doc["radius"] = chebyshev(body)[1]
    elif sel is SelectorId.CIRCUMCENTER:
        doc["radius"] = circumball(body)[1]
    elif sel is SelectorId.LOWNER_CENTER:
        doc["shape"] = lowner(body).shape
    elif sel is SelectorId.JOHN_CENTER:
        doc["shape"] = john(body).shape
    out.write(dumps(doc))
    return 0


def _cmd_symmetry(args, out):
    from .io import dumps, read_body, transform_doc
    from .symmetry import stabilizer

    stab = stabilizer(read_body(args.body), args.group)
    out.write(dumps({"type": "stabilizer", "group": stab.group.value, "order": len(stab),
                     "elements": [transform_doc(g) for g in stab]}))
    return 0


def _cmd_fixed_set(args, out):
    from .io import dumps, read_body
    from .symmetry import fixed_point_set, stabilizer

    F = fixed_point_set(stabilizer(read_body(args.body), args.group))
    out.write(dumps({"type": "affine-subspace", "dim": F.dim, "base": F.base, "directions": F.directions}))
    return 0


def _cmd_containment(args, out):
    from .io import fmt, read_body
    from .symmetry import check_containment

    sels = args.selectors.split(",") if args.selectors else None
    fixed, rows = check_containment(read_body(args.body), sels, args.group, args.tolerance)
    text = _write_csv(
        _resolve(args, "csv"), [f"# fixed set dimension: {fixed.dim}"],
        ["selector", "point", "distance", "ok"],
        [[r.selector, _point_text(r.point), fmt(r.distance), r.ok] for r in rows],
    )
    out.write(text)
    return 0 if all(r.ok for r in rows) else 1


def _cmd_blend(args, out):
    from .blend import blend, blend_body, validate
    from .io import body_doc, dumps, fmt, read_body, read_scenario
    from .verify import blend_suite, header

    scenario = validate(read_scenario(args.scenario))
    if args.probe:
        L = read_body(args.probe)
        value = blend_body(L, scenario) if scenario.body_targets else blend(L, scenario)
        out.write(dumps(body_doc(value)) if scenario.body_targets else _point_text(value) + "\n")
        return 0
    cfg = _run_config(args)
    trials = cfg.trials or 100
    checks = blend_suite(scenario, cfg.seed, trials=trials, probes=args.probes)
    limit_interp = 1e-6 if scenario.body_targets else 1e-8
    rows, ok = [], True
    for c in checks:
        lim = limit_interp if c.kind == "interpolation" else 1e-5
        passed = c.deviation <= lim
        ok &= passed
        rows.append([c.kind, c.probe, c.trial, fmt(c.deviation), fmt(lim), "PASS" if passed else "FAIL"])
    text = _write_csv(_resolve(args, "csv"), header(cfg, "blend"),
                      ["check", "probe", "trial", "deviation", "threshold", "status"], rows)
    out.write(text)
    return 0 if ok else 1


def _cmd_properness(args, out):
    from .io import fmt, read_body
    from .lab import thin_bound_check
    from .verify import header

    cfg = _run_config(args)
    rep = thin_bound_check(read_body(args.body), args.delta, cfg.trials or 1000, cfg.seed)
    fields = [
        ("m", rep.m), ("delta", rep.delta), ("M", rep.M),
        ("lambda_low", rep.lambda_interval[0]), ("lambda_high", rep.lambda_interval[1]),
        ("translation_bound", rep.translation_bound), ("lambda_seen_low", rep.lambda_seen[0]),
        ("lambda_seen_high", rep.lambda_seen[1]), ("max_translation_seen", rep.max_translation_seen),
        ("trials", rep.trials), ("attempts", rep.attempts), ("violations", rep.violations),
    ]
    text = _write_csv(_resolve(args, "csv"), header(cfg, "properness"), ["field", "value"], [[k, fmt(v)] for k, v in fields])
    out.write(text)
    return 0 if rep.ok else 1


def _cmd_constant_width(args, out):
    from .io import dumps, read_body
    from .lab import width_report

    rep = width_report(read_body(args.body), args.cw_tol)
    out.write(dumps({"type": "constant-width", "constant": bool(rep.constant), "d": rep.d,
                     "spread": rep.spread, "ball_gap": rep.ball_gap, "ball_slack": rep.ball_slack,
                     "tol": args.cw_tol}))
    return 0


def _cmd_demo(args, out):
    from .io import dumps, fmt
    from .lab import segment_midpoint_demo, triangle_counterexample

    if args.name == "segment-midpoint":
        try:
            a = [float(v) for v in args.a.split(",")]
            b = [float(v) for v in args.b.split(",")]
        except ValueError as exc:
            raise UsageError(f"bad endpoint: {exc}") from exc
        rep = segment_midpoint_demo(a, b)
        out.write(dumps({"type": "segment-midpoint", "midpoint": rep.midpoint,
                         "stabilizer_order": rep.stabilizer_order, "fixed_set_dim": rep.fixed_set.dim,
                         "fixed_point": rep.fixed_set.base, "distance": rep.distance, "ok": rep.ok}))
        return 0 if rep.ok else 1
    if args.n_max < 1:
        raise UsageError("--n-max must be at least 1")
    table = triangle_counterexample(args.n_max)
    rows = [[r.n, fmt(r.cx), fmt(r.cy), fmt(r.closed_form_error), fmt(r.hausdorff_to_segment), fmt(r.gap_to_midpoint)]
            for r in table.rows]
    head = [f"# limit: {_point_text(table.limit)}", f"# midpoint: {_point_text(table.midpoint)}",
            f"# terminal_gap: {fmt(table.terminal_gap)}"]
    cols = ["n", "centroid_x", "centroid_y", "closed_form_error", "hausdorff_to_segment", "gap_to_midpoint"]
    path = _resolve(args, "csv")
    text = _write_csv(path, head, cols, rows)
    if not path:
        out.write(text)
    else:
        out.write("\n".join(head) + "\n")
    svg = _resolve(args, "svg")
    if svg:
        from .plotting import plot_triangle_trajectory

        plot_triangle_trajectory(table, svg)
    return 0


def _cmd_verify_all(args, out):
    from .verify import render, run

    cfg = _run_config(args)
    if args.filter:
        cfg.filters = tuple(f.strip() for f in args.filter.split(",") if f.strip())
    rows = run(cfg)
    text = render(cfg, rows)
    out.write(text)
    path = _resolve(args, "csv")
    if path:
        Path(path).write_text(text)
    return 0 if all(r.passed for r in rows) else 1


HANDLERS = {
    "hausdorff": _cmd_hausdorff,
    "minkowski": _cmd_minkowski,
    "invariant-point": _cmd_invariant_point,
    "symmetry": _cmd_symmetry,
    "fixed-set": _cmd_fixed_set,
    "containment": _cmd_containment,
    "blend": _cmd_blend,
    "properness": _cmd_properness,
    "constant-width": _cmd_constant_width,
    "demo": _cmd_demo,
    "verify-all": _cmd_verify_all,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if not args.command:
        parser.print_usage(sys.stderr)
        return 2
    try:
        from .config import tolerance_names
        from .verify import THRESHOLDS

        for name, _ in args.g_tol:
            if name not in tolerance_names() and name not in THRESHOLDS:
                raise UsageError(f"unknown tolerance {name!r}")
        if args.command != "verify-all" and args.g_tol:
            from .config import overridden

            tol = {k: v for k, v in args.g_tol if k in tolerance_names()}
            with overridden(**tol):
                return HANDLERS[args.command](args, out)
        return HANDLERS[args.command](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except GeometryError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError, KeyError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
