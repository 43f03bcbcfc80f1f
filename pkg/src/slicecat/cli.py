"""Command-line surface: site-file ingestion, check dispatch, reports.

Exit codes: 0 all checks pass (for witness-expected searches, finding the
witness IS the pass), 1 a property the structure should satisfy failed (the
witness is printed), 2 malformed input or usage, 3 a cap was exceeded.
Reports are byte-identical across runs for identical inputs and flags.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import __version__, category, coend, spacetime, tensors
from .category import CategoryView
from .coend import CoendBudget
from .spacetime import CapExceeded, ParseError

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_CAP = 3


class _Run:
    """Accumulates check records and derives the exit code."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.records: list[dict] = []
        self.graph_summary: dict = {}
        self.cap_hit = False

    def add(self, record: dict) -> None:
        self.records.append(record)

    def add_report(self, report) -> None:
        self.records.append(report.to_record())

    def skip(self, name: str, reason: str) -> None:
        self.cap_hit = True
        self.records.append({"name": name, "status": "skip", "skipped": reason})

    def exit_code(self) -> int:
        if self.cap_hit:
            return EXIT_CAP
        if any(r.get("status") == "fail" for r in self.records):
            return EXIT_VIOLATION
        return EXIT_OK

    def emit(self) -> int:
        code = self.exit_code()
        payload = {
            "version": __version__,
            "graph": self.graph_summary,
            "checks": self.records,
            "exit": code,
        }
        if self.args.format == "json":
            print(json.dumps(payload, indent=2, sort_keys=True))
        else:
            for key in sorted(self.graph_summary):
                print(f"# {key}: {self.graph_summary[key]}")
            for rec in self.records:
                status = rec.get("status", "info")
                line = f"[{status:>4}] {rec.get('name', '?')}"
                extras = {k: v for k, v in sorted(rec.items())
                          if k not in ("name", "status") and v not in (None, {}, [])}
                if extras:
                    line += "  " + " ".join(f"{k}={_fmt(v)}" for k, v in extras.items())
                print(line)
            print(f"exit: {code}")
        return code


def _fmt(value) -> str:
    if isinstance(value, dict):
        return json.dumps(value, sort_keys=True)
    return str(value)


def _load(run: _Run, path: str, need_universe: bool = True):
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    graph, named = spacetime.parse_spacetime(text)
    run.graph_summary = {"events": graph.n_events, "edges": len(graph.edges)}
    universe = None
    if need_universe:
        universe = spacetime.enumerate_curves(graph, run.args.curve_cap)
        run.graph_summary["curves"] = universe.width
    return graph, named, universe


def _slice_view(run: _Run, graph, universe) -> CategoryView:
    return CategoryView.slice_view(graph, universe,
                                   hom_cap=run.args.hom_cap,
                                   object_cap=run.args.object_cap)


def _space_view(run: _Run, graph, universe) -> CategoryView:
    return CategoryView.space_view(graph, universe,
                                   hom_cap=run.args.hom_cap,
                                   object_cap=run.args.object_cap)


def _resolve_slice(named: dict[str, int], name: str) -> int:
    if name not in named:
        raise ParseError(0, f"unknown slice name {name!r}")
    return named[name]


def _budget(args) -> CoendBudget:
    return CoendBudget()


# -- subcommands -------------------------------------------------------------

def _cmd_lattice(run: _Run, args) -> int:
    graph = spacetime.minkowski_lattice(args.times, args.positions,
                                        cap=args.object_cap)
    sys.stdout.write(spacetime.format_spacetime(graph))
    return EXIT_OK


def _cmd_curves(run: _Run, args) -> int:
    graph, _named, universe = _load(run, args.file)
    for i in range(universe.width):
        print(universe.curve_str(i))
    return EXIT_OK


def _cmd_laws(run: _Run, args) -> int:
    graph, _named, universe = _load(run, args.file)
    view = _slice_view(run, graph, universe)
    run.add_report(category.check_category_laws(view, seed=args.seed))
    run.add_report(category.intersection_unit_gap(view))
    try:
        space = _space_view(run, graph, universe)
        run.add_report(category.union_bifunctoriality_gap(space))
        run.add_report(tensors.premonoidal_check(space))
    except CapExceeded as exc:
        run.skip("space_mode_checks", str(exc))
    return run.emit()


def _cmd_tensor(run: _Run, args) -> int:
    graph, named, universe = _load(run, args.file)
    view = _slice_view(run, graph, universe)
    x = _resolve_slice(named, args.slices[0])
    y = _resolve_slice(named, args.slices[1])
    builder = tensors.wedge if args.mode == "wedge" else tensors.vee
    f = builder(view, x, y)
    probes = view.objects
    if args.probe:
        probes = (_resolve_slice(named, args.probe),)
    for z in probes:
        run.add({"name": f"{f.describe()}({graph.region_str(z)})",
                 "status": "info",
                 "basis": universe.set_str(f.basis(z))})
    rep = tensors.representability(f, oracle="both")
    run.add({"name": f"representability[{f.describe()}]", "status": "info",
             "representable": rep is not None,
             "representative": graph.region_str(rep) if rep is not None else None})
    return run.emit()


def _cmd_representability(run: _Run, args) -> int:
    graph, named, universe = _load(run, args.file)
    view = _slice_view(run, graph, universe)
    if args.pairs == "all":
        pairs = [(x, y) for x in view.objects for y in view.objects]
    else:
        names = args.pairs.split(",")
        if len(names) != 2:
            raise ParseError(0, "--pairs wants 'all' or 'X,Y'")
        pairs = [(_resolve_slice(named, names[0]),
                  _resolve_slice(named, names[1]))]
    failures = 0
    for x, y in pairs:
        joint = graph.jointly_spacelike(x, y)
        got_wedge = tensors.representability(tensors.wedge(view, x, y), "both")
        got_vee = tensors.representability(tensors.vee(view, x, y), "both")
        want_wedge = (x & y) if joint else None
        want_vee = (x | y) if joint else None
        ok = got_wedge == want_wedge and got_vee == want_vee
        failures += not ok
        if not ok or args.pairs != "all":
            run.add({
                "name": f"dichotomy({graph.region_str(x)},{graph.region_str(y)})",
                "status": "pass" if ok else "fail",
                "jointly_spacelike": joint,
                "wedge": graph.region_str(got_wedge) if got_wedge is not None else None,
                "vee": graph.region_str(got_vee) if got_vee is not None else None,
            })
    unit_rep = tensors.representability(tensors.unit_presheaf(view), "both")
    edgeless = not graph.edges
    unit_ok = (unit_rep == graph.all_events) if edgeless else (unit_rep is None)
    run.add({"name": "dichotomy_sweep", "status": "pass" if not failures else "fail",
             "pairs": len(pairs), "failures": failures})
    run.add({"name": "unit_representability", "status": "pass" if unit_ok else "fail",
             "representative": graph.region_str(unit_rep) if unit_rep is not None else None})
    return run.emit()


def _cmd_witness(run: _Run, args) -> int:
    graph, _named, universe = _load(run, args.file)
    if args.interchange == "vee":
        view = _slice_view(run, graph, universe)
        mode = "vee"
    else:
        view = _space_view(run, graph, universe)
        mode = "space_union"
    wit = tensors.interchange_witness(view, mode)
    guaranteed = any(len(c) >= 4 for c in universe.curves)
    if wit is None:
        run.add({"name": f"interchange_{mode}",
                 "status": "fail" if guaranteed else "pass",
                 "found": False, "witness_guaranteed": guaranteed})
    else:
        run.add({"name": f"interchange_{mode}", "status": "pass",
                 "found": True, **wit.to_record(view)})
    return run.emit()


def _cmd_coend(run: _Run, args) -> int:
    graph, named, universe = _load(run, args.file)
    view = _slice_view(run, graph, universe)
    budget = _budget(args)

    if args.check == "ninja":
        kind = args.presheaf
        arg_names = args.args.split(",") if args.args else []
        regions = [_resolve_slice(named, n) for n in arg_names]
        if kind == "wedge":
            f = tensors.wedge(view, *regions)
        elif kind == "vee":
            f = tensors.vee(view, *regions)
        elif kind == "yoneda":
            f = tensors.yoneda(view, *regions)
        else:
            f = tensors.unit_presheaf(view)
        probes = None
        if args.probe:
            probes = [_resolve_slice(named, args.probe)]
        for rep in coend.ninja_yoneda_check(view, f, probes, budget):
            run.add_report(rep)
    elif args.check == "assoc":
        names = (args.at or "").split(",")
        if len(names) != 4:
            raise ParseError(0, "--at wants 'W,X,Y,Z'")
        objs = [_resolve_slice(named, n) for n in names]
        run.add_report(coend.associativity_check(view, *objs, budget=budget))
    elif args.check == "coherence":
        for z in view.objects:
            for u_obj in view.objects:
                rep = coend.unit_check(view, z, u_obj, budget)
                if not rep.passed:
                    run.add_report(rep)
        run.add({"name": "units", "status": "pass",
                 "checked": len(view.objects) ** 2})
        for z in view.objects:
            for x in view.objects:
                for y in view.objects:
                    rep = coend.symmetry_check(view, z, x, y)
                    if not rep.passed:
                        run.add_report(rep)
        run.add({"name": "symmetry", "status": "pass",
                 "checked": len(view.objects) ** 3})
        stride = max(1, len(view.objects) ** 5 // 512)
        run.add_report(coend.pentagon_sweep(view, full_stride=stride,
                                            budget=budget))
    elif args.check == "kernel":
        a = _resolve_slice(named, args.kernel_slice)
        names = (args.probes or "").split(",")
        if len(names) != 3:
            raise ParseError(0, "--probes wants 'X,Y,W'")
        x, y, w = (_resolve_slice(named, n) for n in names)
        for z in view.objects:
            run.add_report(coend.kernel_unit_check(view, a, z, budget))
        run.add_report(coend.kernel_mult_translated(view, a, x, y, w, budget))
        run.add_report(coend.kernel_mult_paired(view, a, x, y, w, budget))
        run.add_report(coend.kernel_fubini_check(view, a, x, y, w, budget))
    return run.emit()


def _cmd_logic(run: _Run, args) -> int:
    graph, named, universe = _load(run, args.file)
    view = _slice_view(run, graph, universe)
    x = _resolve_slice(named, args.x)
    y = _resolve_slice(named, args.y)
    z = _resolve_slice(named, args.z)
    for mode, builder in (("and", tensors.wedge), ("or", tensors.vee)):
        f = builder(view, x, y)
        basis = f.basis(z)
        rep = tensors.representability(f, oracle="both")
        run.add({
            "name": f"{args.x} {mode.upper()} {args.y} @ {args.z}",
            "status": "info",
            "basis": universe.set_str(basis),
            "representable": rep is not None,
            "representative": graph.region_str(rep) if rep is not None else None,
        })
    reading = _frame_reading(graph, x, y)
    if reading:
        run.add({"name": "fixed_frame_reading", "status": "info", **reading})
    return run.emit()


def _frame_reading(graph, x: int, y: int) -> dict | None:
    """Single-time-layer interpretation when lattice coordinates exist."""
    def layer(region: int):
        coords = [graph.coords[i] for i in spacetime.bits(region)]
        if not coords or any(c is None for c in coords):
            return None
        times = {t for t, _pos in coords}
        if len(times) != 1:
            return None
        return times.pop(), sorted(p for _t, p in coords)

    lx, ly = layer(x), layer(y)
    if lx is None or ly is None or lx[0] != ly[0]:
        return None
    px, py = set(lx[1]), set(ly[1])
    return {
        "time": lx[0],
        "and_positions": sorted(px & py),
        "or_positions": sorted(px | py),
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slicecat",
        description="Verify categorical structure of causal-curve slices "
                    "over finite event graphs.")
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--curve-cap", type=int, default=spacetime.DEFAULT_CURVE_CAP)
    common.add_argument("--hom-cap", type=int, default=category.DEFAULT_HOM_CAP)
    common.add_argument("--object-cap", type=int, default=spacetime.DEFAULT_OBJECT_CAP)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--seed", type=int, default=0)

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("lattice", parents=[common],
                       help="emit a discrete lattice site file")
    p.add_argument("times", type=int)
    p.add_argument("positions", type=int)
    p.set_defaults(func=_cmd_lattice)

    p = sub.add_parser("curves", parents=[common], help="list the curve universe")
    p.add_argument("file")
    p.set_defaults(func=_cmd_curves)

    p = sub.add_parser("laws", parents=[common],
                       help="category laws and non-monoidality witnesses")
    p.add_argument("file")
    p.add_argument("--selftest-mutate", action="store_true",
                   help="corrupt composition internally; the sweep must fail")
    p.set_defaults(func=_cmd_laws)

    p = sub.add_parser("tensor", parents=[common], help="presheaf basis listing")
    p.add_argument("file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--wedge", dest="mode", action="store_const", const="wedge")
    group.add_argument("--vee", dest="mode", action="store_const", const="vee")
    p.add_argument("slices", nargs=2, metavar=("X", "Y"))
    p.add_argument("--probe")
    p.set_defaults(func=_cmd_tensor)

    p = sub.add_parser("representability", parents=[common],
                       help="representability dichotomy sweep")
    p.add_argument("file")
    p.add_argument("--pairs", default="all")
    p.set_defaults(func=_cmd_representability)

    p = sub.add_parser("witness", parents=[common],
                       help="interchange-failure search")
    p.add_argument("file")
    p.add_argument("--interchange", choices=("vee", "space"), required=True)
    p.set_defaults(func=_cmd_witness)

    p = sub.add_parser("coend", parents=[common], help="sliding-quotient checks")
    p.add_argument("file")
    p.add_argument("--check", choices=("ninja", "assoc", "coherence", "kernel"),
                   required=True)
    p.add_argument("--presheaf", choices=("wedge", "vee", "unit", "yoneda"),
                   default="unit")
    p.add_argument("--args", help="comma-separated slice names for the presheaf")
    p.add_argument("--probe", help="probe slice name")
    p.add_argument("--at", help="W,X,Y,Z slice names for --check assoc")
    p.add_argument("--kernel-slice", help="translation slice for --check kernel")
    p.add_argument("--probes", help="X,Y,W slice names for --check kernel")
    p.set_defaults(func=_cmd_coend)

    p = sub.add_parser("logic", parents=[common],
                       help="conjunction/disjunction reading at a probe slice")
    p.add_argument("file")
    p.add_argument("x")
    p.add_argument("y")
    p.add_argument("z")
    p.set_defaults(func=_cmd_logic)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses its own exit codes; fold usage errors into ours
        return EXIT_USAGE if exc.code not in (0, None) else 0
    run = _Run(args)
    try:
        if args.command == "laws" and getattr(args, "selftest_mutate", False):
            return _laws_mutated(run, args)
        return args.func(run, args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapExceeded as exc:
        print(f"cap: {exc}", file=sys.stderr)
        return EXIT_CAP


def _laws_mutated(run: _Run, args) -> int:
    """Test-of-the-test: composition corrupted to union must be caught."""
    graph, _named, universe = _load(run, args.file)
    view = _slice_view(run, graph, universe)
    report = category.check_category_laws(view, seed=args.seed,
                                          compose_masks=lambda a, b: a | b)
    run.add_report(report)
    return run.emit()


if __name__ == "__main__":
    raise SystemExit(main())
