"""Command line front end.

Subcommands::

    rot solve     run the descent solver on an instance file
    rot oracle    exhaustive optimum for small instances (certified)
    rot validate  structural checks, optionally competitor admissibility
    rot example   emit a built-in example instance as JSON
    rot verify    check the defining claims of an example family
    rot energy    score a competitor file against an instance
    rot plot      render an instance (and optional competitor) to SVG

Reports go to stdout unless ``--out`` names a file, in which case the file
is written atomically (temp + rename).  Exit codes: 0 success, 1 usage or
failed validation, 2 internal error, 3 instance too large for the
exhaustive oracle.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from typing import Any, Sequence

from .energy import eulerian_energy, lagrangian_energy
from .examples import EXAMPLES, ExampleParams, build_example, verify_phenomenon
from .figures import (
    render_svg,
    save_phenomenon_figures,
    save_solve_figures,
    write_text_atomic,
)
from .model import (
    EulerianCompetitor,
    Instance,
    ModelError,
    check_eulerian_admissible,
    check_lagrangian_admissible,
    competitor_to_json_dict,
    dumps_report,
    load_competitor,
    load_instance,
    serialize_instance,
    validate_instance,
)
from .solver import (
    SizeGuardError,
    SolveParams,
    brute_force_eulerian,
    brute_force_lagrangian,
    solve,
)

_MODELS = ("eulerian", "eulerian-oriented", "lagrangian")
_EXAMPLE_FIELDS = ("levels", "epsilon", "beta", "loops", "payoff", "detour", "alpha")


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; the contract here is 1."""

    def error(self, message: str) -> Any:  # noqa: D401 - argparse hook
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _read_text(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _load_instance_file(path: str) -> Instance:
    return load_instance(_read_text(path))


def _emit(text: str, path: str | None) -> None:
    """stdout by default; atomic file write when a path is given."""
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        write_text_atomic(path, text)


def _note(lines: Sequence[str]) -> None:
    for line in lines:
        print(line, file=sys.stderr)


def _parse_model(model: str) -> tuple[str, bool]:
    """Map the model flag onto (descent mode, oriented capacities)."""
    if model == "lagrangian":
        return "lagrangian", False
    return "eulerian", model == "eulerian-oriented"


def _solve_params(args: argparse.Namespace, oriented: bool) -> SolveParams:
    return SolveParams(
        max_iters=args.max_iters,
        restarts=args.restarts,
        delta=args.delta,
        seed=args.seed,
        k_paths=args.k_paths,
        oriented=oriented,
    )


def _example_params(args: argparse.Namespace) -> ExampleParams:
    fields = {}
    for name in _EXAMPLE_FIELDS:
        value = getattr(args, name)
        if value is not None:
            fields[name] = value
    return ExampleParams(**fields)


def _add_example_arguments(p: argparse.ArgumentParser) -> None:
    p.add_argument("--levels", type=int, default=None, help="cascade depth (distance)")
    p.add_argument(
        "--epsilon", type=float, default=None, help="wall offset (non_continuous)"
    )
    p.add_argument("--beta", type=float, default=None, help="wall profile exponent")
    p.add_argument("--loops", type=int, default=None, help="route count (limit)")
    p.add_argument("--payoff", type=float, default=None, help="constant reward density")
    p.add_argument(
        "--detour", type=float, default=None, help="extra length of the detour edge"
    )
    p.add_argument(
        "--alpha", type=float, default=None, help="construction cost exponent"
    )


def _cmd_solve(args: argparse.Namespace) -> int:
    inst = _load_instance_file(args.instance)
    mode, oriented = _parse_model(args.model)
    report = solve(inst, mode, _solve_params(args, oriented))
    _emit(report.to_json(), args.out)
    written = []
    if args.svg:
        write_text_atomic(args.svg, render_svg(inst, report.competitor))
        written.append(args.svg)
    if args.figures:
        written.extend(save_solve_figures(inst, report, args.figures))
    if written:
        _note([f"wrote {p}" for p in written])
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    inst = _load_instance_file(args.instance)
    mode, oriented = _parse_model(args.model)
    if mode == "eulerian":
        res = brute_force_eulerian(inst, delta=args.delta, oriented=oriented)
    else:
        res = brute_force_lagrangian(inst, delta=args.delta)
    doc: dict[str, Any] = {
        "format": 1,
        "mode": mode,
        "delta": args.delta,
        "combos": res.combos,
        "energy": res.breakdown.to_json_dict(),
        "competitor": competitor_to_json_dict(res.competitor),
    }
    if mode == "eulerian":
        doc["oriented"] = oriented
    _emit(dumps_report(doc), args.out)
    return 0


def _cmd_validate(args: argparse.Namespace) -> int:
    inst = _load_instance_file(args.instance)
    report = validate_instance(inst)
    ok = report.ok
    doc: dict[str, Any] = {"format": 1, "instance": report.to_json_dict()}
    if args.competitor:
        comp = load_competitor(_read_text(args.competitor), inst)
        if isinstance(comp, EulerianCompetitor):
            adm = check_eulerian_admissible(inst, comp)
        else:
            adm = check_lagrangian_admissible(inst, comp)
        doc["competitor"] = adm.to_json_dict()
        ok = ok and adm.ok
    doc["ok"] = ok
    _emit(dumps_report(doc), args.out)
    return 0 if ok else 1


def _cmd_example(args: argparse.Namespace) -> int:
    inst = build_example(args.name, _example_params(args))
    _emit(serialize_instance(inst), args.out)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    report = verify_phenomenon(args.name, _example_params(args), seed=args.seed)
    _emit(dumps_report(report.to_json_dict()), args.out)
    if args.figures:
        _note([f"wrote {p}" for p in save_phenomenon_figures(report, args.figures)])
    return 0 if report.ok else 1


def _cmd_energy(args: argparse.Namespace) -> int:
    inst = _load_instance_file(args.instance)
    comp = load_competitor(_read_text(args.competitor), inst)
    if isinstance(comp, EulerianCompetitor):
        breakdown = eulerian_energy(inst, comp)
        adm = check_eulerian_admissible(inst, comp)
        kind = "eulerian"
    else:
        breakdown = lagrangian_energy(inst, comp)
        adm = check_lagrangian_admissible(inst, comp)
        kind = "lagrangian"
    doc = {"format": 1, "kind": kind}
    doc.update(breakdown.to_json_dict())
    doc["admissible"] = adm.to_json_dict()
    _emit(dumps_report(doc), args.out)
    return 0


def _cmd_plot(args: argparse.Namespace) -> int:
    inst = _load_instance_file(args.instance)
    comp = None
    if args.competitor:
        comp = load_competitor(_read_text(args.competitor), inst)
    _emit(render_svg(inst, comp, width=args.width), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="rot",
        description="Robust transport: descent solvers, exhaustive oracles, "
        "example families, and admissibility checks.",
    )
    parser.add_argument("--version", action="version", version="%(prog)s 0.1.0")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("solve", help="run the descent solver")
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument(
        "--model",
        choices=_MODELS,
        required=True,
        help="capacity descent (optionally with one-way capacities) or route descent",
    )
    p.add_argument("--seed", type=int, default=0, help="restart RNG seed")
    p.add_argument("--delta", type=float, default=0.125, help="mass quantum")
    p.add_argument("--restarts", type=int, default=8, help="descent restarts")
    p.add_argument("--max-iters", type=int, default=200, help="sweep limit per restart")
    p.add_argument("--k-paths", type=int, default=16, help="route dictionary size")
    p.add_argument("--out", default=None, help="report JSON path (default stdout)")
    p.add_argument("--svg", default=None, help="render the loaded network to SVG")
    p.add_argument(
        "--figures", default=None, metavar="DIR", help="write trace CSV/PNG here"
    )
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("oracle", help="exhaustive optimum (small instances)")
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument(
        "--model", choices=_MODELS, required=True, help="competitor class"
    )
    p.add_argument("--delta", type=float, default=0.125, help="mass quantum")
    p.add_argument("--out", default=None, help="report JSON path (default stdout)")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("validate", help="instance and competitor checks")
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument(
        "--competitor", default=None, help="competitor JSON to check for admissibility"
    )
    p.add_argument("--out", default=None, help="report JSON path (default stdout)")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("example", help="emit a built-in example instance")
    p.add_argument(
        "--name", required=True, choices=sorted(EXAMPLES), help="example family"
    )
    _add_example_arguments(p)
    p.add_argument("--out", default=None, help="instance path (default stdout)")
    p.set_defaults(func=_cmd_example)

    p = sub.add_parser("verify", help="check an example family's claims")
    p.add_argument(
        "--name", required=True, choices=sorted(EXAMPLES), help="example family"
    )
    _add_example_arguments(p)
    p.add_argument("--seed", type=int, default=0, help="restart RNG seed")
    p.add_argument("--out", default=None, help="report JSON path (default stdout)")
    p.add_argument(
        "--figures", default=None, metavar="DIR", help="write series CSV/PNG here"
    )
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("energy", help="score a competitor file")
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument("--competitor", required=True, help="competitor JSON file")
    p.add_argument("--out", default=None, help="report JSON path (default stdout)")
    p.set_defaults(func=_cmd_energy)

    p = sub.add_parser("plot", help="render to SVG (2-dimensional instances)")
    p.add_argument("--instance", required=True, help="instance JSON file")
    p.add_argument("--competitor", default=None, help="competitor JSON to overlay")
    p.add_argument("--width", type=int, default=720, help="image width in pixels")
    p.add_argument("--out", default=None, help="SVG path (default stdout)")
    p.set_defaults(func=_cmd_plot)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits for usage errors and --help
        code = exc.code
        return code if isinstance(code, int) else 1
    try:
        return args.func(args)
    except SizeGuardError as exc:
        print(f"rot: instance too large for the oracle: {exc}", file=sys.stderr)
        return 3
    except ModelError as exc:
        print(f"rot: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"rot: {exc}", file=sys.stderr)
        return 1
    except Exception:  # pragma: no cover - safety net
        traceback.print_exc()
        return 2


if __name__ == "__main__":
    sys.exit(main())
