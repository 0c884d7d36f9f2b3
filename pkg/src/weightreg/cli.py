"""Command-line front end.

Exit codes: 0 success, 1 input/validation error, 2 resource cap exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .characterizations import DEFAULT_COMMUTE_TOL, DEFAULT_POLY_TOL, DEFAULT_TIGHT_TOL
from .chromatic import DEFAULT_CHI_CAP, DEFAULT_ENUM_CAP, DEFAULT_HOFFMAN_TOL, ResourceLimitError
from .graph import VertexPartition, is_connected, load_edge_list, load_partition, save_partition
from .partitions import DEFAULT_WR_TOL, coarsest_weight_regular_refinement, nu_level_partition
from .report import AnalysisReport, Options, _tolerances, build_report, chromatic_section, graph_section, render_text
from .spectra import DEFAULT_EIG_TOL, NotConnectedError, eigendecompose, perron_vector

EXIT_OK, EXIT_INVALID, EXIT_RESOURCE = 0, 1, 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-eig", type=float, default=DEFAULT_EIG_TOL, help="relative eigenvalue grouping tolerance")
    p.add_argument("--tol-wr", type=float, default=DEFAULT_WR_TOL, help="weight-regularity tolerance")
    p.add_argument("--tol-hoffman", type=float, default=DEFAULT_HOFFMAN_TOL, help="Hoffman equality tolerance")
    p.add_argument("--tol-commute", type=float, default=DEFAULT_COMMUTE_TOL)
    p.add_argument("--tol-poly", type=float, default=DEFAULT_POLY_TOL)
    p.add_argument("--tol-tight", type=float, default=DEFAULT_TIGHT_TOL)
    p.add_argument("--chi-cap", type=int, default=DEFAULT_CHI_CAP, help="largest n for exact colouring")
    p.add_argument("--enum-cap", type=int, default=DEFAULT_ENUM_CAP, help="largest n for colouring enumeration")
    p.add_argument("--enumerate", action="store_true", help="enumerate all optimal colourings")
    p.add_argument("--force", action="store_true", help="run exact colouring beyond --chi-cap")
    p.add_argument("--json", action="store_true", help="emit the JSON report")
    p.add_argument("--no-timestamp", action="store_true", help="omit generatedAt for reproducible output")
    p.add_argument("-o", "--output", type=Path, help="write to file instead of stdout")


def _options(args: argparse.Namespace) -> Options:
    return Options(
        tol_eig=args.tol_eig,
        tol_wr=args.tol_wr,
        tol_hoffman=args.tol_hoffman,
        tol_commute=args.tol_commute,
        tol_poly=args.tol_poly,
        tol_tight=args.tol_tight,
        chi_cap=args.chi_cap,
        enum_cap=args.enum_cap,
        enumerate_colorings=args.enumerate,
        force=args.force,
        timestamp=not args.no_timestamp,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="weightreg", description="Weight-regular partition analysis of graphs.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full report for a graph and optional partition")
    p.add_argument("graph", type=Path)
    p.add_argument("partition", type=Path, nargs="?")
    _add_common(p)

    p = sub.add_parser("refine", help="coarsest weight-regular refinement of a partition")
    p.add_argument("graph", type=Path)
    p.add_argument("partition", type=Path, nargs="?", help="seed partition file (overrides --seed)")
    p.add_argument(
        "--seed",
        choices=("nu-levels", "trivial"),
        default="nu-levels",
        help="built-in seed: vertices grouped by Perron entry, or one class (always weight-regular)",
    )
    p.add_argument("--tol-wr", type=float, default=DEFAULT_WR_TOL)
    p.add_argument("-o", "--output", type=Path)

    p = sub.add_parser("hoffman", help="Hoffman bound and chromatic audit only")
    p.add_argument("graph", type=Path)
    _add_common(p)

    p = sub.add_parser("batch", help="analyze every *.el file in a directory (JSON)")
    p.add_argument("directory", type=Path)
    p.add_argument("--jobs", type=int, default=1)
    _add_common(p)
    return parser


def _read_graph(path: Path):
    return load_edge_list(path.read_bytes())


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8")


def cmd_analyze(args) -> int:
    g = _read_graph(args.graph)
    p = load_partition(args.partition.read_bytes(), g.n) if args.partition else None
    rep = build_report(g, p, _options(args))
    _emit(rep.to_json() if args.json else render_text(rep), args.output)
    return EXIT_OK


def cmd_refine(args) -> int:
    g = _read_graph(args.graph)
    nu = perron_vector(g)
    if args.partition:
        p0 = load_partition(args.partition.read_bytes(), g.n)
    elif args.seed == "trivial":
        p0 = VertexPartition.trivial(g.n)
    else:
        p0 = nu_level_partition(nu)
    p = coarsest_weight_regular_refinement(g, nu, p0, args.tol_wr)
    _emit(save_partition(p), args.output)
    return EXIT_OK


def cmd_hoffman(args) -> int:
    g = _read_graph(args.graph)
    if not is_connected(g):
        raise NotConnectedError()
    opt = _options(args)
    s = eigendecompose(g, opt.tol_eig)
    nu = perron_vector(g, s)
    rep = AnalysisReport(
        toolVersion=__version__,
        tolerances=_tolerances(opt),
        graph=graph_section(g),
        chromatic=chromatic_section(g, s, nu, opt, strict=True),
    )
    _emit(rep.to_json() if args.json else render_text(rep), args.output)
    return EXIT_OK


def _batch_one(job: tuple[str, str | None, Options]) -> dict:
    graph_path, part_path, opt = job
    try:
        g = load_edge_list(Path(graph_path).read_bytes())
        p = load_partition(Path(part_path).read_bytes(), g.n) if part_path else None
        return {"file": Path(graph_path).name, "report": build_report(g, p, opt).to_dict()}
    except (ValueError, OSError, ResourceLimitError) as exc:
        return {"file": Path(graph_path).name, "error": str(exc)}


def cmd_batch(args) -> int:
    opt = _options(args)
    jobs = []
    for path in sorted(args.directory.glob("*.el")):
        part = path.with_suffix(".part")
        jobs.append((str(path), str(part) if part.exists() else None, opt))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_batch_one, jobs))
    else:
        results = [_batch_one(j) for j in jobs]
    _emit(json.dumps(results, indent=2) + "\n", args.output)
    return EXIT_OK if all("report" in r for r in results) else EXIT_INVALID


COMMANDS = {"analyze": cmd_analyze, "refine": cmd_refine, "hoffman": cmd_hoffman, "batch": cmd_batch}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (ValueError, OSError, ArithmeticError) as exc:
        # parse/validation errors, NotConnectedError and EdgelessGraphError are ValueErrors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
