"""
Command dispatch: analyze, gen, plot and demo-amoeba.

Exit codes: 0 for success (for analyze: FactorLikely), 1 when analyze
finds no factor, 2 for input, configuration or I/O errors.  Outputs are
computed completely before anything is written.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional

from preprocessor import (
    NOISY,
    Config,
    PolynomialSyntaxError,
    PreprocessError,
    Preprocessor,
    SparsePoly,
    format_poly,
    gen_instance,
    parse_poly,
    to_records,
)
from utils.log import setup_logging

from .report import render
from .settings import config_from_settings, load_settings, save_settings
from .svg_plot import amoeba_points, amoeba_svg, plot_polynomials, svg_write

logger = logging.getLogger(__name__)

EXIT_FACTOR = 0
EXIT_OK = 0
EXIT_NO_FACTOR = 1
EXIT_INPUT_ERROR = 2


class InputError(Exception):
    """A user-facing failure: bad file, bad flag value."""


def read_polynomial(path: str, drop_tolerance: float) -> SparsePoly:
    """Read one expression from a UTF-8 file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"{path}: {e.strerror or e}") from e
    if not text.strip():
        raise InputError(f"{path}: empty file")
    try:
        return parse_poly(text, drop_tolerance)
    except PolynomialSyntaxError as e:
        where = f"{path}:{e.position}" if e.position is not None else path
        raise InputError(f"{where}: {e}") from e
    except PreprocessError as e:
        raise InputError(f"{path}: {e}") from e


def write_output(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def write_outputs(outputs: Dict[str, str]) -> None:
    """Write several files so that either all of them appear or none does."""
    targets = {Path(path): text for path, text in outputs.items()}
    for path in targets:
        if path.is_dir():
            raise InputError(f"{path}: is a directory")
    parts: List[Path] = []
    try:
        for path, text in targets.items():
            part = path.with_name(path.name + ".part")
            parts.append(part)
            part.write_text(text, encoding="utf-8")
    except OSError:
        for part in parts:
            part.unlink(missing_ok=True)
        raise
    for part, path in zip(parts, targets):
        part.replace(path)
        logger.info("wrote %s", path)


def build_config(args: argparse.Namespace, settings: Dict) -> Config:
    """Settings file values, then the NOISY preset if asked for, then flags."""
    config = config_from_settings(settings)
    if getattr(args, "noisy", False):
        config = config.replace(
            rank_tolerance=NOISY.rank_tolerance,
            root_tolerance=NOISY.root_tolerance,
            series_tolerance=NOISY.series_tolerance,
        )
    overrides = {
        "rank_tolerance": getattr(args, "tolerance_rank", None),
        "root_tolerance": getattr(args, "tolerance_root", None),
        "drop_tolerance": getattr(args, "drop_tol", None),
        "seed": getattr(args, "seed", None),
    }
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return config.replace(**overrides) if overrides else config


def cmd_analyze(args: argparse.Namespace, config: Config) -> int:
    f = read_polynomial(args.f, config.drop_tolerance)
    g = read_polynomial(args.g, config.drop_tolerance)
    with Preprocessor(config) as runner:
        certificate = runner.preprocess(f, g)
    logger.info("analyze %s %s: %s", args.f, args.g, certificate.status)
    write_output(render(certificate, args.format, args.timings), args.out)
    return EXIT_FACTOR if certificate.factor_likely else EXIT_NO_FACTOR


def cmd_gen(args: argparse.Namespace, config: Config) -> int:
    try:
        f, g, truth = gen_instance(args.deg_factor, args.deg_cofactor, args.planted, args.sparsity, args.seed)
    except ValueError as e:
        raise InputError(str(e)) from e
    truth_doc = {
        "planted": truth.planted,
        "seed": truth.seed,
        "params": truth.params,
        "factor": format_poly(truth.factor) if truth.factor is not None else None,
        "factor_records": to_records(truth.factor) if truth.factor is not None else None,
    }
    outputs = {
        f"{args.out}_f.txt": format_poly(f) + "\n",
        f"{args.out}_g.txt": format_poly(g) + "\n",
        f"{args.out}_truth.json": json.dumps(truth_doc, indent=2) + "\n",
    }
    write_outputs(outputs)
    return EXIT_OK


def cmd_plot(args: argparse.Namespace, config: Config) -> int:
    polys = [read_polynomial(path, config.drop_tolerance) for path in args.paths]
    svg_write(plot_polynomials(polys, args.what), args.out)
    logger.info("wrote %s", args.out)
    return EXIT_OK


def cmd_demo_amoeba(args: argparse.Namespace, config: Config) -> int:
    points = amoeba_points(n_radius=args.radii, n_angle=args.angles)
    svg_write(amoeba_svg(points, args.window), args.out)
    logger.info("wrote %d amoeba samples to %s", len(points), args.out)
    return EXIT_OK


COMMANDS: Dict[str, Callable[[argparse.Namespace, Config], int]] = {
    "analyze": cmd_analyze,
    "gen": cmd_gen,
    "plot": cmd_plot,
    "demo-amoeba": cmd_demo_amoeba,
}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tolerance-rank", type=float, default=None,
                        help="relative singular value cutoff for Sylvester ranks")
    parser.add_argument("--tolerance-root", type=float, default=None,
                        help="relative residual bound for initial roots")
    parser.add_argument("--drop-tol", type=float, default=None,
                        help="coefficients below this fraction of the largest are dropped")
    parser.add_argument("--noisy", action="store_true",
                        help="looser tolerances for coefficients with relative noise near 1e-8")
    parser.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="random seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tropism-preprocessor",
        description="Decide in three stages whether two bivariate polynomials can share a factor.",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logging")
    parser.add_argument("--settings", default=None, help="settings JSON file (default ~/.tropism_preprocessor)")
    parser.add_argument("--save-settings", action="store_true", help="write the effective settings back")
    parser.add_argument("--seed", type=int, default=None, help="random seed")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the pipeline on two polynomial files")
    analyze.add_argument("f")
    analyze.add_argument("g")
    analyze.add_argument("--format", choices=("text", "structured"), default=None)
    analyze.add_argument("--out", default=None, help="write the report here instead of stdout")
    analyze.add_argument("--timings", action="store_true", help="include per-stage timings")
    _add_config_flags(analyze)

    gen = sub.add_parser("gen", help="write a seeded random instance")
    gen.add_argument("--deg-factor", type=int, default=5)
    gen.add_argument("--deg-cofactor", type=int, default=10)
    planted = gen.add_mutually_exclusive_group()
    planted.add_argument("--planted", dest="planted", action="store_true", default=True)
    planted.add_argument("--unplanted", dest="planted", action="store_false")
    gen.add_argument("--sparsity", type=float, default=1.0)
    gen.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    gen.add_argument("--out", required=True, help="output prefix; writes PREFIX_f.txt, PREFIX_g.txt, PREFIX_truth.json")

    plot = sub.add_parser("plot", help="SVG of Newton polygons and normal fans")
    plot.add_argument("paths", nargs="+")
    plot.add_argument("--what", choices=("polygon", "fan", "both"), default="both")
    plot.add_argument("--out", required=True)

    amoeba = sub.add_parser("demo-amoeba", help="SVG of the amoeba of x/2 + y/5 - 1")
    amoeba.add_argument("--out", required=True)
    amoeba.add_argument("--radii", type=int, default=80)
    amoeba.add_argument("--angles", type=int, default=48)
    amoeba.add_argument("--window", type=float, default=10.0)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.verbose)

    settings = load_settings(args.settings)
    if getattr(args, "format", "unset") is None:
        args.format = settings.get("format", "text")
    if args.seed is None:
        args.seed = int(settings.get("seed", 0))
    try:
        config = build_config(args, settings)
        if args.save_settings:
            merged = dict(settings)
            merged.update(config.to_dict())
            save_settings(merged, args.settings)
        return COMMANDS[args.command](args, config)
    except (InputError, PreprocessError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
