"""Main entry point for the KLT approximation toolkit."""
import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from src.codec.compress import CompressionConfig, compress_detailed
from src.codec.image import GrayImage
from src.codec.quality import quality_report
from src.codec.sweep import sweep
from src.fast.plan import OpTrace, apply_fast, build_plan
from src.fast.transforms import TRANSFORM_IDS, get_transform, resolve_transform
from src.klt.markov import autocorrelation_matrix, exact_klt, exact_klt_eigen
from src.metrics.merit import compare, merit_report
from src.report.formatter import ReportFormatter, VerifyResult
from src.search.pipeline import SearchPipeline, SearchSettings
from src.utils.config import INT_FUNCTIONS, MERITS, Config
from src.utils.errors import FactorizationError, KLTError, WordOverflowError
from src.utils.logger import set_level, setup_logger

logger = setup_logger("main")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

VERIFY_VECTORS = 1000
VERIFY_RANGE = 10
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters of one command invocation."""
    command: str
    rho: Optional[float] = None
    rho_step: Optional[float] = None
    alpha_step: Optional[float] = None
    merits: Optional[Sequence[str]] = None
    funcs: Optional[Sequence[str]] = None
    transform: Optional[str] = None
    r: Optional[int] = None
    seed: Optional[int] = None
    workers: Optional[int] = None
    fmt: str = "json"
    out: Optional[Path] = None

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        config = cls(
            command=args.command,
            rho=getattr(args, "rho", None),
            rho_step=getattr(args, "rho_step", None),
            alpha_step=getattr(args, "alpha_step", None),
            merits=getattr(args, "merit", None),
            funcs=getattr(args, "funcs", None),
            transform=getattr(args, "transform", None),
            r=getattr(args, "r", None),
            seed=getattr(args, "seed", None),
            workers=getattr(args, "workers", None),
            fmt=getattr(args, "format", "json"),
            out=Path(args.out) if getattr(args, "out", None) else None,
        )
        config.validate()
        return config

    def validate(self):
        if self.rho is not None and not 0 < self.rho < 1:
            raise KLTError(f"--rho must lie strictly inside (0, 1), got {self.rho}")
        if self.rho_step is not None and not 0 < self.rho_step < 1:
            raise KLTError(f"--rho-step must lie inside (0, 1), got {self.rho_step}")
        if self.alpha_step is not None and self.alpha_step <= 0:
            raise KLTError(f"--alpha-step must be > 0, got {self.alpha_step}")
        if self.r is not None and not 1 <= self.r <= 64:
            raise KLTError(f"--r must be in [1, 64], got {self.r}")
        unknown = [f for f in (self.funcs or ()) if f not in INT_FUNCTIONS]
        if unknown:
            raise KLTError(f"unknown integer functions {unknown}; expected a subset of {INT_FUNCTIONS}")
        if self.workers is not None and self.workers < 1:
            raise KLTError(f"--workers must be >= 1, got {self.workers}")
        if self.command == "search" and self.seed is None:
            raise KLTError("search requires a seed (--seed or SEED in the environment)")


def _emit(text: str, out: Optional[Path]):
    """Write text to a file, or to stdout when no path is given."""
    if out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    logger.info(f"Wrote {out}")


def cmd_gen_klt(run: RunConfig, method: str = "closed") -> int:
    """Write K^(rho) as CSV with 12 significant digits."""
    model = autocorrelation_matrix(run.rho)
    transform = exact_klt(run.rho) if method == "closed" else exact_klt_eigen(model)
    frame = pd.DataFrame(transform.matrix)
    _emit(frame.to_csv(index=False, header=False, float_format="%.12g"), run.out)
    return EXIT_OK


def cmd_search(run: RunConfig) -> int:
    """Run the search pipeline and write the JSON report or the CSV merit table."""
    settings = SearchSettings.from_config(
        rho_step=run.rho_step,
        alpha_step=run.alpha_step,
        funcs=tuple(run.funcs) if run.funcs else None,
        merits=tuple(run.merits) if run.merits else None,
        seed=run.seed,
        workers=run.workers,
    )
    report = SearchPipeline(settings).run_sync()
    logger.info("\n" + ReportFormatter.format_search_summary(report))

    if run.out is None:
        text = report.to_json() if run.fmt == "json" else report.merit_table().to_csv(index=False, float_format="%.12g")
        _emit(text, None)
    else:
        report.write(run.out, run.fmt)
        logger.info(f"Wrote {run.out}")
    return EXIT_OK


def _default_rho(specs: Sequence[str]) -> float:
    """Shared reference correlation of published transforms, used when --rho is absent."""
    if any(spec.strip().lower().startswith(("klt", "dct")) for spec in specs):
        raise KLTError("--rho is required for klt and dct evaluation")
    rhos = {get_transform(spec).reference_rho for spec in specs}
    if len(rhos) > 1:
        raise KLTError(f"--rho is required: reference correlations differ ({sorted(rhos)})")
    return rhos.pop()


def cmd_eval(run: RunConfig, specs: Sequence[str], ref_rho: Optional[float] = None) -> int:
    """Print the merit report of one transform, or the comparison table of several."""
    if len(set(specs)) != len(specs):
        raise KLTError(f"duplicate --transform in {list(specs)}")
    rho = run.rho if run.rho is not None else _default_rho(specs)

    if len(specs) > 1:
        frame = compare({spec: resolve_transform(spec, rho)[0] for spec in specs}, rho, ref_rho)
        logger.info("\n" + frame.to_string(index=False))
        if run.fmt == "csv":
            _emit(frame.to_csv(index=False, float_format="%.12g"), run.out)
        else:
            _emit(json.dumps(frame.to_dict(orient="records")), run.out)
        return EXIT_OK

    spec = specs[0]
    model = autocorrelation_matrix(rho)
    reference = exact_klt(ref_rho if ref_rho is not None else rho)
    report = merit_report(resolve_transform(spec, rho)[0], model, reference)
    logger.info("\n" + ReportFormatter.format_merits(spec, report, rho))

    if run.fmt == "csv":
        frame = pd.DataFrame([{"transform": spec, "rho": rho, **report.to_dict()}])
        _emit(frame.to_csv(index=False, float_format="%.12g"), run.out)
    else:
        _emit(json.dumps({"transform": spec, "rho": rho, **report.to_dict()}, sort_keys=True), run.out)
    return EXIT_OK


def cmd_compress(run: RunConfig, image_path: Path, report_path: Optional[Path] = None) -> int:
    """Compress one image, write the reconstruction and print its quality."""
    image = GrayImage.load(image_path)
    result = compress_detailed(image, CompressionConfig(run.transform, run.r))
    quality = quality_report(image, result.image, result.reconstruction)
    logger.info("\n" + ReportFormatter.format_quality(run.transform, run.r, quality))

    if run.out is not None:
        result.image.save(run.out)
        logger.info(f"Wrote {run.out}")
    text = json.dumps({"transform": run.transform, "r": run.r, **quality.to_dict()}, sort_keys=True)
    _emit(text, report_path)
    return EXIT_OK


def cmd_sweep(run: RunConfig, images: List[Path], transforms: List[str], r_max: int) -> int:
    """Average quality curves over an image set."""
    curves = sweep(images, transforms, range(1, r_max + 1), workers=run.workers)
    if curves.empty:
        logger.warning("Sweep produced no data")
    _emit(curves.to_csv(index=False, float_format="%.12g"), run.out)
    return EXIT_OK


def verify_transform(transform_id: str, seed: int) -> VerifyResult:
    """Check factorization, op counts and random-vector equivalence of one transform."""
    named = get_transform(transform_id)
    result = VerifyResult(id=named.id, passed=False, published_ops=named.published_ops)
    try:
        plan = build_plan(named)
    except FactorizationError as e:
        result.failures.append(str(e))
        return result

    result.counted_ops = (plan.add_count, plan.shift_count)
    result.bit_growth = plan.bit_growth
    if plan.add_count != named.published_ops[0]:
        logger.warning(
            f"{named.id}: counted {plan.add_count} adds, published {named.published_ops[0]} "
            f"(difference {plan.add_count - named.published_ops[0]:+d})"
        )
    if plan.shift_count != named.published_ops[1]:
        result.failures.append(f"shift count {plan.shift_count} differs from published {named.published_ops[1]}")

    rng = np.random.default_rng(seed)
    trace = OpTrace()
    vectors = rng.integers(-VERIFY_RANGE, VERIFY_RANGE + 1, size=(VERIFY_VECTORS, 8))
    for x in vectors:
        try:
            fast = apply_fast(plan, x, trace=trace)
        except WordOverflowError as e:
            result.failures.append(f"overflow on input {x.tolist()}: {e}")
            break
        direct = named.t.entries @ x
        if not np.array_equal(fast, direct):
            result.failures.append(f"input {x.tolist()}: fast {fast.tolist()} != direct {direct.tolist()}")
            break
        result.vectors_checked += 1
    result.multiplications = trace.multiplications
    if trace.multiplications:
        result.failures.append(f"{trace.multiplications} multiplications recorded")

    result.passed = not result.failures
    return result


def cmd_verify(run: RunConfig) -> int:
    """Verify one or all fast algorithms; exit code 1 when any check fails."""
    ids = TRANSFORM_IDS if run.transform.lower() == "all" else (run.transform,)
    results = [verify_transform(transform_id, run.seed if run.seed is not None else Config.SEED) for transform_id in ids]
    _emit("\n".join(ReportFormatter.format_verify(result) for result in results), None)
    return EXIT_OK if all(result.passed for result in results) else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="klt-approx",
        description="Low-complexity KLT approximations: generation, search, evaluation, compression.",
    )
    parser.add_argument(
        "--log-level", type=str.upper, choices=LOG_LEVELS, default=None, help="Override LOG_LEVEL"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-klt", help="Write the exact KLT matrix as CSV")
    gen.add_argument("--rho", type=float, required=True)
    gen.add_argument("--method", choices=["closed", "eigen"], default="closed")
    gen.add_argument("--out")

    search = sub.add_parser("search", help="Run the exhaustive approximation search")
    search.add_argument("--rho-step", type=float)
    search.add_argument("--alpha-step", type=float)
    search.add_argument("--funcs", type=lambda s: s.split(","), help=f"Comma list from {','.join(INT_FUNCTIONS)}")
    search.add_argument("--merit", action="append", choices=MERITS, help="Repeatable; default all four")
    search.add_argument("--seed", type=int, default=Config.SEED)
    search.add_argument("--workers", type=int)
    search.add_argument("--format", choices=["json", "csv"], default="json")
    search.add_argument("--out")

    evaluate = sub.add_parser("eval", help="Print the merits of one or more transforms")
    evaluate.add_argument(
        "--transform", action="append", required=True, dest="transforms",
        help=f"Repeatable; {', '.join(TRANSFORM_IDS)}, klt, klt:<rho> or dct. Several give a comparison table",
    )
    evaluate.add_argument("--rho", type=float)
    evaluate.add_argument("--ref-rho", type=float, help="Correlation of the reference KLT (default: --rho)")
    evaluate.add_argument("--format", choices=["json", "csv"], default="json")
    evaluate.add_argument("--out")

    comp = sub.add_parser("compress", help="Compress an image and report its quality")
    comp.add_argument("--image", required=True)
    comp.add_argument("--transform", required=True)
    comp.add_argument("--r", type=int, default=Config.CODEC_RETAINED)
    comp.add_argument("--out", help="Reconstructed image path (.pgm for P5)")
    comp.add_argument("--report", help="Quality report path (default: stdout)")

    sw = sub.add_parser("sweep", help="Average PSNR/MSSIM curves over images and r")
    sw.add_argument("--images", nargs="+", required=True)
    sw.add_argument("--transform", action="append", required=True, dest="transforms")
    sw.add_argument("--r-max", type=int, default=Config.SWEEP_MAX_R)
    sw.add_argument("--workers", type=int)
    sw.add_argument("--out")

    verify = sub.add_parser("verify", help="Verify fast algorithms against their matrices")
    verify.add_argument("--transform", default="all")
    verify.add_argument("--seed", type=int, default=Config.SEED)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, dispatch the command and map errors to exit codes."""
    args = build_parser().parse_args(argv)
    if args.log_level:
        set_level(args.log_level)

    if not Config.validate():
        logger.error("Invalid configuration")
        return EXIT_USAGE

    try:
        run = RunConfig.from_args(args)
        if args.command == "gen-klt":
            return cmd_gen_klt(run, args.method)
        if args.command == "search":
            return cmd_search(run)
        if args.command == "eval":
            return cmd_eval(run, args.transforms, args.ref_rho)
        if args.command == "compress":
            return cmd_compress(run, Path(args.image), Path(args.report) if args.report else None)
        if args.command == "sweep":
            if not 1 <= args.r_max <= 64:
                raise KLTError(f"--r-max must be in [1, 64], got {args.r_max}")
            return cmd_sweep(run, [Path(p) for p in args.images], args.transforms, args.r_max)
        if args.command == "verify":
            return cmd_verify(run)
    except KLTError as e:
        logger.error(f"{args.command}: {e}")
        return EXIT_USAGE
    except Exception as e:
        logger.error(f"Fatal error: {e}", exc_info=True)
        return EXIT_FAILURE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
