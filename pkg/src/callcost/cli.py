"""Command-line entry point: ``callcost {ingest,run,scale,report}``.

Exit codes: 0 success, 1 configuration error, 2 equivalence-gate failure,
3 I/O error (including unreadable or malformed input files).
"""

from __future__ import annotations

import argparse
import hashlib
import logging
import os
import platform
import sys
from pathlib import Path

from . import __version__
from .bench import (
    CLOCK_NAME,
    DEFAULT_FACTORS,
    DEFAULT_REPS,
    DEFAULT_WARMUP,
    clock_resolution_ns,
    run_comparison,
    run_scaling,
)
from .corpus import build_index, generate_synthetic_corpus, load_index, read_corpus, save_index
from .errors import CorpusError, DomainError, EquivalenceError, IndexFormatError, ScalingError
from .kernels import Form, Model
from .report import (
    UNITS,
    build_report,
    emit_plot_data,
    read_raw_csv,
    render_comparison_table,
    write_metadata,
    write_raw_csv,
    write_summary_csv,
)
from .weighting import DEFAULT_B, DEFAULT_K1, DEFAULT_PAD, Bm25Params

EXIT_OK, EXIT_CONFIG, EXIT_EQUIVALENCE, EXIT_IO = 0, 1, 2, 3

DEFAULT_SEED = 42
DEFAULT_DOCS, DEFAULT_VOCAB, DEFAULT_MEAN_DL = 4573, 21624, 100

NEVER_INLINE_CONTRACT = (
    "CPython executes every Python-level call through the interpreter call protocol; "
    "it has no inliner, so call-form kernels always pay for the call. pad is passed as "
    "a runtime argument and checksums are consumed by a sink after timing."
)

log = logging.getLogger("callcost")


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(f"{self.prog}: {message}")


def _model_list(text: str) -> list[Model]:
    try:
        models = [Model(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"models must be a comma list of {', '.join(m.value for m in Model)}; got {text!r}")
    if not models:
        raise argparse.ArgumentTypeError("at least one model is required")
    return models


def _factor_list(text: str) -> list[int]:
    try:
        factors = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"factors must be comma-separated integers; got {text!r}")
    if not factors or min(factors) < 1:
        raise argparse.ArgumentTypeError(f"factors must be integers >= 1; got {text!r}")
    return factors


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text!r}")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {text!r}")
    return value


def _add_corpus_source(p, index_flag=True):
    g = p.add_argument_group("corpus source (choose one)")
    if index_flag:
        g.add_argument("--index", help="index file written by `ingest`")
    g.add_argument("--input", help="directory of *.txt files or a JSON-lines file")
    g.add_argument("--synthetic", action="store_true", help="generate a Zipfian corpus")
    g.add_argument("--docs", type=_positive_int, default=DEFAULT_DOCS)
    g.add_argument("--vocab", type=_positive_int, default=DEFAULT_VOCAB)
    g.add_argument("--mean-dl", type=_positive_int, default=DEFAULT_MEAN_DL)
    g.add_argument("--seed", type=int, default=DEFAULT_SEED)


def _add_bench_options(p, default_models):
    p.add_argument("--models", type=_model_list, default=default_models,
                   help="comma list of tfidf, bm25, bm25mod")
    p.add_argument("--reps", type=_positive_int, default=DEFAULT_REPS)
    p.add_argument("--warmup", type=_non_negative_int, default=DEFAULT_WARMUP)
    p.add_argument("--k1", type=float, default=DEFAULT_K1)
    p.add_argument("--b", type=float, default=DEFAULT_B)
    p.add_argument("--pad", type=float, default=DEFAULT_PAD)
    p.add_argument("--unit", choices=sorted(UNITS), default="us")
    p.add_argument("--out-dir", default="results")
    p.add_argument("--waive-ordering", metavar="REASON",
                   help="record a waiver for the positive-overhead expectation")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="callcost", description="Measure subroutine call overhead "
                     "on inverted-index term weighting.")
    parser.add_argument("--version", action="version", version=f"callcost {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value file; flags override it")
    common.add_argument("--quiet", action="store_true", help="do not mirror output to stdout")
    common.add_argument("-v", "--verbose", action="store_true")

    p = sub.add_parser("ingest", parents=[common], help="build and save an index")
    _add_corpus_source(p, index_flag=False)
    p.add_argument("--out", required=True, help="index file to write")

    p = sub.add_parser("run", parents=[common], help="compare inline and call forms")
    _add_corpus_source(p)
    _add_bench_options(p, list(Model))
    p.add_argument("--interleave", action="store_true",
                   help="alternate inline and call repetitions")

    p = sub.add_parser("scale", parents=[common], help="dataset-size scaling study")
    _add_corpus_source(p)
    _add_bench_options(p, [Model.TFIDF])
    p.add_argument("--factors", type=_factor_list, default=list(DEFAULT_FACTORS))

    p = sub.add_parser("report", parents=[common], help="re-render a raw results CSV")
    p.add_argument("--raw", required=True)
    p.add_argument("--format", choices=["md", "csv"], default="md")
    p.add_argument("--unit", choices=sorted(UNITS), default="us")
    p.add_argument("--out", help="write here instead of stdout")
    return parser


_BOOL_KEYS = {"quiet", "verbose", "synthetic", "interleave"}


def read_config_file(path) -> dict:
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key in _BOOL_KEYS:
            if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise ConfigError(f"{path}:{lineno}: {key} must be true or false")
            values[key] = value.lower() in ("true", "1", "yes")
        else:
            values[key] = value
    return values


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        try:
            config = read_config_file(args.config)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = sorted(set(config) - known - {"config"})
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        subparser.set_defaults(**config)
        args = parser.parse_args(argv)
    return args


# -- commands -----------------------------------------------------------------

def _source_count(args) -> int:
    return sum(bool(x) for x in (getattr(args, "index", None), args.input, args.synthetic))


def _corpus_description(args) -> dict:
    if getattr(args, "index", None):
        data = Path(args.index).read_bytes()
        return {"kind": "index", "path": str(args.index),
                "sha256": hashlib.sha256(data).hexdigest(), "seed": args.seed}
    if args.input:
        return {"kind": "input", "path": str(args.input), "seed": args.seed}
    return {"kind": "synthetic", "docs": args.docs, "vocab": args.vocab,
            "mean_dl": args.mean_dl, "seed": args.seed}


def load_corpus(args):
    n = _source_count(args)
    if n > 1:
        raise ConfigError("conflicting corpus sources: pick one of --index, --input, --synthetic")
    if n == 0:
        raise ConfigError("no corpus source: pass --index, --input or --synthetic")
    if getattr(args, "index", None):
        return load_index(args.index)
    if args.input:
        return build_index(read_corpus(args.input))
    docs = generate_synthetic_corpus(args.docs, args.vocab, args.mean_dl, args.seed)
    return build_index(docs)


def _color(text: str, code: str) -> str:
    if os.environ.get("CALLCOST_NO_COLOR") or not sys.stdout.isatty():
        return text
    return f"\x1b[{code}m{text}\x1b[0m"


def _echo(args, text: str = "") -> None:
    if not args.quiet:
        print(text)


def _base_metadata(args, argv) -> dict:
    return {
        "callcost_version": __version__,
        "command": args.command,
        "argv": list(argv),
        "config": {k: (v.value if isinstance(v, Model) else
                       [m.value for m in v] if isinstance(v, list) and v and isinstance(v[0], Model)
                       else v)
                   for k, v in sorted(vars(args).items())},
        "seed": args.seed,
        "reps": args.reps,
        "warmup": args.warmup,
        "parameters": {"k1": args.k1, "b": args.b, "pad": args.pad},
        "clock": {"name": CLOCK_NAME, "resolution_ns": clock_resolution_ns()},
        "gc_disabled_during_timing": True,
        "toolchain": f"{platform.python_implementation()} {platform.python_version()} "
                     f"({platform.platform()})",
        "never_inline_contract": NEVER_INLINE_CONTRACT,
        "corpus": _corpus_description(args),
        "ordering_waiver": args.waive_ordering,
    }


def _result_metadata(results) -> list:
    return [{"model": r.model.value, "factor": r.factor, "element_count": r.element_count,
             "weight_count": r.weight_count, "checksum": r.checksum,
             "overhead_pct": r.overhead_pct, "per_call_ns": r.per_call_cost,
             "overhead_positive": r.call.mean > r.inline.mean,
             "inline_min_ns": r.inline.minimum, "inline_median_ns": r.inline.median,
             "call_min_ns": r.call.minimum, "call_median_ns": r.call.median}
            for r in results]


def _print_results(args, results) -> None:
    for r in results:
        _echo(args, render_comparison_table(r, args.unit).to_markdown())
        pct = f"{r.overhead_pct:+.2f} %"
        _echo(args, f"overhead {_color(pct, '31' if r.overhead_pct > 0 else '32')}, "
                    f"per-call cost {r.per_call_cost:.2f} ns\n")


def cmd_ingest(args, argv) -> int:
    index, stats = load_corpus(args)
    save_index(index, stats, args.out)
    _echo(args, f"wrote {args.out}: {stats.d} documents, {len(index)} words, "
                f"{index.total_postings()} postings, avdl {stats.avdl:.4f}")
    return EXIT_OK


def cmd_run(args, argv) -> int:
    params = Bm25Params(args.k1, args.b)
    index, stats = load_corpus(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    results = [run_comparison(m, index, stats, params, args.reps, args.warmup, args.pad,
                              interleave=args.interleave)
               for m in args.models]
    write_raw_csv(results, out / "raw.csv")
    write_summary_csv(results, out / "summary.csv")
    (out / "report.md").write_text(build_report(results, args.unit).to_markdown(), "utf-8")
    meta = _base_metadata(args, argv)
    meta["interleave"] = args.interleave
    meta["results"] = _result_metadata(results)
    write_metadata(out / "metadata.json", meta)
    _print_results(args, results)
    return EXIT_OK


def cmd_scale(args, argv) -> int:
    params = Bm25Params(args.k1, args.b)
    index, stats = load_corpus(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = _base_metadata(args, argv)
    meta["factors"] = args.factors
    meta["scaling"] = {}
    all_results = []
    for model in args.models:
        try:
            rep = run_scaling(model, index, stats, params, args.factors, args.reps,
                              args.warmup, args.pad)
        except ScalingError as exc:
            partial = exc.partial
            write_raw_csv(all_results + partial, out / "raw.csv")
            meta["aborted"] = {"model": model.value, "error": str(exc),
                               "partial": _result_metadata(partial)}
            write_metadata(out / "metadata.json", meta)
            raise
        all_results += rep.comparisons
        emit_plot_data(rep.series(), out / f"plot_{model.value}.csv", rep.fits)
        meta["scaling"][model.value] = {
            form.value: {"slope_ns_per_element": fit.slope, "intercept_ns": fit.intercept,
                         "r2": fit.r2, "degenerate": fit.degenerate}
            for form, fit in rep.fits.items()
        }
        meta["scaling"][model.value]["warnings"] = rep.warnings
        for form in (Form.INLINE, Form.CALL):
            _echo(args, f"{model.value} {form.value}: r2 = {rep.fits[form].r2:.6f}")
    write_raw_csv(all_results, out / "raw.csv")
    write_summary_csv(all_results, out / "summary.csv")
    (out / "report.md").write_text(build_report(all_results, args.unit).to_markdown(), "utf-8")
    meta["results"] = _result_metadata(all_results)
    write_metadata(out / "metadata.json", meta)
    _print_results(args, all_results)
    return EXIT_OK


def cmd_report(args, argv) -> int:
    try:
        results = read_raw_csv(args.raw)
    except ValueError as exc:
        raise IndexFormatError(str(exc)) from exc
    if args.format == "md":
        text = build_report(results, args.unit).to_markdown()
    else:
        text = "".join(render_comparison_table(r, args.unit).to_csv() for r in results)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {"ingest": cmd_ingest, "run": cmd_run, "scale": cmd_scale, "report": cmd_report}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args, argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EquivalenceError as exc:
        print(f"equivalence gate failed: {exc}", file=sys.stderr)
        return EXIT_EQUIVALENCE
    except ScalingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EQUIVALENCE if isinstance(exc.__cause__, EquivalenceError) else EXIT_CONFIG
    except (IndexFormatError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, CorpusError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
