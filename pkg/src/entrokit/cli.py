"""Command-line frontend.

Ingests counts or raw key-generator output, runs the selected estimator,
and prints a single machine-readable JSON report on standard output.
Identical flags and inputs (including the Monte Carlo seed) always
produce byte-identical reports; floats are serialized with full
round-trip precision and no timestamp or environment state enters the
report. Exit codes: 0 success, 2 usage or input error, 3 numeric-domain
error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import __version__, bayes, histogram, montecarlo, source
from .entropy import (
    Distribution,
    EntropyEstimate,
    EstimatorKind,
    MIN_ENTROPY,
    RenyiOrder,
    SHANNON,
    conditional_collision_entropy,
    order_profile,
)
from .errors import DomainError, InputError, ParseError

_LN2 = 0.6931471805599453

_SMALL_SAMPLE_FACTOR = 10  # plug-in warning threshold: n < 10 * s


def _seed(text: str) -> int:
    value = int(text)
    if not (0 <= value < 2**64):
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def _add_input_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--counts", metavar="FILE", help="counts CSV (symbol,count per line)")
    parser.add_argument("--raw", metavar="FILE", help="raw binary stream")
    parser.add_argument(
        "--symbol-bits",
        type=int,
        choices=histogram.SYMBOL_BITS,
        help="symbol width for --raw, MSB-first bit slicing",
    )


def _add_prior_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--alpha",
        type=float,
        help="prior concentration (default: alphabet size, the add-one prior; "
        "use s/2 for Jeffreys)",
    )
    parser.add_argument(
        "--base",
        default="uniform",
        metavar="uniform|FILE",
        help="prior base measure: 'uniform' or a symbol,weight CSV",
    )


def _add_mc_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=_seed, help="Monte Carlo seed (required for mc)")
    parser.add_argument("--samples", type=_positive_int, default=10000, help="Monte Carlo draws")
    parser.add_argument("--chunks", type=_positive_int, default=1, help="Monte Carlo substreams")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entrokit",
        description="Entropy estimation for key generators and key-agreement analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="human-readable summary on stderr"
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    estimate = sub.add_parser("estimate", help="entropy of a symbol histogram")
    _add_input_flags(estimate)
    estimate.add_argument(
        "--order",
        default="2",
        help="entropy order: shannon, min, or a positive float (default 2, collision)",
    )
    estimate.add_argument(
        "--estimator",
        choices=("plugin", "bayes", "mc"),
        default="bayes",
        help="plug-in frequencies, Bayesian closed form (default), or Monte Carlo",
    )
    _add_prior_flags(estimate)
    _add_mc_flags(estimate)
    estimate.add_argument(
        "--emit-counts", metavar="FILE", help="also write the ingested histogram as counts CSV"
    )

    conditional = sub.add_parser(
        "conditional", help="collision entropy of X given side information Y"
    )
    conditional.add_argument(
        "--joint", metavar="FILE", required=True, help="joint counts CSV (x,y,count per line)"
    )

    for name, help_text in (
        ("rate", "entropy rate under an L-block source approximation"),
        ("keysize", "effective key size from an entropy rate"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_input_flags(p)
        p.add_argument("--order-l", type=_positive_int, default=1, help="block length L")
        p.add_argument(
            "--window",
            choices=("overlap", "disjoint"),
            default="overlap",
            help="block windowing (default overlap)",
        )
        p.add_argument("--order", default="2", help="entropy order (default 2, collision)")
        p.add_argument(
            "--estimator",
            choices=("plugin", "bayes"),
            default="bayes",
            help="rate estimator (default bayes)",
        )
        _add_prior_flags(p)
        p.add_argument(
            "--checkpoints",
            metavar="N1,N2,...",
            help="prefix lengths for a convergence curve (raw input only)",
        )
        p.add_argument("--curve-csv", metavar="FILE", help="write the convergence curve as CSV")
        if name == "keysize":
            p.add_argument(
                "--key-symbols", type=_positive_int, required=True, help="key length in symbols"
            )

    profile = sub.add_parser("profile", help="plug-in entropies across orders")
    _add_input_flags(profile)
    profile.add_argument(
        "--orders",
        metavar="O1,O2,...",
        help="extra orders beyond the default shannon,2,min chain",
    )
    return parser


def _read_text(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _read_bytes(path: str) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


def _usage_error(message: str) -> "NoReturn":
    raise InputError(message)


def _load_histogram(args) -> tuple[histogram.Histogram, dict]:
    if (args.counts is None) == (args.raw is None):
        _usage_error("exactly one of --counts or --raw is required")
    if args.counts is not None:
        h = histogram.from_counts_csv(_read_text(args.counts))
        echo = {"kind": "counts", "path": args.counts}
    else:
        if args.symbol_bits is None:
            _usage_error("--raw requires --symbol-bits")
        h = histogram.from_raw_bytes(_read_bytes(args.raw), args.symbol_bits)
        echo = {"kind": "raw", "path": args.raw, "symbol_bits": args.symbol_bits}
    echo.update({"s": h.s, "n": h.n})
    return h, echo


def _load_stream(args) -> tuple:
    """Symbol stream plus input echo, for the rate/keysize subcommands."""
    if (args.counts is None) == (args.raw is None):
        _usage_error("exactly one of --counts or --raw is required")
    if args.raw is not None:
        if args.symbol_bits is None:
            _usage_error("--raw requires --symbol-bits")
        stream = histogram.symbols_from_bytes(_read_bytes(args.raw), args.symbol_bits)
        echo = {
            "kind": "raw",
            "path": args.raw,
            "symbol_bits": args.symbol_bits,
            "n": int(stream.size),
        }
        return stream, 2**args.symbol_bits, None, echo
    if args.order_l != 1:
        _usage_error("--counts carries no symbol order; block length L must be 1")
    h = histogram.from_counts_csv(_read_text(args.counts))
    echo = {"kind": "counts", "path": args.counts, "s": h.s, "n": h.n}
    return None, h.s, h, echo


def _load_base(path: str, s: int) -> Distribution:
    """Base measure file: symbol,weight lines with positive float weights."""
    weights = []
    for lineno, line in enumerate(_read_text(path).splitlines(), start=1):
        parts = line.split(",")
        if len(parts) != 2 or not parts[0]:
            raise ParseError("expected 'symbol,weight'", lineno)
        try:
            weight = float(parts[1])
        except ValueError:
            raise ParseError(f"malformed weight {parts[1]!r}", lineno) from None
        if not weight > 0.0:
            raise DomainError(f"base weights must be > 0, got {weight} on line {lineno}")
        weights.append(weight)
    if len(weights) != s:
        _usage_error(f"base measure has {len(weights)} entries, alphabet has {s}")
    total = sum(weights)
    return Distribution([w / total for w in weights])


def _resolve_prior(args, s: int) -> tuple[bayes.DirichletPrior, dict]:
    alpha = float(args.alpha) if args.alpha is not None else float(s)
    if args.base == "uniform":
        base = Distribution.uniform(s)
    else:
        base = _load_base(args.base, s)
    prior = bayes.DirichletPrior(alpha, base)
    return prior, {"alpha": alpha, "base": args.base}


def _parse_order(text: str) -> RenyiOrder:
    return RenyiOrder.parse(text)


def _order_json(order: RenyiOrder):
    return order.gamma if order.kind == "finite" else order.kind


def _estimate_json(est: EntropyEstimate) -> dict:
    entry = {
        "kind": "entropy_estimate",
        "order": _order_json(est.order),
        "estimator": est.estimator.value,
        "value_bits": est.value_bits,
        "n": est.n,
    }
    if est.stderr_bits is not None:
        entry["stderr_bits"] = est.stderr_bits
    return entry


def _mc_json(result: montecarlo.McResult, statistic: str, order: RenyiOrder) -> dict:
    entry = {
        "kind": "mc_result",
        "statistic": statistic,
        "order": _order_json(order),
        "mean": result.mean,
        "stderr": result.stderr,
        "samples": result.samples,
    }
    if result.quantiles is not None:
        q = result.quantiles
        entry["quantiles"] = {"p2_5": q[0], "p50": q[1], "p97_5": q[2]}
    return entry


def _rate_json(report: source.RateReport) -> dict:
    return {
        "kind": "rate_report",
        "order_l": report.order,
        "base_alphabet": report.base_alphabet,
        "grams": report.grams,
        "entropy_per_gram_bits": report.entropy_per_gram_bits,
        "rate_bits_per_symbol": report.rate_bits_per_symbol,
        "estimator": report.estimator.value,
        "entropy_order": _order_json(report.entropy_order),
    }


def _clamp(value: float) -> float:
    return 0.0 if -1e-9 < value < 0.0 else value


def _mc_config(args) -> montecarlo.McConfig:
    if args.seed is None:
        _usage_error("--estimator mc requires --seed for reproducibility")
    return montecarlo.McConfig(samples=args.samples, seed=args.seed, chunks=args.chunks)


def _run_estimate(args, command: dict, results: list, warnings: list) -> None:
    h, command["input"] = _load_histogram(args)
    if args.emit_counts:
        with open(args.emit_counts, "w", encoding="utf-8") as fh:
            fh.write(histogram.counts_to_csv(h))
    order = _parse_order(args.order)
    command["order"] = _order_json(order)
    command["estimator"] = args.estimator

    if args.estimator == "plugin":
        if h.n < _SMALL_SAMPLE_FACTOR * h.s:
            warnings.append(
                f"plug-in estimate with n={h.n} < {_SMALL_SAMPLE_FACTOR}*s={10 * h.s}: "
                "small-sample plug-in entropy is biased downward"
            )
        est = order_profile(Distribution.from_histogram(h), [order])[0]
        results.append(_estimate_json(dataclasses.replace(est, n=h.n)))
        return

    prior, command["prior"] = _resolve_prior(args, h.s)
    if args.estimator == "bayes":
        if order.kind == "shannon":
            est = bayes.shannon_bayes(prior, h)
        elif order.kind == "min":
            _usage_error(
                "no closed-form Bayesian min-entropy exists; use --estimator mc, "
                "--estimator plugin, or a large finite --order"
            )
        else:
            est = bayes.renyi_bayes(prior, h, order.gamma)
        results.append(_estimate_json(est))
        return

    cfg = _mc_config(args)
    command["monte_carlo"] = {
        "seed": cfg.seed,
        "samples": cfg.samples,
        "chunks": cfg.chunks,
        "generator": montecarlo.GENERATOR_NAME,
    }
    post = bayes.posterior(prior, h)
    entropy_mc = montecarlo.estimate_entropy_posterior(post, order, cfg)
    if order.kind == "finite":
        # Primary Monte Carlo estimate: the log of the sampled moment, the
        # sampling analogue of the closed form; spread via the delta method.
        gamma = order.gamma
        moment_mc = montecarlo.estimate_moment(post, gamma, cfg)
        value = _clamp(
            float(__import__("math").log(moment_mc.mean)) / ((1.0 - gamma) * _LN2)
        )
        stderr = moment_mc.stderr / (abs(1.0 - gamma) * moment_mc.mean * _LN2)
        results.append(
            _estimate_json(
                EntropyEstimate(value, order, EstimatorKind.BAYES_MONTE_CARLO, h.n, stderr)
            )
        )
        results.append(_mc_json(moment_mc, "power_sum", order))
    else:
        results.append(
            _estimate_json(
                EntropyEstimate(
                    _clamp(entropy_mc.mean),
                    order,
                    EstimatorKind.BAYES_MONTE_CARLO,
                    h.n,
                    entropy_mc.stderr,
                )
            )
        )
    results.append(_mc_json(entropy_mc, "entropy_bits", order))


def _run_conditional(args, command: dict, results: list, warnings: list) -> None:
    joint = histogram.from_joint_counts_csv(_read_text(args.joint))
    command["input"] = {
        "kind": "joint",
        "path": args.joint,
        "s_x": joint.s_x,
        "s_y": joint.s_y,
        "n": joint.n,
    }
    results.append(_estimate_json(conditional_collision_entropy(joint)))


def _run_rate(args, command: dict, results: list, warnings: list) -> source.RateReport:
    stream, s0, counts_histogram, command["input"] = _load_stream(args)
    windowing = (
        source.Windowing.OVERLAPPING if args.window == "overlap" else source.Windowing.DISJOINT
    )
    cfg = source.SourceConfig(order=args.order_l, base_alphabet=s0, windowing=windowing)
    order = _parse_order(args.order)
    command.update(
        {
            "order_l": cfg.order,
            "window": windowing.value,
            "order": _order_json(order),
            "estimator": args.estimator,
        }
    )
    if order.kind == "min" and args.estimator == "bayes":
        _usage_error(
            "no closed-form Bayesian min-entropy exists; use --estimator plugin "
            "or a large finite --order"
        )
    prior = None
    if args.estimator == "bayes":
        prior, command["prior"] = _resolve_prior_for_blocks(args, cfg)
    if counts_histogram is not None:
        report = source.rate_from_histogram(counts_histogram, cfg, args.estimator, prior, order)
    else:
        report = source.entropy_rate(stream, cfg, args.estimator, prior, order)
    results.append(_rate_json(report))

    if args.checkpoints:
        if stream is None:
            _usage_error("--checkpoints needs --raw input (counts carry no symbol order)")
        points = [int(p) for p in args.checkpoints.split(",")]
        command["checkpoints"] = points
        curve = source.convergence_curve(stream, cfg, points, args.estimator, prior, order)
        results.append(
            {
                "kind": "convergence_curve",
                "points": [{"n": n, "rate_bits_per_symbol": r} for n, r in curve],
            }
        )
        if args.curve_csv:
            with open(args.curve_csv, "w", encoding="utf-8") as fh:
                fh.write("n,rate_bits_per_symbol\n")
                fh.writelines(f"{n},{r!r}\n" for n, r in curve)
    elif args.curve_csv:
        _usage_error("--curve-csv requires --checkpoints")
    return report


def _resolve_prior_for_blocks(args, cfg: source.SourceConfig):
    alpha_default_s = cfg.block_alphabet
    alpha = float(args.alpha) if args.alpha is not None else float(alpha_default_s)
    if args.base == "uniform":
        base = Distribution.uniform(alpha_default_s)
    else:
        base = _load_base(args.base, alpha_default_s)
    return bayes.DirichletPrior(alpha, base), {"alpha": alpha, "base": args.base}


def _run_keysize(args, command: dict, results: list, warnings: list) -> None:
    rate_report = _run_rate(args, command, results, warnings)
    command["key_symbols"] = args.key_symbols
    key = source.effective_key_size(rate_report, args.key_symbols)
    results.append(
        {
            "kind": "key_size_report",
            "key_length_symbols": key.key_length_symbols,
            "rate_bits_per_symbol": key.rate_bits_per_symbol,
            "effective_bits": key.effective_bits,
            "nominal_bits": key.nominal_bits,
        }
    )


def _run_profile(args, command: dict, results: list, warnings: list) -> None:
    h, command["input"] = _load_histogram(args)
    orders = [SHANNON, RenyiOrder.finite(2.0), MIN_ENTROPY]
    if args.orders:
        orders.extend(_parse_order(tok) for tok in args.orders.split(","))
    command["orders"] = [_order_json(o) for o in orders]
    command["estimator"] = "plugin"
    if h.n < _SMALL_SAMPLE_FACTOR * h.s:
        warnings.append(
            f"plug-in profile with n={h.n} < {_SMALL_SAMPLE_FACTOR}*s={10 * h.s}: "
            "small-sample plug-in entropy is biased downward"
        )
    for est in order_profile(Distribution.from_histogram(h), orders):
        results.append(_estimate_json(dataclasses.replace(est, n=h.n)))


_RUNNERS = {
    "estimate": _run_estimate,
    "conditional": _run_conditional,
    "rate": _run_rate,
    "keysize": _run_keysize,
    "profile": _run_profile,
}


def _summarize(report: dict) -> str:
    lines = [f"entrokit {report['version']}: {report['command']['subcommand']}"]
    for entry in report["results"]:
        if entry["kind"] == "entropy_estimate":
            lines.append(
                f"  H[{entry['order']}] = {entry['value_bits']:.6f} bits"
                f" ({entry['estimator']})"
            )
        elif entry["kind"] == "rate_report":
            lines.append(
                f"  rate = {entry['rate_bits_per_symbol']:.6f} bits/symbol"
                f" (L={entry['order_l']}, {entry['estimator']})"
            )
        elif entry["kind"] == "key_size_report":
            lines.append(
                f"  effective key = {entry['effective_bits']:.3f}"
                f" / nominal {entry['nominal_bits']:.3f} bits"
            )
    for warning in report["warnings"]:
        lines.append(f"  warning: {warning}")
    return "\n".join(lines)


def run(argv) -> int:
    """Run one CLI invocation; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles usage/--version printing
        code = exc.code
        return int(code) if code else 0

    command: dict = {"subcommand": args.subcommand}
    results: list = []
    warnings: list = []
    try:
        _RUNNERS[args.subcommand](args, command, results, warnings)
    except DomainError as exc:
        print(f"entrokit: {exc}", file=sys.stderr)
        return 3
    except (InputError, OSError, ValueError) as exc:
        print(f"entrokit: {exc}", file=sys.stderr)
        return 2

    report = {
        "version": __version__,
        "command": command,
        "results": results,
        "warnings": warnings,
    }
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    if args.verbose:
        print(_summarize(report), file=sys.stderr)
    return 0


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
