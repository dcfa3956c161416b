"""
Command line entry point: `polarkern <subcommand> [flags]`.

Results go to stdout (or `--out PATH`) as JSON, or as CSV with `--csv` for the
tabular commands. Diagnostics go to stderr.
"""
import json
import sys
from argparse import ArgumentParser, BooleanOptionalAction, Namespace
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd

from polarkern.agent.selfplay import SizeDistribution
from polarkern.agent.training import TrainingConfig, training_loop
from polarkern.bler.code import PolarCode
from polarkern.bler.frozen import FrozenSetEstimator
from polarkern.bler.simulation import BlerSimulator, bler_frame
from polarkern.exceptions import PolarKernError
from polarkern.metrics import TARGET_PDPS, partial_distance_profile, target_pdp
from polarkern.models.binmatrix import BinMatrix, read_kernel
from polarkern.rmld.decoder import build_decoder, compare_reuse, decode_kernel, kernel_complexity
from polarkern.search.brute_force import BruteForceSearch
from polarkern.search.config import RewardConfig
from polarkern.search.environment import InitMode, Initialization
from polarkern.search.random_agent import RandomAgent
from polarkern.search.scaling import fit_complexity_scaling, reference_samples


DEFAULT_SEED = 2024
BOTTOM_PREFIX = "bottom:"


def _emit(text: str, out: Optional[str]) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, out: Optional[str]) -> None:
    _emit(json.dumps(payload, indent=2), out)


def _emit_frame(frame: pd.DataFrame, out: Optional[str]) -> None:
    _emit(frame.to_csv(index=False), out)


def _float_list(text: str) -> list[float]:
    return [float(item) for item in text.split(",") if item]


def _int_list(text: str) -> list[int]:
    return [int(item) for item in text.split(",") if item]


def parse_initialization(text: str) -> Initialization:
    """
    "none", "random" or "bottom:PATH" (a file with the bottom rows of the kernel).
    """

    if text == "none":
        return Initialization.none()
    if text == "random":
        return Initialization.randomized()
    if text.startswith(BOTTOM_PREFIX):
        return Initialization.bottom(read_kernel(text[len(BOTTOM_PREFIX):]))
    raise PolarKernError(f"Unknown initialization {text!r}, expected none, random or bottom:PATH")


def _code_size(kernel: BinMatrix, levels: int, rate: float) -> tuple[int, int]:
    n = kernel.n_rows**levels
    k = int(round(rate * n))
    assert 0 < k <= n, f"Rate {rate} gives k = {k} for n = {n}"
    return n, k


def run_pdp(args: Namespace) -> None:
    kernel = read_kernel(args.kernel)
    pdp = partial_distance_profile(kernel)
    payload = pdp.to_json()
    if kernel.n_rows in TARGET_PDPS:
        payload["matches_target"] = tuple(pdp) == tuple(target_pdp(kernel.n_rows))
    _emit_json(payload, args.out)


def run_complexity(args: Namespace) -> None:
    kernel = read_kernel(args.kernel)
    if args.compare:
        comparison = compare_reuse(kernel)
        payload = comparison["with_reuse"].to_json()
        payload["without_reuse"] = comparison["without_reuse"].to_json()
        payload["saving"] = round(comparison["saving"], 4)
    else:
        payload = kernel_complexity(kernel, reuse=args.reuse).to_json()
    _emit_json(payload, args.out)


def run_decode(args: Namespace) -> None:
    kernel = read_kernel(args.kernel)
    llrs = _float_list(args.llrs)
    frozen = [character == "1" for character in args.frozen] if args.frozen else None
    decisions, soft = decode_kernel(build_decoder(kernel, reuse=args.reuse), llrs, frozen)
    _emit_json({"u": decisions, "soft": [round(value, 6) for value in soft]}, args.out)


def run_search_random(args: Namespace) -> None:
    ell = args.l
    config = RewardConfig.from_file(args.config, ell) if args.config else None
    agent = RandomAgent(n_processes=args.jobs, verbose=args.verbose)
    result = agent.search(
        ell,
        target_pdp(ell),
        args.iterations,
        initialization=parse_initialization(args.init),
        config=config,
        seed=args.seed,
    )
    if args.csv:
        _emit_frame(result.spectrum_frame(), args.out)
    else:
        _emit_json(result.to_json(), args.out)


def run_search_brute(args: Namespace) -> None:
    kernel = BruteForceSearch(budget=args.budget).search(args.l, target_pdp(args.l))
    payload = {"l": args.l, "found": kernel is not None, "kernel": kernel.to_strings() if kernel else None}
    if kernel is not None:
        payload["complexity"] = kernel_complexity(kernel).total
    _emit_json(payload, args.out)


def run_train(args: Namespace) -> None:
    overrides: dict = {"seed": args.seed, "n_processes": args.jobs}
    if args.sizes:
        distribution = SizeDistribution.from_string(args.sizes)
        overrides["sizes"] = dict(zip(distribution.sizes, distribution.probabilities))
    elif args.l:
        overrides["sizes"] = {args.l: 1.0}
    for name, value in (("iterations", args.iterations), ("games", args.games)):
        if value is not None:
            overrides[name] = value
    if args.bottom_rows:
        overrides["bottom_rows"] = tuple(_int_list(args.bottom_rows))
        overrides["init"] = "bottom"
    initialization = parse_initialization(args.init)
    if initialization.mode == InitMode.BOTTOM_ROWS:
        overrides["init"] = "bottom"
        overrides["bottom_file"] = args.init[len(BOTTOM_PREFIX):]
    elif initialization.mode == InitMode.RANDOMIZED and not args.bottom_rows:
        overrides["init"] = "random"

    config = TrainingConfig.from_file(args.config, **overrides) if args.config else TrainingConfig(**overrides)
    result = training_loop(config, out_dir=args.out_dir, verbose=args.verbose)
    payload = {
        "best_complexity": {str(ell): value for ell, value in sorted(result.best_complexities.items())},
        "best_kernel": {str(ell): kernel.to_strings() for ell, kernel in sorted(result.best_kernels.items())},
    }
    _emit_json(payload, args.out)


def run_frozen(args: Namespace) -> None:
    kernel = read_kernel(args.kernel)
    n, k = _code_size(kernel, args.levels, args.rate)
    estimator = FrozenSetEstimator(n_processes=args.jobs, verbose=args.verbose)
    estimate = estimator.estimate(kernel, args.levels, k, args.ebn0[0], args.iters, seed=args.seed)
    _emit_json(
        {
            "n": n,
            "k": k,
            "ebn0_db": args.ebn0[0],
            "frozen": "".join("1" if bit else "0" for bit in estimate.frozen),
            "error_counts": estimate.error_counts.tolist(),
        },
        args.out,
    )


def run_bler(args: Namespace) -> None:
    kernel = read_kernel(args.kernel)
    _, k = _code_size(kernel, args.levels, args.rate)
    estimator = FrozenSetEstimator(n_processes=args.jobs, verbose=args.verbose)
    simulator = BlerSimulator(n_processes=args.jobs, verbose=args.verbose)
    code = PolarCode.from_kernel(kernel, args.levels, reuse=args.reuse)

    results = []
    for point, ebn0_db in enumerate(args.ebn0):
        # frozen sets are selected at the evaluation SNR
        frozen = estimator.estimate(
            kernel, args.levels, k, ebn0_db, args.frozen_iters or args.iters, seed=args.seed
        ).frozen
        results.append(
            simulator.simulate_point(
                code.with_frozen(frozen), ebn0_db, args.iters, args.max_errors, args.seed, point
            )
        )

    frame = bler_frame(results)
    if args.csv:
        _emit_frame(frame.assign(bler=frame["bler"].map("{:.6e}".format)), args.out)
    else:
        _emit_json(
            {
                "n": code.n,
                "k": k,
                "points": [
                    {"ebn0_db": row.ebn0_db, "bler": f"{row.bler:.4e}", "trials": row.trials, "errors": row.errors}
                    for row in results
                ],
            },
            args.out,
        )


def run_fit_scaling(args: Namespace) -> None:
    if args.data:
        frame = pd.read_csv(args.data)
        samples = list(zip(frame["l"], frame["complexity"]))
    else:
        samples = reference_samples(args.reference)
    fit = fit_complexity_scaling(samples)
    payload = fit.to_json()
    payload["samples"] = len(samples)
    _emit_json(payload, args.out)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="polarkern", description="Polarization kernel search and RMLD decoding")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, help_text: str) -> ArgumentParser:
        subparser = subparsers.add_parser(name, help=help_text)
        subparser.set_defaults(handler=handler)
        subparser.add_argument("--out", default=None, help="Output file (default: stdout)")
        subparser.add_argument("--seed", type=int, default=DEFAULT_SEED)
        subparser.add_argument("--jobs", type=int, default=1, help="Number of worker processes")
        subparser.add_argument("--verbose", action="store_true", help="Show progress bars")
        return subparser

    pdp = add("pdp", run_pdp, "Partial distance profile and error exponent of a kernel")
    pdp.add_argument("--kernel", required=True)

    complexity = add("complexity", run_complexity, "RMLD decoding complexity of a kernel")
    complexity.add_argument("--kernel", required=True)
    complexity.add_argument("--reuse", action=BooleanOptionalAction, default=True)
    complexity.add_argument("--compare", action="store_true", help="Report both reuse settings")

    decode = add("decode", run_decode, "Successive RMLD decoding of one kernel block")
    decode.add_argument("--kernel", required=True)
    decode.add_argument("--llrs", required=True, help="Comma separated channel LLRs")
    decode.add_argument("--frozen", default=None, help="Frozen mask, e.g. 1100")
    decode.add_argument("--reuse", action=BooleanOptionalAction, default=True)

    search_random = add("search-random", run_search_random, "Random agent kernel search")
    search_random.add_argument("--l", type=int, required=True)
    search_random.add_argument("--iterations", type=int, default=10_000)
    search_random.add_argument("--init", default="none", help="none | random | bottom:PATH")
    search_random.add_argument("--config", default=None, help="JSON file of reward settings")
    search_random.add_argument("--csv", action="store_true", help="Write the complexity spectrum as CSV")

    search_brute = add("search-brute", run_search_brute, "Lexicographic backtracking kernel search")
    search_brute.add_argument("--l", type=int, required=True)
    search_brute.add_argument("--budget", type=int, default=1_000_000)

    train = add("train", run_train, "Self-play training of the tree search agent")
    train.add_argument("--l", type=int, default=None)
    train.add_argument("--sizes", default=None, help="Size distribution, e.g. 16:0.4,15:0.29,14:0.15")
    train.add_argument("--iterations", type=int, default=None)
    train.add_argument("--games", type=int, default=None)
    train.add_argument("--init", default="none", help="none | random | bottom:PATH")
    train.add_argument(
        "--bottom-rows",
        default=None,
        help="Numbers of fixed bottom rows (sorted Arikan unless --init bottom:PATH), e.g. 3,4,5",
    )
    train.add_argument("--config", default=None, help="JSON file of training settings")
    train.add_argument("--out-dir", default=None, help="Directory for logs, checkpoints and best kernels")

    for name, handler, help_text in (
        ("bler", run_bler, "Monte-Carlo block error rate of a polar code"),
        ("frozen", run_frozen, "Monte-Carlo frozen set selection"),
    ):
        subparser = add(name, handler, help_text)
        subparser.add_argument("--kernel", required=True)
        subparser.add_argument("--levels", type=int, required=True, help="Number m of Kronecker levels")
        subparser.add_argument("--rate", type=float, default=0.5)
        subparser.add_argument("--ebn0", type=_float_list, required=True, help="Comma separated Eb/N0 values in dB")
        subparser.add_argument("--iters", type=int, default=10_000)
    bler = subparsers.choices["bler"]
    bler.add_argument("--max-errors", type=int, default=None)
    bler.add_argument("--frozen-iters", type=int, default=None)
    bler.add_argument("--reuse", action=BooleanOptionalAction, default=True)
    bler.add_argument("--csv", action="store_true")

    fit_scaling = add("fit-scaling", run_fit_scaling, "Fit log2 complexity against kernel size")
    fit_scaling.add_argument("--reference", choices=["min", "max"], default="max")
    fit_scaling.add_argument("--data", default=None, help="CSV with columns l and complexity")

    return parser


def dispatch(argv: Sequence[str]) -> int:
    args = build_parser().parse_args(list(argv))
    try:
        args.handler(args)
    except (PolarKernError, AssertionError, OSError) as error:
        sys.stderr.write(f"polarkern {args.command}: error: {error}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))
