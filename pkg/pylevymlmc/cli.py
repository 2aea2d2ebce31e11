"""Command line front-end: pylevymlmc {estimate,rates,levels,verify} --config FILE

Exit codes: 0 success, 1 failed verification, 2 configuration error, 3 runtime error.
"""
import argparse
import csv
import io
import json
import logging
import sys

from .config import load_config
from .errors import ConfigError, PyLevyMlmcError

logger = logging.getLogger(__name__)

LEVELS_HEADER = ["k", "n", "eps", "h", "mean", "var", "envelope", "breakpoints"]


def cmd_estimate(config, args):
    from .experiment.mlmc import MultilevelMonteCarlo
    experiment = MultilevelMonteCarlo(config, seed=args.seed, workers=args.workers, verbose=args.verbose)
    result = experiment.estimate()
    return json.dumps(result.to_json()) + "\n", 0


def cmd_rates(config, args):
    from .experiment.rates import RateSweep, write_orders_csv
    if args.orders:
        out = io.StringIO()
        write_orders_csv(out, model=config.model)
        return out.getvalue(), 0
    sweep = RateSweep(config, seed=args.seed, workers=args.workers, verbose=args.verbose)
    sweep.run()
    out = io.StringIO()
    sweep.write_csv(out)
    if args.compare_correction:
        tau = max(sweep.tau_list)
        advantage = sweep.correction_advantage(tau)
        out.write("# correction_advantage tau = %r: rms_corrected = %r, rms_uncorrected = %r, agreement = %r\n"
                  % (tau, advantage["rms_corrected"], advantage["rms_uncorrected"], advantage["agreement"]))
    return out.getvalue(), 0


def cmd_levels(config, args):
    from .experiment.mlmc import MultilevelMonteCarlo, mse_bound_terms
    experiment = MultilevelMonteCarlo(config, seed=args.seed, workers=args.workers, verbose=args.verbose)
    profile = experiment.level_profile(args.n_probe)
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(LEVELS_HEADER)
    for level in profile:
        writer.writerow([level.k, level.n, level.eps, level.h, level.mean, level.var, level.envelope,
                         level.breakpoints])
    terms = mse_bound_terms(experiment.model, experiment.schedule)
    out.write("# bias_proxy = %r\n# variance_proxy = %r\n" % (terms["bias"], terms["variance"]))
    return out.getvalue(), 0


def cmd_verify(config, args):
    from .experiment.verification import Verification
    verification = Verification(config, seed=args.seed, workers=args.workers, verbose=args.verbose)
    passed = verification.run()
    text = "".join("%s\n" % result for result in verification.results)
    return text, 0 if passed else 1


COMMANDS = {"estimate": cmd_estimate, "rates": cmd_rates, "levels": cmd_levels, "verify": cmd_verify}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="JSON experiment configuration")
    common.add_argument("--seed", type=int, default=None, help="override the configured seed")
    common.add_argument("--workers", type=int, default=None,
                        help="number of worker threads (never changes the output)")
    common.add_argument("--out", default=None, help="write output to this file instead of stdout")
    common.add_argument("--verbose", action="store_true", help="log progress")

    parser = argparse.ArgumentParser(prog="pylevymlmc",
                                     description="Multilevel Monte Carlo with Gaussian correction "
                                                 "for Levy-driven SDEs")
    sub = parser.add_subparsers(dest="command")
    sub.required = True
    sub.add_parser("estimate", parents=[common], help="run the multilevel estimator (JSON)")
    rates = sub.add_parser("rates", parents=[common], help="cost versus error sweep (CSV)")
    rates.add_argument("--compare-correction", action="store_true",
                       help="append the corrected versus uncorrected comparison at the largest tau")
    rates.add_argument("--orders", action="store_true",
                       help="print guaranteed convergence orders against the Blumenthal-Getoor index "
                            "instead of running the sweep")
    levels = sub.add_parser("levels", parents=[common], help="per-level variance profile (CSV)")
    levels.add_argument("--n-probe", type=int, default=1000, help="samples per level (>= 100)")
    sub.add_parser("verify", parents=[common], help="run the invariant checks")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(format='%(asctime)s %(levelname)s:%(message)s', datefmt='%I:%M:%S',
                        level=logging.INFO if args.verbose else logging.WARNING)
    try:
        config = load_config(args.config)
        text, code = COMMANDS[args.command](config, args)
    except ConfigError as e:
        sys.stderr.write("Configuration error: %s\n" % e)
        return 2
    except (PyLevyMlmcError, ArithmeticError, ValueError) as e:
        sys.stderr.write("Error: %s\n" % e)
        return 3
    if args.out:
        with open(args.out, 'w', encoding='utf-8') as f:
            f.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
