"""``fptrace`` command line.

Exit status: 0 on success, 1 on a negative result (property fails, trace is
ambiguous, search exhausted), 2 on usage, input or file errors.
"""

import argparse
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import attack, construct, core, estimate, trace, verify
from ._rng import derive_seed

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    """The argv of a run plus its fully parsed flags (defaults included).

    Replaying ``run(config.argv)`` reproduces the run's primary output.
    """

    argv: list
    options: dict = field(default_factory=dict)

    @classmethod
    def from_namespace(cls, argv, ns):
        opts = {k: v for k, v in vars(ns).items() if k != "func"}
        return cls(list(argv), opts)

    def to_json(self):
        return json.dumps(asdict(self), sort_keys=True, default=str)


def _common():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=0, help="64-bit seed for every random draw (default 0)")
    g.add_argument("--threads", type=int, default=0, help="worker threads; 0 means all cores")
    fmt = g.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="emit JSON")
    fmt.add_argument("--csv", action="store_true", help="emit CSV (tables only)")
    g.add_argument("--out", default=None, help="output path (default stdout)")
    g.add_argument("--config-out", default=None, help="also write the run configuration as JSON")
    return p


def _rational(text):
    try:
        return core.parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _coalition(text):
    try:
        return core.Coalition(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad coalition {text!r}: {exc}")


def build_parser():
    common = _common()
    parser = _Parser(prog="fptrace", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a code matrix")
    gsub = gen.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = gsub.add_parser(
        "random",
        parents=[common],
        help="i.i.d. fair-bit code",
        description="Sample an n x M matrix with independent Bernoulli(1/2) entries "
        "(the random ensemble of the existence argument) from SplitMix64.",
    )
    p.add_argument("--n", type=int, required=True, help="rows (code length)")
    p.add_argument("--cols", type=int, required=True, help="columns M (number of users)")
    p.set_defaults(func=_cmd_gen_random)
    p = gsub.add_parser(
        "bch",
        parents=[common],
        help="binary BCH parity-check matrix",
        description="Binary parity-check matrix of the narrow-sense BCH code with designed "
        "distance 2t+1 over GF(2^m): every 2t columns are independent over the reals, "
        "giving a noiseless t-traceable code of rate 1/t.",
    )
    p.add_argument("--m", type=int, required=True, help="field degree, 2..16")
    p.add_argument("--t", type=int, required=True, help="coalition bound")
    p.add_argument("--poly", type=lambda s: int(s, 0), default=None, help="primitive polynomial bitmask")
    p.set_defaults(func=_cmd_gen_bch)

    p = sub.add_parser(
        "verify",
        parents=[common],
        help="check a traceability property exhaustively",
        description="hamming: averaged signatures of distinct coalitions of size <= t differ "
        "in more than 2T coordinates. euclidean: they are more than 2*delta apart. "
        "independence: every 2t columns are linearly independent over the rationals.",
    )
    p.add_argument("--code", required=True, help="code file")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--mode", choices=["hamming", "euclidean", "independence"], default="hamming")
    p.add_argument("--T", type=int, default=0, help="Hamming noise support bound")
    p.add_argument("--delta-sq", type=_rational, default="0", help="squared Euclidean radius, p/q")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser(
        "attack",
        parents=[common],
        help="simulate an averaging attack and extract the syndrome",
        description="Embed fingerprints on seeded orthonormal carriers, average the copies "
        "of the coalition, add noise inside the carrier span and project back to get "
        "the syndrome s_k = <y - x, f_k>.",
    )
    p.add_argument("--code", required=True)
    p.add_argument("--coalition", type=_coalition, required=True, help="comma-separated user indices, 1-based")
    p.add_argument("--noise", default="none", help="none | ball:delta=<float> | sparse:T=<int>[,mag=<float>]")
    p.add_argument("--N", type=int, default=None, help="signal length (default 2n)")
    p.set_defaults(func=_cmd_attack)

    p = sub.add_parser(
        "trace",
        parents=[common],
        help="recover the coalition from a syndrome",
        description="Exhaustive decoding over all coalitions of size <= t: euclidean picks "
        "the nearest averaged signature, hamming the one agreeing on most coordinates.",
    )
    p.add_argument("--code", required=True)
    p.add_argument("--syndrome", required=True, help="syndrome JSON file")
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--metric", choices=["hamming", "euclidean"], default="hamming")
    p.add_argument("--match-tol", type=float, default=None)
    p.set_defaults(func=_cmd_trace)

    est = sub.add_parser("estimate", help="probability and rate computations")
    esub = est.add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = esub.add_parser(
        "bad-row",
        parents=[common],
        help="probability that a random row is bad",
        description="A row is bad for coalitions I1, I2 (|I1|=q >= |I2|=r, |I1 & I2|=k) when "
        "both see the same fraction of ones. Exact value and/or Monte Carlo estimate; "
        "--max-q tabulates every admissible triple.",
    )
    p.add_argument("--q", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--k", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="print the exact rational")
    p.add_argument("--trials", type=int, default=0, help="Monte Carlo trials (0 = none)")
    p.add_argument("--max-q", type=int, default=None, help="tabulate all triples with q <= max-q")
    p.set_defaults(func=_cmd_bad_row)
    p = esub.add_parser(
        "rate",
        parents=[common],
        help="achievable rate bound R_hat",
        description="R_hat = min over q in [1,t] of -(log2 p(q) + h(tau) + tau log2((1-p)/p)) / (2q), "
        "the rate below which random codes are Hamming (t, floor(tau n)) codes w.h.p.",
    )
    p.add_argument("--t", type=int, required=True, nargs="+")
    p.add_argument("--tau", type=float, required=True, nargs="+")
    p.add_argument("--model", choices=[estimate.CONSERVATIVE, estimate.ASYMPTOTIC, estimate.EMPIRICAL], default=estimate.CONSERVATIVE)
    p.set_defaults(func=_cmd_rate)
    p = esub.add_parser(
        "expectation",
        parents=[common],
        help="log2 bound on the expected number of bad coalition pairs",
        description="log2 of sum_q q M^(2q) T C(n,T) (1-p)^T p^(n-T), T = floor(tau n).",
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--tau", type=float, required=True)
    p.add_argument("--model", choices=[estimate.CONSERVATIVE, estimate.ASYMPTOTIC, estimate.EMPIRICAL], default=estimate.CONSERVATIVE)
    p.set_defaults(func=_cmd_expectation)

    p = sub.add_parser(
        "search",
        parents=[common],
        help="rejection-sample a Hamming (t,T) code",
        description="Draw random codes with seeds seed^0, seed^1, ... until one passes the "
        "Hamming (t, T) light complete traceability check.",
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--T", type=int, required=True)
    p.add_argument("--attempts", type=int, default=1000)
    p.set_defaults(func=_cmd_search)

    p = sub.add_parser(
        "convert",
        parents=[common],
        help="convert between Hamming and Euclidean noise budgets",
        description="--T gives delta^2 = 2T/(2t(t-1))^2 (a Hamming (t,T) code is a Euclidean "
        "(t,delta) code); --delta-sq gives T = floor(2 delta^2) (the converse).",
    )
    p.add_argument("--t", type=int, default=None)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--T", type=int)
    g.add_argument("--delta-sq", type=_rational)
    p.set_defaults(func=_cmd_convert)
    return parser


def _emit(args, text):
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _threads(args):
    return args.threads if args.threads > 0 else None


def _cmd_gen_random(args):
    code = construct.random_code(args.n, args.cols, args.seed)
    _emit(args, core.format_code(code))
    return EXIT_OK


def _cmd_gen_bch(args):
    code = construct.bch_parity_matrix(args.m, args.t, args.poly)
    _emit(args, core.format_code(code))
    return EXIT_OK


def _cmd_verify(args):
    code = core.load_code(args.code)
    if args.mode == "hamming":
        report = verify.is_hamming_ltc(code, args.t, args.T, n_jobs=_threads(args))
    elif args.mode == "euclidean":
        report = verify.is_euclidean_ltc(code, args.t, args.delta_sq, n_jobs=_threads(args))
    else:
        report = verify.check_2t_independence(code, args.t)
    _emit(args, report.to_json())
    return EXIT_OK if report.holds else EXIT_NEGATIVE


def _cmd_attack(args):
    code = core.load_code(args.code)
    N = args.N if args.N is not None else 2 * code.n
    carriers = attack.make_carriers(code.n, N, derive_seed(args.seed, 0))
    host = attack.make_host(N, code.n, derive_seed(args.seed, 1))
    noise = attack.NoiseSpec.parse(args.noise, seed=derive_seed(args.seed, 2))
    y = attack.forge(code, args.coalition, host, carriers, noise)
    _emit(args, attack.extract_syndrome(y, host, carriers).to_json())
    return EXIT_OK


def _cmd_trace(args):
    code = core.load_code(args.code)
    s = attack.Syndrome.from_json(Path(args.syndrome).read_text())
    if args.metric == "euclidean":
        result = trace.trace_euclidean(code, s, args.t)
    else:
        result = trace.trace_hamming(code, s, args.t, args.match_tol)
    _emit(args, result.to_json())
    return EXIT_NEGATIVE if result.ambiguous else EXIT_OK


def _cmd_bad_row(args):
    if args.max_q is not None:
        rows = estimate.bad_row_table(args.max_q, args.trials, args.seed)
        if args.json:
            _emit(args, json.dumps([
                {"q": q, "r": r, "k": k, "exact": core.format_rational(e), "mc_freq": f, "mc_stderr": s, "trials": args.trials}
                for q, r, k, e, f, s in rows
            ]))
        else:
            _emit(args, estimate.bad_row_csv(rows, args.trials))
        return EXIT_OK
    if args.q is None or args.r is None:
        raise UsageError("estimate bad-row: --q and --r are required unless --max-q is given")
    exact = estimate.exact_bad_row_prob(args.q, args.r, args.k)
    freq = err = None
    if args.trials:
        freq, err = estimate.mc_bad_row_prob(args.q, args.r, args.k, args.trials, args.seed)
    if args.csv:
        _emit(args, estimate.bad_row_csv([(args.q, args.r, args.k, exact, freq, err)], args.trials))
    elif args.json:
        _emit(args, json.dumps({
            "q": args.q, "r": args.r, "k": args.k, "exact": core.format_rational(exact),
            "mc_freq": freq, "mc_stderr": err, "trials": args.trials,
        }))
    else:
        lines = []
        if args.exact or not args.trials:
            lines.append(core.format_rational(exact))
        if args.trials:
            lines.append(f"mc_freq = {freq!r} +/- {err!r} ({args.trials} trials)")
        _emit(args, "\n".join(lines))
    return EXIT_OK


def _cmd_rate(args):
    ests = [estimate.rate_lower_bound(t, tau, args.model) for t in args.t for tau in args.tau]
    if args.csv:
        _emit(args, estimate.rate_csv(ests))
    elif args.json:
        _emit(args, json.dumps([
            {"t": e.t, "tau": e.tau, "model": e.model.kind, "r_hat": e.r_hat, "argmin_q": e.argmin_q}
            for e in ests
        ]))
    else:
        _emit(args, "\n".join(
            f"t={e.t} tau={e.tau!r} model={e.model.kind}: r_hat = {e.r_hat!r} (argmin_q = {e.argmin_q})"
            for e in ests
        ))
    return EXIT_OK


def _cmd_expectation(args):
    value = estimate.expected_bad_pairs_log2(args.n, args.cols, args.t, args.tau, args.model)
    if args.json:
        _emit(args, json.dumps({"n": args.n, "M": args.cols, "t": args.t, "tau": args.tau,
                                "model": args.model, "log2_expected_bad_pairs": value}))
    else:
        _emit(args, f"log2_expected_bad_pairs = {value!r}")
    return EXIT_OK


def _cmd_search(args):
    found = estimate.find_code(args.n, args.cols, args.t, args.T, args.attempts, args.seed,
                               n_jobs=_threads(args))
    if found is None:
        print(f"fptrace search: no Hamming ({args.t},{args.T}) code in {args.attempts} attempts",
              file=sys.stderr)
        return EXIT_NEGATIVE
    code, used = found
    print(f"fptrace search: found after {used} attempt(s)", file=sys.stderr)
    _emit(args, core.format_code(code))
    return EXIT_OK


def _cmd_convert(args):
    if args.T is not None:
        if args.t is None:
            raise UsageError("convert: --t is required with --T")
        res = construct.delta_from_T(args.t, args.T)
        if args.json:
            _emit(args, json.dumps({"t": res.t, "T": res.T, "delta_sq": core.format_rational(res.delta_sq)}))
        else:
            _emit(args, f"delta_sq = {res.delta_sq}")
    else:
        T = construct.T_from_delta(args.delta_sq)
        if args.json:
            _emit(args, json.dumps({"delta_sq": core.format_rational(args.delta_sq), "T": T}))
        else:
            _emit(args, f"T = {T}")
    return EXIT_OK


def run(argv=None):
    """Parse ``argv`` and dispatch; returns the exit status."""
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code or 0
    if args.config_out:
        Path(args.config_out).write_text(RunConfig.from_namespace(argv, args).to_json() + "\n")
    try:
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
    except (ValueError, IndexError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"fptrace {args.command}: error: {exc}", file=sys.stderr)
    return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
