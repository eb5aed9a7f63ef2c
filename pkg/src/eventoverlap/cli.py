"""Command-line interface: ``compute``, ``simulate``, ``validate`` and ``sweep``.

Exit codes: 0 ok, 1 a validation check failed, 2 bad input, 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from typing import Any, Callable

from . import closed_form, monte_carlo, validation
from .discrete_oracle import DegenerateError
from .domain import DomainError, Scenario, ValidationError

log = logging.getLogger("eventoverlap")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_BAD_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _count(text: str) -> int:
    v = float(text)
    if not v.is_integer():
        raise argparse.ArgumentTypeError(f"expected an integer count, got {text!r}")
    return int(v)


_SCENARIO = {
    "T": (float, None, "total time window"),
    "ta": (float, None, "duration of event A"),
    "tb": (float, None, "duration of event B"),
    "na": (_count, None, "occurrences of event A"),
    "nb": (_count, None, "occurrences of event B"),
}
_RATES = {
    "rate-a": (float, None, "occurrence rate of A per time unit"),
    "rate-b": (float, None, "occurrence rate of B per time unit"),
}
_FORMAT = {"format": (str, "json", "output format", ("json", "csv", "plain"))}

# long flag -> (type, default, help[, choices]) per subcommand
OPTIONS: dict[str, dict[str, tuple]] = {
    "compute": {
        **_SCENARIO, **_RATES,
        "method": (str, None, "estimator (default: universal, or rate when rates are given)",
                   ("precise", "approx", "universal", "rate", "all")),
        **_FORMAT,
    },
    "simulate": {
        **_SCENARIO,
        "trials": (int, None, "number of simulated trials"),
        "seed": (int, None, "random seed (required)"),
        "chunk-size": (int, monte_carlo.DEFAULT_CHUNK_SIZE, "trials per independently seeded chunk"),
        "workers": (int, 1, "worker threads; results do not depend on it"),
        **_FORMAT,
    },
    "validate": {
        "grid": (str, "small", "built-in validation set", ("small", "full")),
        "trials": (int, 200_000, "trials per Monte Carlo check"),
        "seed": (int, None, "random seed (required)"),
        "workers": (int, 1, "worker threads for the simulations"),
    },
    "sweep": {
        **_SCENARIO, **_RATES,
        "sweep": (str, None, "parameter to vary", ("T", "ta", "tb", "na", "nb", "rate-a", "rate-b")),
        "from": (float, None, "first value"),
        "to": (float, None, "last value"),
        "steps": (int, None, "number of rows"),
        "method": (str, None, "estimator", ("precise", "approx", "universal", "rate")),
    },
}


def _dest(flag: str) -> str:
    return "start" if flag == "from" else flag.replace("-", "_")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eventoverlap",
        description="Probability that two independent recurring events overlap at least once.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for cmd, opts in OPTIONS.items():
        p = sub.add_parser(cmd)
        p.add_argument("--config", help="file of `key = value` defaults; flags override it")
        for flag, (type_, _default, help_, *choices) in opts.items():
            # defaults are applied after the config file is merged
            p.add_argument(f"--{flag}", dest=_dest(flag), type=type_, default=None,
                           choices=choices[0] if choices else None, help=help_)
    return parser


def read_config(path: str) -> dict[str, str]:
    out: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected `key = value`")
        out[key.strip().lstrip("-")] = value.strip()
    return out


def _merge_defaults(args: argparse.Namespace) -> argparse.Namespace:
    opts = OPTIONS[args.command]
    config = read_config(args.config) if args.config else {}
    unknown = sorted(set(config) - set(opts))
    if unknown:
        raise UsageError(f"unknown config keys for {args.command}: {', '.join(unknown)}")
    for flag, (type_, default, _help, *choices) in opts.items():
        dest = _dest(flag)
        if getattr(args, dest) is not None:
            continue
        if flag in config:
            try:
                value = type_(config[flag])
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(f"config key {flag}: {exc}") from exc
            if choices and value not in choices[0]:
                raise UsageError(f"config key {flag}: {value!r} not in {choices[0]}")
            setattr(args, dest, value)
        else:
            setattr(args, dest, default)
    return args


def _require(args: argparse.Namespace, *flags: str) -> None:
    missing = [f"--{f}" for f in flags if getattr(args, _dest(f)) is None]
    if missing:
        raise UsageError(f"missing required option(s): {' '.join(missing)}")


def _rate_mode(args: argparse.Namespace) -> bool:
    counts = args.na is not None or args.nb is not None
    rates = args.rate_a is not None or args.rate_b is not None
    if counts and rates:
        raise UsageError("give either --na/--nb or --rate-a/--rate-b, not both")
    return rates


def _scenario(args: argparse.Namespace) -> Scenario:
    _require(args, "T", "ta", "tb", "na", "nb")
    return Scenario.from_params(args.T, args.ta, args.tb, args.na, args.nb)


def _result_record(echo: dict[str, Any], r: closed_form.ProbabilityResult) -> dict[str, Any]:
    return {
        **echo,
        "swapped": r.swapped,
        "method": r.method.value.lower(),
        "probability": r.value,
        "raw_probability": r.raw_value,
        "error_bound": r.error_bound,
        "guard": r.guard.value if r.guard else None,
        "clamped": r.clamped,
    }


_COUNT_METHODS: dict[str, Callable[[Scenario], closed_form.ProbabilityResult]] = {
    "precise": closed_form.p_star,
    "approx": closed_form.p_approx,
    "universal": closed_form.p_universal,
}


def _compute_records(args: argparse.Namespace) -> list[dict[str, Any]]:
    if _rate_mode(args):
        _require(args, "T", "ta", "tb", "rate-a", "rate-b")
        if args.method not in (None, "rate", "all"):
            raise UsageError(f"--method {args.method} needs --na/--nb, not rates")
        echo = {"T": args.T, "ta": args.ta, "tb": args.tb, "rate_a": args.rate_a, "rate_b": args.rate_b}
        r = closed_form.p_universal_rate(args.T, args.ta, args.tb, args.rate_a, args.rate_b)
        return [_result_record(echo, r)]

    s = _scenario(args)
    echo = {"T": args.T, "ta": args.ta, "tb": args.tb, "na": args.na, "nb": args.nb}
    method = args.method or "universal"
    if method == "rate":
        raise UsageError("--method rate needs --rate-a/--rate-b")
    if method == "all":
        names = ["approx", "universal"]
        if args.na == 1 and args.nb == 1:
            names.insert(0, "precise")
    else:
        names = [method]
    return [_result_record(echo, _COUNT_METHODS[m](s)) for m in names]


def _fmt_csv_value(v: Any) -> Any:
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    return repr(v) if isinstance(v, float) else v


def emit(records: list[dict[str, Any]], fmt: str, out) -> None:
    if fmt == "json":
        payload = records[0] if len(records) == 1 else records
        out.write(json.dumps(payload, indent=2) + "\n")
    elif fmt == "csv":
        writer = csv.DictWriter(out, fieldnames=list(records[0]), lineterminator="\n")
        writer.writeheader()
        for rec in records:
            writer.writerow({k: _fmt_csv_value(v) for k, v in rec.items()})
    else:
        width = max(len(k) for rec in records for k in rec)
        blocks = []
        for rec in records:
            blocks.append("\n".join(f"{k:<{width}}  {'-' if v is None else v}" for k, v in rec.items()))
        out.write("\n\n".join(blocks) + "\n")


def cmd_compute(args: argparse.Namespace, out) -> int:
    emit(_compute_records(args), args.format, out)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, out) -> int:
    _require(args, "trials", "seed")
    s = _scenario(args)
    report = monte_carlo.estimate(s, args.trials, args.seed, args.chunk_size, args.workers)
    rec = {
        "T": args.T, "ta": args.ta, "tb": args.tb, "na": args.na, "nb": args.nb,
        "swapped": args.ta < args.tb,
        "method": "montecarlo",
        "probability": report.estimate,
        "std_error": report.std_error,
        "ci_low": report.ci_low,
        "ci_high": report.ci_high,
        "ci_method": report.ci_method,
        "trials": report.trials,
        "hits": report.hits,
        "seed": report.seed,
        "chunk_size": report.chunk_size,
        "guard": None,
        "clamped": False,
    }
    emit([rec], args.format, out)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace, out) -> int:
    _require(args, "seed")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    checks = validation.run_validation(args.grid, args.trials, args.seed, args.workers)
    report = validation.report_dict(checks, grid=args.grid, trials=args.trials, seed=args.seed)
    out.write(json.dumps(report, indent=2) + "\n")
    for c in checks:
        if not c.passed:
            print(f"FAILED: {c.name}", file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def sweep_values(start: float, stop: float, steps: int) -> list[float]:
    if steps < 1:
        raise UsageError("--steps must be >= 1")
    if steps == 1:
        return [start]
    return [start + i * (stop - start) / (steps - 1) for i in range(steps - 1)] + [stop]


def cmd_sweep(args: argparse.Namespace, out) -> int:
    _require(args, "sweep", "from", "to", "steps")
    param = args.sweep
    rate_mode = param.startswith("rate") or _rate_mode(args)
    method = args.method or ("rate" if rate_mode else "universal")
    if (method == "rate") != rate_mode:
        raise UsageError(f"--method {method} does not match the given scenario parameters")
    values = sweep_values(args.start, args.to, args.steps)
    if param in ("na", "nb"):
        if any(not float(v).is_integer() for v in values):
            raise UsageError("count sweeps need integer steps between --from and --to")
        values = [int(v) for v in values]

    writer = csv.writer(out, lineterminator="\n")
    writer.writerow([param, "probability", "error_bound"])
    for v in values:
        setattr(args, _dest(param), v)
        if rate_mode:
            _require(args, "T", "ta", "tb", "rate-a", "rate-b")
            r = closed_form.p_universal_rate(args.T, args.ta, args.tb, args.rate_a, args.rate_b)
        else:
            r = _COUNT_METHODS[method](_scenario(args))
        writer.writerow([_fmt_csv_value(v), repr(r.value), _fmt_csv_value(r.error_bound)])
    return EXIT_OK


COMMANDS = {
    "compute": cmd_compute,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
    "sweep": cmd_sweep,
}


def main(argv: list[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    try:
        args = _merge_defaults(args)
        buf = io.StringIO()
        code = COMMANDS[args.command](args, buf)
        out.write(buf.getvalue())
        return code
    except (UsageError, ValidationError, DomainError, DegenerateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
