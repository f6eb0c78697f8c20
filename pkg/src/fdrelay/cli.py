"""Command-line harness: gen-config, run, summarize."""

import argparse
import sys

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .config import SystemConfig
from .exceptions import ConfigError, MonotonicityError
from .experiments import (
    SOLVERS,
    SWEEP_VARS,
    ExperimentSpec,
    format_summary,
    run_experiment,
    summarize,
)

_TEMPLATE = """\
# fdrelay experiment configuration

[experiment]
sweep = "snr_db"            # one of: snr_db | n_tr | n_sd | n_all
values = [0, 5, 10, 15, 20, 25]
trials = 100
solvers = ["gradient", "tzf", "rzf", "global2x2", "hd_half", "upper_bound"]
master_seed = 12345
output = "results.csv"
workers = 1                 # > 1 runs trials in a process pool

[system]
n_s = 2
n_r = 2
n_t = 2
n_d = 2
d = 1                       # 0 means min(n_s, n_r, n_t, n_d) per sweep point
p_s = 10.0
p_r = 10.0
sigma_r2 = 1.0
sigma_d2 = 1.0
sigma_rr2 = 0.01            # -20 dB residual self-interference
tau = 1
"""

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def load_spec(path: str) -> ExperimentSpec:
    try:
        with open(path, "rb") as f:
            doc = tomllib.load(f)
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"config file is not valid TOML: {e}") from e

    try:
        exp = doc["experiment"]
        sysdoc = dict(doc.get("system", {}))
    except KeyError as e:
        raise ConfigError(f"missing [experiment] table: {e}") from e

    d = int(sysdoc.pop("d", 1))
    auto_streams = d == 0
    try:
        base = SystemConfig(d=1 if auto_streams else d, **sysdoc)
        return ExperimentSpec(
            sweep_var=str(exp["sweep"]),
            values=tuple(exp["values"]),
            trials=int(exp["trials"]),
            solvers=tuple(exp["solvers"]),
            base_config=base,
            master_seed=int(exp["master_seed"]),
            output=str(exp["output"]),
            workers=int(exp.get("workers", 1)),
            auto_streams=auto_streams,
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"bad experiment config: {e}") from e


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="fdrelay",
        description="Monte-Carlo rate experiments for full-duplex MIMO AF relaying",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen-config", help="write a template experiment config")
    p_gen.add_argument("path", help="where to write the TOML template")

    p_run = sub.add_parser("run", help="run an experiment spec")
    p_run.add_argument("config", help="TOML experiment config")

    p_sum = sub.add_parser("summarize", help="aggregate a results CSV")
    p_sum.add_argument("csv", help="results CSV produced by `run`")
    p_sum.add_argument("--out", help="also write the summary as CSV", default=None)

    args = parser.parse_args(argv)
    try:
        if args.command == "gen-config":
            with open(args.path, "w") as f:
                f.write(_TEMPLATE)
            print(f"wrote {args.path}")
        elif args.command == "run":
            spec = load_spec(args.config)
            csv_path, manifest_path = run_experiment(spec)
            print(f"wrote {csv_path} and {manifest_path}")
        elif args.command == "summarize":
            cells = summarize(args.csv)
            print(format_summary(cells))
            if args.out:
                with open(args.out, "w") as f:
                    f.write("sweep_value,solver,n,mean_rate,stderr_rate\n")
                    for c in cells:
                        f.write(
                            f"{c.sweep_value:.10g},{c.solver},{c.n},"
                            f"{c.mean_rate:.10g},{c.stderr_rate:.10g}\n"
                        )
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (MonotonicityError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL if isinstance(e, MonotonicityError) else EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
