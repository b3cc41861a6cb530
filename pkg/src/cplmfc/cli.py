"""``cplmfc`` command line: identification, tuned runs and benchmark tables.

Exit codes: 0 ok, 1 usage or parse error, 2 identification failure, 3 instability.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .errors import ConfigError, IdentificationError, InstabilityError, ParameterError
from .loop_harness import compute_metrics, run_cplmfc
from .scenario import load_scenario
from .settle_ident import run_identification
from .tables import TABLES, format_table, run_table, table_csv

EXIT_OK, EXIT_USAGE, EXIT_IDENT, EXIT_UNSTABLE = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parser():
    p = _Parser(prog="cplmfc", description="Adaptive PID tuning by closed-loop model following.")
    p.add_argument("--seed", type=int, default=None, help="seed for optional measurement noise")
    p.add_argument("--per-sample-kp-update", action="store_true",
                   help="apply the Kp update once per sample without the sampling-time factor")
    p.add_argument("--gnuplot-script", action="store_true", help="also write a gnuplot script for the trace")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    pi = sub.add_parser("ident", help="identify settling time and loop delay")
    pi.add_argument("scenario")
    pi.add_argument("--out", default=None)
    pi.add_argument("--tau-c", type=float, default=None, help="controller computation delay, s")
    pi.add_argument("--tau-y", type=float, default=None, help="measurement delay, s")

    pr = sub.add_parser("run", help="run the adaptive tuner on a scenario")
    pr.add_argument("scenario")
    pr.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    pr.add_argument("--out", default=None)

    pt = sub.add_parser("table", help="regenerate a benchmark result grid")
    pt.add_argument("table_id", type=int, choices=sorted(TABLES))
    pt.add_argument("--out", default=None)
    pt.add_argument("--jobs", type=int, default=1)
    return p


def _out_dir(arg, sf=None) -> Path:
    d = arg or (sf.out_dir if sf is not None else None) or os.environ.get("CPLMFC_OUT") or "."
    path = Path(d)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _gnuplot(csv_name: str) -> str:
    return (
        "set datafile separator ','\n"
        "set key autotitle columnhead\n"
        "set xlabel 't [s]'\n"
        f"plot '{csv_name}' using 1:2 with lines, '' using 1:3 with lines, '' using 1:4 with lines dt 2\n"
        "pause -1\n"
    )


def _write_trace(trace, out: Path, prefix: str, gnuplot: bool) -> Path:
    path = out / f"{prefix}_trace.csv"
    with open(path, "w") as fh:
        trace.to_csv(fh)
    if gnuplot:
        (out / f"{prefix}_trace.gp").write_text(_gnuplot(path.name))
    return path


def _global_overrides(args):
    extra = []
    if args.seed is not None:
        extra.append(f"seed={args.seed}")
    if args.per_sample_kp_update:
        extra.append("per_sample=true")
    return extra


def cmd_ident(args) -> int:
    sf = load_scenario(args.scenario)
    scn = sf.scenario
    if scn.ident is None:
        raise ConfigError("scenario has no [ident] section", path=args.scenario)
    cfg = scn.ident
    if args.tau_c is not None:
        cfg = replace(cfg, tau_c=args.tau_c)
    if args.tau_y is not None:
        cfg = replace(cfg, tau_y=args.tau_y)
    out = _out_dir(args.out, sf)
    try:
        res = run_identification(scn.plant.build(scn.tau, scn.u_max), cfg)
    except IdentificationError as ex:
        print(f"identification failed: {ex}", file=sys.stderr)
        return EXIT_IDENT
    path = out / f"{sf.prefix}_ident.csv"
    with open(path, "w") as fh:
        fh.write("t,y,u\n")
        for k, (y, u) in enumerate(zip(res.trace, res.inputs)):
            fh.write(f"{k * res.tau!r},{y!r},{u!r}\n")
    print(f"N_ts={res.N_ts}\nN_tau_l={res.N_tau_l}\nt_s={res.t_s!r}\ntau_l={res.tau_l!r}\n"
          f"oscillatory={res.oscillatory}\ntrace={path}")
    return EXIT_OK


def cmd_run(args) -> int:
    sf = load_scenario(args.scenario, list(args.override) + _global_overrides(args))
    out = _out_dir(args.out, sf)
    code = EXIT_OK
    try:
        trace, metrics = run_cplmfc(sf.scenario)
    except InstabilityError as ex:
        trace, code = ex.trace, EXIT_UNSTABLE
        metrics = compute_metrics(trace) if trace is not None and len(trace) else None
        print(f"unstable: {ex}", file=sys.stderr)
    except IdentificationError as ex:
        print(f"identification failed: {ex}", file=sys.stderr)
        return EXIT_IDENT
    path = _write_trace(trace, out, sf.prefix, args.gnuplot_script)
    lines = [f"trace={path}", f"kp={trace.gains.kp!r}", f"ki={trace.gains.ki!r}", f"kd={trace.gains.kd!r}",
             f"k_plim={trace.k_plim!r}"]
    if trace.ident is not None:
        lines += [f"t_s={trace.ident.t_s!r}", f"tau_l={trace.ident.tau_l!r}"]
    if metrics is not None:
        lines.append(metrics.summary())
    text = "\n".join(lines)
    (out / f"{sf.prefix}_metrics.txt").write_text(text + "\n")
    print(text)
    return code


def cmd_table(args) -> int:
    results = run_table(args.table_id, jobs=args.jobs, extra_overrides=_global_overrides(args))
    out = _out_dir(args.out)
    (out / f"table{args.table_id}.csv").write_text(table_csv(args.table_id, results))
    print(format_table(args.table_id, results))
    return EXIT_OK


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    handler = {"ident": cmd_ident, "run": cmd_run, "table": cmd_table}[args.cmd]
    try:
        return handler(args)
    except (ConfigError, ParameterError) as ex:
        print(f"error: {ex}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
