"""Benchmark result grids for the third-order lag and the linear motor.

Every row is a shipped scenario plus overrides. Adaptive rows run the tuner;
comparison rows replay fixed published gains on the same loop.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

from .critic_pid import CriticWeights, PidGains
from .errors import CplmfcError, InstabilityError
from .loop_harness import run_cplmfc, run_fixed
from .scenario import parse_scenario


@dataclass(frozen=True)
class Row:
    label: str
    base: str
    overrides: tuple = ()
    fixed: tuple | None = None
    # reference values, keyed like the result columns
    reference: dict = field(default_factory=dict)


def _tiers(li, ld):
    return (f"lambda_i={li}", f"lambda_d={ld}")


def _bench(label, base, alpha, li, ld, ref):
    return Row(label, base, (f"alpha={alpha}",) + _tiers(li, ld), None, ref)


def _ref2(j, ts, ymax, kp, ki, kd):
    return dict(J_iae=j, t_settle=ts, y_peak=ymax, kp=kp, ki=ki, kd=kd)


TABLE2 = (
    Row("CC-IAE (load)", "benchmark3rd_disturbance.cfg", (), (3.81, 3.33, 4.25), _ref2(0.529, 10.77, 0.17, 3.81, 3.33, 4.25)),
    _bench("CPLMFC a=2 (load)", "benchmark3rd_disturbance.cfg", 2, 0.6, 0.25, _ref2(3.127, 15.16, 0.51, 0.75, 0.53, 2.13)),
    _bench("CPLMFC a=16 (load)", "benchmark3rd_disturbance.cfg", 16, 0.6, 0.25, _ref2(0.383, 6.19, 0.14, 6.22, 4.37, 17.67)),
    _bench("CPLMFC a=16 li=.25 (load)", "benchmark3rd_disturbance.cfg", 16, 0.25, 0.25, _ref2(0.886, 16.48, 0.15, 6.22, 4.37, 17.67)),
    Row("JJST (step)", "benchmark3rd_step.cfg", (), (10.0, 2.70, 9.26), _ref2(1.519, 11.94, 1.14, 10, 2.70, 9.26)),
    _bench("CPLMFC a=2 (step)", "benchmark3rd_step.cfg", 2, 0.6, 0.25, _ref2(3.12, 12.39, 1.02, 0.8, 0.56, 2.27)),
    _bench("CPLMFC a=16 (step)", "benchmark3rd_step.cfg", 16, 0.6, 0.25, _ref2(1.344, 9.26, 1.18, 6.26, 4.41, 17.8)),
    _bench("CPLMFC a=16 li=.25 (step)", "benchmark3rd_step.cfg", 16, 0.25, 0.25, _ref2(1.269, 10.35, 1.05, 6.26, 4.41, 17.8)),
    Row("JJST (step+load)", "benchmark3rd_step_disturbance.cfg", (), (10.0, 2.70, 9.26), _ref2(1.773, 12.49, 1.2, 10, 2.70, 9.26)),
    _bench("CPLMFC a=2 (step+load)", "benchmark3rd_step_disturbance.cfg", 2, 0.6, 0.25, _ref2(2.116, 15.39, 1.21, 0.78, 0.55, 2.22)),
    _bench("CPLMFC a=16 (step+load)", "benchmark3rd_step_disturbance.cfg", 16, 0.6, 0.25, _ref2(1.160, 9.27, 1.21, 6.24, 4.39, 17.74)),
    _bench("CPLMFC a=16 li=.25 (step+load)", "benchmark3rd_step_disturbance.cfg", 16, 0.25, 0.25, _ref2(1.338, 18.15, 1.13, 6.24, 4.39, 17.74)),
)


def _pmlm(case, m, b_damp, delay, alpha, li, ld, j, js):
    ov = (f"m={m}", f"b_damp={b_damp}", f"plant.tau_l={delay * 0.001!r}", f"alpha={alpha}") + _tiers(li, ld)
    label = f"case {case} m={m} b={b_damp} tl={delay}T"
    return Row(label, "pmlm_case1.cfg", ov, None, dict(J_iae=j, J_ise=js))


TABLE3 = (
    _pmlm(1, 5.4, 35.1, 0, 500, 0.5, 0.01, 0.68, 0.06),
    _pmlm(1, 1, 35.1, 0, 500, 0.5, 0.01, 0.65, 0.05),
    _pmlm(1, 5.4, 35.1, 10, 500, 0.5, 0.01, 1.12, 0.16),
    _pmlm(1, 1, 35.1, 10, 500, 0.5, 0.01, 1.09, 0.15),
    _pmlm(2, 5.4, 0, 10, 250, 0.8, 0.1, 1.02, 0.13),
    _pmlm(2, 1, 0, 10, 250, 0.8, 0.1, 0.94, 0.11),
    _pmlm(3, 5.4, -35.1, 0, 500, 0.8, 0.1, 0.49, 0.03),
    _pmlm(3, 5.4, -35.1, 10, 500, 0.8, 0.1, 0.52, 0.04),
)

TABLES = {2: TABLE2, 3: TABLE3}
COLUMNS = {
    2: ("J_iae", "t_settle", "y_peak", "kp", "ki", "kd", "lambda_i", "lambda_d"),
    3: ("J_iae", "J_ise", "alpha", "lambda_i", "lambda_d"),
}


def shipped_text(name: str) -> str:
    return resources.files("cplmfc").joinpath("scenarios", name).read_text()


def run_row(row: Row, extra_overrides=()) -> dict:
    """Run one row; returns its result columns plus ``status``."""
    sf = parse_scenario(shipped_text(row.base), row.base, row.overrides + tuple(extra_overrides))
    scn = sf.scenario
    out = dict(label=row.label, status="ok", alpha=scn.alpha)
    try:
        if row.fixed is not None:
            gains = PidGains(*row.fixed, b=scn.b, c=scn.c)
            trace, m = run_fixed(scn, gains, CriticWeights())
        else:
            trace, m = run_cplmfc(scn)
    except InstabilityError as ex:
        out["status"] = "UNSTABLE"
        trace, m = ex.trace, None
    except CplmfcError as ex:
        out["status"] = f"FAILED: {ex}"
        return out
    w = trace.weights
    out.update(lambda_i=w.lambda_i, lambda_d=w.lambda_d, kp=trace.gains.kp, ki=trace.gains.ki, kd=trace.gains.kd)
    if m is not None:
        out.update(J_iae=m.J_iae, J_ise=m.J_ise, t_settle=m.t_settle, y_peak=m.y_peak, overshoot=m.overshoot)
    return out


def _run_one(args):
    return run_row(*args)


def run_table(table_id: int, jobs: int = 1, extra_overrides=()) -> list[dict]:
    rows = TABLES[table_id]
    work = [(r, tuple(extra_overrides)) for r in rows]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_run_one, work))
    return [_run_one(w) for w in work]


def _cell(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return "inf" if math.isinf(v) else f"{v:.4g}"
    return str(v)


def format_table(table_id: int, results: list[dict]) -> str:
    cols = COLUMNS[table_id]
    rows = TABLES[table_id]
    head = ["row", "status"] + list(cols) + [f"ref_{c}" for c in rows[0].reference]
    lines = [head]
    for row, res in zip(rows, results):
        vals = [res["label"], res["status"]] + [_cell(res.get(c)) for c in cols]
        vals += [_cell(row.reference.get(c)) for c in rows[0].reference]
        lines.append(vals)
    widths = [max(len(str(r[i])) for r in lines) for i in range(len(head))]
    return "\n".join("  ".join(str(v).ljust(w) for v, w in zip(r, widths)).rstrip() for r in lines)


def table_csv(table_id: int, results: list[dict]) -> str:
    cols = COLUMNS[table_id]
    rows = TABLES[table_id]
    refs = list(rows[0].reference)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["row", "status", *cols, *[f"ref_{c}" for c in refs]])
    for row, res in zip(rows, results):
        wr.writerow([res["label"], res["status"], *[res.get(c, "") for c in cols],
                     *[row.reference.get(c, "") for c in refs]])
    return buf.getvalue()
