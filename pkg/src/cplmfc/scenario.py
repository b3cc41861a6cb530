"""Scenario files: INI-style sections parsed into :class:`Scenario` objects.

Units: seconds for times, plant units for ``u_max``/``y_max``/amplitudes, Hz-like
cycle counts for ``setpoint.freq`` (cycles over the run). Lists are whitespace
separated. Unknown sections or keys are rejected with the offending line.
"""

from __future__ import annotations

import configparser
import math
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

from .errors import ConfigError, CplmfcError
from .loop_harness import Disturbance, PlantSpec, Scenario, Setpoint
from .settle_ident import IdentConfig

# section -> key -> kind; "floats" is a whitespace-separated list
SCHEMA = {
    "plant": {"kind": "str", "num": "floats", "den": "floats", "tau_l": "float", "m": "float",
              "b_damp": "float", "substeps": "int"},
    "loop": {"tau": "float", "u_max": "float", "duration": "float", "noise_std": "float", "seed": "int"},
    "cplmfc": {"alpha": "float", "zeta": "float", "b": "float", "c": "float", "lambda_i": "floats",
               "lambda_d": "floats", "t_s": "float", "tau_l": "float", "times": "str", "per_sample": "bool"},
    "ident": {"enabled": "bool", "y_max": "float", "k": "float", "k_s": "int", "max_samples": "int",
              "t_window": "float", "tau_c": "float", "tau_y": "float", "response_threshold": "float"},
    "setpoint": {"kind": "str", "amplitude": "float", "t0": "float", "freq": "float"},
    "disturbance": {"amplitude": "float", "t0": "float"},
    "output": {"dir": "str", "prefix": "str"},
}
REQUIRED = {"plant": ("kind",), "loop": ("tau", "u_max", "duration")}


@dataclass(frozen=True)
class ScenarioFile:
    scenario: Scenario
    out_dir: str | None = None
    prefix: str = "run"
    path: str | None = field(default=None, compare=False)


def _key_lines(text: str) -> dict:
    """Map ``(section, key)`` to the 1-based line where it is set."""
    lines = {}
    section = None
    for i, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        m = re.match(r"\[([^\]]+)\]", line)
        if m:
            section = m.group(1).strip()
            lines[(section, None)] = i
            continue
        m = re.match(r"([^=:]+)[=:]", line)
        if m and section is not None:
            lines[(section, m.group(1).strip().lower())] = i
    return lines


def _convert(kind, value, where):
    try:
        if kind == "float":
            v = float(value)
            if math.isnan(v):
                raise ValueError
            return v
        if kind == "int":
            return int(value)
        if kind == "floats":
            return tuple(float(v) for v in value.replace(",", " ").split())
        if kind == "bool":
            low = value.strip().lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError
        return value.strip()
    except ValueError:
        raise ConfigError(f"cannot read {value!r} as {kind}", **where) from None


def _read(text: str, path: str | None):
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as ex:
        raise ConfigError(str(ex).splitlines()[0], line=getattr(ex, "lineno", None), path=path) from None
    lines = _key_lines(text)
    data = {}
    for sec in cp.sections():
        if sec not in SCHEMA:
            raise ConfigError(f"unknown section [{sec}]", line=lines.get((sec, None)), path=path)
        data[sec] = {}
        for key, value in cp.items(sec):
            where = dict(line=lines.get((sec, key)), path=path)
            if key not in SCHEMA[sec]:
                raise ConfigError(f"unknown key {key!r} in [{sec}]", **where)
            data[sec][key] = _convert(SCHEMA[sec][key], value, where)
    for sec, keys in REQUIRED.items():
        if sec not in data:
            raise ConfigError(f"missing section [{sec}]", path=path)
        for k in keys:
            if k not in data[sec]:
                raise ConfigError(f"missing key {k!r} in [{sec}]", line=lines.get((sec, None)), path=path)
    return data, lines


def _tiers(v, name, path):
    if len(v) == 1:
        return (v[0], v[0])
    if len(v) != 2:
        raise ConfigError(f"{name} takes one value or a lo/hi pair", path=path)
    return tuple(v)


def build(data: dict, path: str | None = None) -> ScenarioFile:
    """Assemble a :class:`ScenarioFile` from typed section dictionaries."""
    pl, lp = data["plant"], data["loop"]
    cf = data.get("cplmfc", {})
    kw = {}
    try:
        plant = PlantSpec(**pl)
        setpoint = Setpoint(**data.get("setpoint", {}))
        dist = Disturbance(**data.get("disturbance", {}))
        ident = None
        idt = dict(data.get("ident", {}))
        if idt.pop("enabled", bool(idt)):
            y_max = idt.pop("y_max", None)
            if y_max is None:
                raise ConfigError("[ident] needs y_max", path=path)
            ident = IdentConfig(lp["tau"], lp["u_max"], y_max, **idt)
        for key in ("alpha", "zeta", "b", "c", "t_s", "tau_l", "times", "per_sample"):
            if key in cf:
                kw[key] = cf[key]
        if "lambda_i" in cf:
            kw["lambda_i_tiers"] = _tiers(cf["lambda_i"], "lambda_i", path)
        if "lambda_d" in cf:
            kw["lambda_d_tiers"] = _tiers(cf["lambda_d"], "lambda_d", path)
        if ident is not None and "t_s" not in cf:
            kw["t_s"] = None
        scn = Scenario(plant=plant, setpoint=setpoint, disturbance=dist, ident=ident, **lp, **kw)
    except ConfigError:
        raise
    except (CplmfcError, TypeError) as ex:
        raise ConfigError(str(ex), path=path) from None
    out = data.get("output", {})
    return ScenarioFile(scn, out.get("dir"), out.get("prefix", "run"), path)


def apply_overrides(data: dict, overrides, path=None) -> dict:
    """Apply ``key=value`` or ``section.key=value`` strings to parsed section data."""
    data = {s: dict(v) for s, v in data.items()}
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value", path=path)
        key, value = (p.strip() for p in item.split("=", 1))
        if "." in key:
            sec, key = key.split(".", 1)
            if sec not in SCHEMA or key not in SCHEMA[sec]:
                raise ConfigError(f"unknown override key {sec}.{key}", path=path)
        else:
            owners = [s for s in SCHEMA if key in SCHEMA[s]]
            if not owners:
                raise ConfigError(f"unknown override key {key!r}", path=path)
            if len(owners) > 1:
                raise ConfigError(f"override key {key!r} is ambiguous; use one of "
                                  + ", ".join(f"{s}.{key}" for s in owners), path=path)
            sec = owners[0]
        data.setdefault(sec, {})[key] = _convert(SCHEMA[sec][key], value, dict(path=path))
    return data


def parse_scenario(text: str, path: str | None = None, overrides=()) -> ScenarioFile:
    data, _ = _read(text, path)
    if overrides:
        data = apply_overrides(data, overrides, path)
    return build(data, path)


def load_scenario(path, overrides=()) -> ScenarioFile:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as ex:
        raise ConfigError(f"cannot read scenario: {ex.strerror}", path=str(p)) from None
    return parse_scenario(text, str(p), overrides)


def _fmt(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, tuple):
        return " ".join(repr(float(x)) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dump_scenario(sf: ScenarioFile) -> str:
    """Serialize to the file format; ``parse_scenario(dump_scenario(sf))`` reproduces ``sf``."""
    s = sf.scenario
    p = s.plant
    secs = {
        "plant": dict(kind=p.kind, num=p.num, den=p.den, tau_l=p.tau_l, m=p.m, b_damp=p.b_damp,
                      substeps=p.substeps),
        "loop": dict(tau=s.tau, u_max=s.u_max, duration=s.duration, noise_std=s.noise_std, seed=s.seed),
        "cplmfc": dict(alpha=s.alpha, zeta=s.zeta, b=s.b, c=s.c, lambda_i=tuple(s.lambda_i_tiers),
                       lambda_d=tuple(s.lambda_d_tiers), times=s.times, per_sample=s.per_sample),
        "setpoint": dict(kind=s.setpoint.kind, amplitude=s.setpoint.amplitude, t0=s.setpoint.t0,
                         freq=s.setpoint.freq),
        "disturbance": dict(amplitude=s.disturbance.amplitude, t0=s.disturbance.t0),
    }
    if s.t_s is not None:
        secs["cplmfc"]["t_s"] = s.t_s
    if s.tau_l is not None:
        secs["cplmfc"]["tau_l"] = s.tau_l
    if s.ident is not None:
        i = s.ident
        secs["ident"] = dict(enabled=True, y_max=i.y_max, k=i.k, k_s=i.k_s, max_samples=i.max_samples,
                             t_window=i.t_window, tau_c=i.tau_c, tau_y=i.tau_y,
                             response_threshold=i.response_threshold)
    out = {"prefix": sf.prefix}
    if sf.out_dir is not None:
        out["dir"] = sf.out_dir
    secs["output"] = out
    chunks = []
    for name, kv in secs.items():
        chunks.append(f"[{name}]")
        chunks.extend(f"{k} = {_fmt(v)}" for k, v in kv.items())
        chunks.append("")
    return "\n".join(chunks)


def with_overrides(sf: ScenarioFile, **changes) -> ScenarioFile:
    """Library-side counterpart of ``--override`` for top-level scenario fields."""
    return replace(sf, scenario=replace(sf.scenario, **changes))
