"""Command-line interface: one JSON config in, deterministic JSON/CSV reports out.

Subcommands: certify, lambda1, hellinger, evidence, near-isometry, replay,
witness.  Every run echoes its config, seed, grid size, and tolerances into
the report, and identical (config, seed) pairs produce byte-identical report
files.  Exit codes: 0 success, 2 input error, 3 numeric error, 4 policy error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import jsonschema

from . import __version__
from .certify import (
    certify_generator_derivative,
    certify_hellinger,
    near_isometry_check,
    properness_evidence,
    replay_chain,
)
from .circle import ActionSpec, DEFAULT_GRID, diffeo_from_config, rotation_action, sine_action
from .errors import AmencertError, InputError, NumericError, PolicyError
from .groups import GroupSpec, ball, identity, word_from_string
from .measures import (
    GridMeasure,
    affinity,
    avg_hellinger_sq,
    avg_hellinger_sq_pushforward,
    hellinger,
    l1_distance,
    measure_from_config,
)
from .modules import (
    ModuleVector,
    build_ball_witness,
    build_folner_witness,
    constant_witness,
    support_overlap_radius,
    verify_witness,
)
from .spectral import (
    Lambda1Kind,
    Lambda1Value,
    lambda1_dirichlet,
    lambda1_exact,
)

COMMANDS = ("certify", "lambda1", "hellinger", "evidence", "near-isometry", "replay", "witness")

_DIFFEO_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["rotation", "sine", "samples"]},
        "theta": {"type": "number"},
        "a": {"type": "number"},
        "lift": {"type": "array", "items": {"type": "number"}},
        "deriv": {"type": "array", "items": {"type": "number"}},
    },
    "required": ["kind"],
}

_ACTION_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["rotations", "sine", "conjugated_rotations", "assignment"]},
        "thetas": {"type": "array", "items": {"type": "number"}},
        "a": {"type": "number"},
        "maps": {"type": "object", "additionalProperties": _DIFFEO_SCHEMA},
    },
    "required": ["kind"],
}

CONFIG_SCHEMA = {
    "type": "object",
    "properties": {
        "group": {
            "type": "object",
            "properties": {
                "family": {"enum": ["free", "free_abelian"]},
                "rank": {"type": "integer", "minimum": 1, "maximum": 26},
            },
            "required": ["family", "rank"],
        },
        "grid": {"type": "integer", "minimum": 8},
        "seed": {"type": "integer", "minimum": 0},
        "radius": {"type": "integer", "minimum": 0},
        "action": _ACTION_SCHEMA,
        "comparison": _ACTION_SCHEMA,
        "measure": {"type": "object"},
        "measure2": {"type": "object"},
        "lambda1": {
            "type": "object",
            "properties": {
                "kind": {
                    "enum": ["exact", "certified_lower_bound", "estimate_from_above"]
                },
                "value": {"type": "number"},
                "source": {"type": "string"},
                "radius": {"type": "integer"},
            },
            "required": ["kind"],
        },
        "witness": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["folner", "ball", "delta", "values"]},
                "n": {"type": "integer", "minimum": 1},
                "radius": {"type": "integer", "minimum": 0},
                "entries": {"type": "object"},
            },
            "required": ["kind"],
        },
        "epsilon": {"type": "number", "exclusiveMinimum": 0},
        "arc": {
            "type": "array",
            "items": {"type": "number"},
            "minItems": 2,
            "maxItems": 2,
        },
        "sweep_a": {"type": "array", "items": {"type": "number"}},
        "exact": {"type": "boolean"},
        "emit_values": {"type": "boolean"},
        "tolerances": {
            "type": "object",
            "additionalProperties": {"type": "number", "exclusiveMinimum": 0},
        },
    },
    "required": ["group"],
}

DEFAULT_TOLERANCES = {
    "safety_slack_floor": 1e-6,
    "eig_residual": 1e-9,
    "eig_maxiter": 10_000.0,
}


@dataclass
class RunConfig:
    """Parsed and validated run configuration."""

    raw: dict
    group: GroupSpec
    grid: int
    seed: int
    tolerances: dict = field(default_factory=dict)

    @property
    def radius(self) -> int | None:
        r = self.raw.get("radius")
        return None if r is None else int(r)


def _json_pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path)


def parse_config(path: str | Path) -> RunConfig:
    """Load and validate a JSON config; schema violations carry a JSON pointer."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read config file {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {path}: {exc}") from exc
    return parse_config_dict(raw)


def parse_config_dict(raw: dict) -> RunConfig:
    try:
        jsonschema.validate(raw, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise InputError(
            f"config schema violation at {_json_pointer(exc.absolute_path)}: {exc.message}"
        ) from exc
    grid = int(raw.get("grid", DEFAULT_GRID))
    if grid & (grid - 1) != 0:
        raise InputError(f"config schema violation at /grid: {grid} is not a power of two")
    tolerances = dict(DEFAULT_TOLERANCES)
    tolerances.update(raw.get("tolerances", {}))
    for name, value in tolerances.items():
        if not value > 0:
            raise InputError(f"config schema violation at /tolerances/{name}: must be positive")
    group = GroupSpec(raw["group"]["family"], int(raw["group"]["rank"]))
    seed = int(raw.get("seed", 0))
    return RunConfig(raw=raw, group=group, grid=grid, seed=seed, tolerances=tolerances)


# ---------------------------------------------------------------------------
# object builders


def _build_action(cfg: RunConfig, key: str = "action") -> ActionSpec:
    spec = cfg.raw.get(key)
    if spec is None:
        raise InputError(f"config schema violation at /{key}: required for this command")
    kind = spec["kind"]
    group, n = cfg.group, cfg.grid
    if kind in ("rotations", "sine", "conjugated_rotations"):
        thetas = spec.get("thetas")
        if thetas is None or len(thetas) != group.rank:
            raise InputError(
                f"config schema violation at /{key}/thetas: need {group.rank} angles"
            )
        if kind == "rotations":
            return rotation_action(group, thetas, n, name=key)
        if kind == "sine":
            return sine_action(group, thetas, float(spec.get("a", 0.0)), n, name=key)
        from .circle import conjugated_rotation_action

        return conjugated_rotation_action(group, thetas, float(spec.get("a", 0.0)), n, name=key)
    maps = spec.get("maps")
    if maps is None:
        raise InputError(f"config schema violation at /{key}/maps: required for assignment actions")
    diffeos = []
    for i in range(1, group.rank + 1):
        sym = group.symbol(i)
        if sym not in maps:
            raise InputError(f"config schema violation at /{key}/maps/{sym}: missing generator")
        diffeos.append(diffeo_from_config(maps[sym], n))
    return ActionSpec(group, diffeos, name=key)


def _build_measure(cfg: RunConfig, key: str = "measure") -> GridMeasure:
    spec = cfg.raw.get(key, {"kind": "lebesgue"})
    return measure_from_config(spec, cfg.grid)


def _build_lambda1(cfg: RunConfig) -> Lambda1Value | None:
    spec = cfg.raw.get("lambda1")
    if spec is None or spec["kind"] == "exact":
        return None  # resolved from the group's closed form downstream
    kind = Lambda1Kind(spec["kind"])
    if "value" not in spec:
        raise InputError("config schema violation at /lambda1/value: required unless kind is exact")
    return Lambda1Value(
        float(spec["value"]), kind, source=spec.get("source"), radius=spec.get("radius")
    )


def _build_witness(cfg: RunConfig) -> ModuleVector:
    spec = cfg.raw.get("witness")
    if spec is None:
        raise InputError("config schema violation at /witness: required for this command")
    kind = spec["kind"]
    if kind == "folner":
        if "n" not in spec:
            raise InputError("config schema violation at /witness/n: required for folner witnesses")
        return build_folner_witness(cfg.group, int(spec["n"]), cfg.grid)
    if kind == "ball":
        return build_ball_witness(cfg.group, int(spec.get("radius", 0)), cfg.grid)
    if kind == "delta":
        return constant_witness(cfg.group, cfg.grid, [identity(cfg.group)])
    entries = {}
    for key, values in spec.get("entries", {}).items():
        arr = np.asarray(values, dtype=float)
        entries[word_from_string(cfg.group, key)] = arr
    if not entries:
        raise InputError("config schema violation at /witness/entries: empty witness")
    return ModuleVector(cfg.group, cfg.grid, entries)


# ---------------------------------------------------------------------------
# command handlers; each returns (report_dict, csv_rows_or_None)


def _cmd_certify(cfg: RunConfig):
    action = _build_action(cfg)
    nu = _build_measure(cfg)
    lam = _build_lambda1(cfg)
    slack = cfg.tolerances.get("safety_slack")
    report = certify_hellinger(action, nu, lam, safety_slack=slack)
    out = report.to_dict()
    if bool(np.all(nu.density == 1.0)):
        cross = certify_generator_derivative(action, nu, lam, safety_slack=slack)
        out["generator_route"] = {
            "avg_h_sq": cross.avg_h_sq,
            "verdict": cross.verdict,
            "agreement": abs(cross.avg_h_sq - report.avg_h_sq),
        }
    rows = None
    sweep = cfg.raw.get("sweep_a")
    if sweep:
        base = cfg.raw.get("action", {})
        if base.get("kind") != "sine":
            raise InputError("config schema violation at /sweep_a: only sine actions can be swept")
        rows = [("a", "avg_h_sq", "margin", "verdict")]
        for a in sweep:
            swept = sine_action(cfg.group, base["thetas"], float(a), cfg.grid)
            rep = certify_hellinger(swept, nu, lam, safety_slack=slack)
            rows.append((a, rep.avg_h_sq, rep.margin, rep.verdict))
        out["sweep_a"] = [float(a) for a in sweep]
    return out, rows


def _cmd_lambda1(cfg: RunConfig):
    exact = bool(cfg.raw.get("exact", False))
    radius = cfg.radius
    if exact or radius is None:
        lam = lambda1_exact(cfg.group)
        return lam.to_dict(), None
    series = []
    for r in range(1, radius + 1):
        series.append(lambda1_dirichlet(cfg.group, r))
    out = series[-1].to_dict()
    out["series"] = [{"radius": lv.radius, "value": lv.value} for lv in series]
    out["exact"] = lambda1_exact(cfg.group).to_dict()
    rows = [("radius", "value")] + [(lv.radius, lv.value) for lv in series]
    return out, rows


def _cmd_hellinger(cfg: RunConfig):
    nu = _build_measure(cfg)
    if "measure2" in cfg.raw:
        mu2 = _build_measure(cfg, "measure2")
        dominating = GridMeasure(np.ones(cfg.grid))
        h = hellinger(nu, mu2, dominating)
        return {
            "hellinger": h,
            "affinity": affinity(nu, mu2, dominating),
            "l1_distance": l1_distance(nu, mu2, dominating),
            "total_variation": 0.5 * l1_distance(nu, mu2, dominating),
        }, None
    action = _build_action(cfg)
    from .circle import act as _act
    from .groups import generators as _gens
    from .measures import pushforward as _push

    per_gen = {}
    for s in _gens(cfg.group):
        snu = _push(nu, _act(action, s))
        per_gen[str(s)] = hellinger(nu, snu, nu) ** 2
    direct = avg_hellinger_sq(action, nu)
    via_push = avg_hellinger_sq_pushforward(action, nu)
    return {
        "avg_h_sq": direct,
        "avg_h_sq_pushforward_route": via_push,
        "route_gap": abs(direct - via_push),
        "per_generator_h_sq": per_gen,
    }, None


def _cmd_evidence(cfg: RunConfig):
    action = _build_action(cfg)
    nu = _build_measure(cfg)
    radius = cfg.radius
    if radius is None:
        raise InputError("config schema violation at /radius: required for evidence runs")
    report = properness_evidence(action, nu, radius)
    rows = [("radius", "inf_integral", "sup_integral")]
    rows += list(zip(report.radii, report.inf_integrals, report.sup_integrals))
    return report.to_dict(), rows


def _cmd_near_isometry(cfg: RunConfig):
    action = _build_action(cfg)
    comparison = _build_action(cfg, "comparison")
    arc = cfg.raw.get("arc")
    if arc is None:
        raise InputError("config schema violation at /arc: required for near-isometry runs")
    radius = cfg.radius
    if radius is None:
        raise InputError("config schema violation at /radius: required for near-isometry runs")
    report = near_isometry_check(action, comparison, (float(arc[0]), float(arc[1])), radius)
    return report.to_dict(), None


def _cmd_replay(cfg: RunConfig):
    action = _build_action(cfg)
    nu = _build_measure(cfg)
    xi = _build_witness(cfg)
    radius = cfg.radius
    if radius is None:
        radius = support_overlap_radius(xi)
    report = replay_chain(xi, action, nu, radius, _build_lambda1(cfg))
    return report.to_dict(), None


def _cmd_witness(cfg: RunConfig):
    action = _build_action(cfg)
    xi = _build_witness(cfg)
    epsilon = float(cfg.raw.get("epsilon", 0.5))
    report = verify_witness(xi, action, epsilon)
    out = report.to_dict()
    out["support_size"] = len(xi.entries)
    out["support_overlap_radius"] = support_overlap_radius(xi)
    if cfg.raw.get("emit_values"):
        out["values"] = {str(w): v.tolist() for w, v in sorted(
            xi.entries.items(), key=lambda kv: (kv[0].length, str(kv[0])))}
    return out, None


_HANDLERS = {
    "certify": _cmd_certify,
    "lambda1": _cmd_lambda1,
    "hellinger": _cmd_hellinger,
    "evidence": _cmd_evidence,
    "near-isometry": _cmd_near_isometry,
    "replay": _cmd_replay,
    "witness": _cmd_witness,
}


def run(cfg: RunConfig, command: str, out_dir: str | Path | None = None) -> dict:
    """Execute one command, write its deterministic report files, return the report."""
    handler = _HANDLERS.get(command)
    if handler is None:
        raise InputError(f"unknown command {command!r}")
    body, rows = handler(cfg)
    report = {
        "command": command,
        "version": __version__,
        "seed": cfg.seed,
        "grid": cfg.grid,
        "tolerances": cfg.tolerances,
        "config": cfg.raw,
        "result": body,
    }
    if out_dir is not None:
        out_path = Path(out_dir)
        out_path.mkdir(parents=True, exist_ok=True)
        stem = command.replace("-", "_")
        (out_path / f"{stem}_report.json").write_bytes(report_bytes(report))
        if rows:
            with open(out_path / f"{stem}_series.csv", "w", newline="") as fh:
                csv.writer(fh).writerows(rows)
    return report


def report_bytes(report: dict) -> bytes:
    """Canonical byte serialization: sorted keys, fixed separators, trailing newline."""
    return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode()


def _lambda1_inline_config(args) -> RunConfig:
    try:
        group = json.loads(args.group)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in --group: {exc}") from exc
    raw = {"group": group}
    if args.radius is not None:
        raw["radius"] = args.radius
    if args.exact:
        raw["exact"] = True
    return parse_config_dict(raw)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="amencert",
        description="Non-amenability certificates and Hilbert-module diagnostics for circle actions",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", help="directory for report/CSV files")
        if name == "lambda1":
            p.add_argument("--group", help="inline group spec, e.g. '{\"family\":\"free\",\"rank\":2}'")
            p.add_argument("--radius", type=int, help="Dirichlet truncation radius")
            p.add_argument("--exact", action="store_true", help="emit the closed-form value only")
    args = parser.parse_args(argv)

    try:
        if args.command == "lambda1" and args.config is None:
            if args.group is None:
                raise InputError("lambda1 needs --config or --group")
            cfg = _lambda1_inline_config(args)
        else:
            if args.config is None:
                raise InputError(f"{args.command} needs --config")
            cfg = parse_config(args.config)
        report = run(cfg, args.command, args.out)
    except PolicyError as exc:
        print(f"policy error: {exc}", file=sys.stderr)
        return 4
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return 3
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except AmencertError as exc:  # base-class fallback: treat as input-level
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(report_bytes(report).decode())
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
