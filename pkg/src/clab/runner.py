"""Experiment configuration, dispatch, and result emission.

Five experiment families share one config shape:

    {"experiment": <name>, "seed": <uint64>, "hbar": <float>, "params": {...}}

Unknown keys are rejected at every level and all validation failures name
the offending field path. A run is a pure function of (config, seed): the
emitted JSON payload is byte-identical across repeats except for the
wall-clock field.
"""
from __future__ import annotations

import csv
import dataclasses
import json
import math
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .decoherence import decohered_probability
from .montecarlo import derive_seed
from .qcore import PhysicalConstants
from .reduction import (
    AdiabaticSchedule,
    SpectralDecisionInstance,
    adiabatic_run,
    bitstring_satisfies,
    brute_force_exact_cover,
    build_begin_hamiltonian,
    build_cost_hamiltonian,
    ground_energy,
    load_instance,
    most_probable_bitstring,
    recommended_steps,
    reduce_energy_decision,
)
from .stochastic import (
    SAMPLING_MODES,
    StochasticInteraction,
    analytic_mean_probability,
    mc_probability,
    phase_span,
)
from .svgplot import Series, line_chart

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "NumericalFailure",
    "ResultRecord",
    "validate_config",
    "run",
    "emit",
    "record_to_json",
    "record_from_json",
]

EXPERIMENTS = ("decohere", "stochastic", "compare", "adiabatic", "spectral")

EMIT_FORMATS = ("json", "csv", "svg")


class ConfigError(ValueError):
    """Invalid configuration; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class NumericalFailure(RuntimeError):
    """A run produced non-finite or otherwise unusable numbers."""


@dataclass
class ResultRecord:
    """Everything one run produced, plus the config that produced it."""

    experiment: str
    config: dict
    outputs: dict
    warnings: list = field(default_factory=list)
    wall_clock_s: float = 0.0
    version: str = __version__


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _reject_unknown(mapping: dict, allowed, path: str) -> None:
    extra = sorted(set(mapping) - set(allowed))
    if extra:
        raise ConfigError(f"{path}.{extra[0]}", f"unknown key (allowed: {sorted(allowed)})")


def _as_int(value, path: str, minimum: int | None = None, maximum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        raise ConfigError(path, f"must be <= {maximum}, got {value}")
    return value


def _as_float(value, path: str, minimum: float | None = None, strict_positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    out = float(value)
    if not math.isfinite(out):
        raise ConfigError(path, f"must be finite, got {out}")
    if strict_positive and out <= 0:
        raise ConfigError(path, f"must be > 0, got {out}")
    if minimum is not None and out < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {out}")
    return out


def _as_float_list(value, path: str, minimum: float | None = None, strict_positive: bool = False) -> list[float]:
    items = value if isinstance(value, list) else [value]
    if not items:
        raise ConfigError(path, "list must not be empty")
    return [
        _as_float(item, f"{path}[{pos}]" if isinstance(value, list) else path, minimum, strict_positive)
        for pos, item in enumerate(items)
    ]


def _validate_decohere(params: dict) -> dict:
    _reject_unknown(params, {"K", "energy_scale", "tau", "trials"}, "params")
    for key in ("K", "energy_scale", "tau", "trials"):
        if key not in params:
            raise ConfigError(f"params.{key}", "missing required key")
    return {
        "K": _as_int(params["K"], "params.K", minimum=1),
        "energy_scale": _as_float(params["energy_scale"], "params.energy_scale", strict_positive=True),
        "tau": _as_float_list(params["tau"], "params.tau", minimum=0.0),
        "trials": _as_int(params["trials"], "params.trials", minimum=1),
    }


def _validate_stochastic(params: dict) -> dict:
    _reject_unknown(params, {"A_tilde", "B_tilde", "mode", "tau", "n"}, "params")
    for key in ("A_tilde", "B_tilde", "tau", "n"):
        if key not in params:
            raise ConfigError(f"params.{key}", "missing required key")
    mode = params.get("mode", "uniform_argument")
    if mode not in SAMPLING_MODES:
        raise ConfigError("params.mode", f"must be one of {list(SAMPLING_MODES)}, got {mode!r}")
    return {
        "A_tilde": _as_float(params["A_tilde"], "params.A_tilde", minimum=0.0),
        "B_tilde": _as_float(params["B_tilde"], "params.B_tilde", minimum=0.0),
        "mode": mode,
        "tau": _as_float_list(params["tau"], "params.tau", minimum=0.0),
        "n": _as_int(params["n"], "params.n", minimum=2),
    }


def _validate_compare(params: dict) -> dict:
    _reject_unknown(params, {"K", "energy_scale", "tau", "trials", "n"}, "params")
    for key in ("K", "energy_scale", "tau", "trials", "n"):
        if key not in params:
            raise ConfigError(f"params.{key}", "missing required key")
    return {
        "K": _as_int(params["K"], "params.K", minimum=1),
        "energy_scale": _as_float_list(params["energy_scale"], "params.energy_scale", strict_positive=True),
        "tau": _as_float(params["tau"], "params.tau", minimum=0.0),
        "trials": _as_int(params["trials"], "params.trials", minimum=1),
        "n": _as_int(params["n"], "params.n", minimum=2),
    }


def _validate_adiabatic(params: dict) -> dict:
    _reject_unknown(params, {"instance_path", "schedule"}, "params")
    for key in ("instance_path", "schedule"):
        if key not in params:
            raise ConfigError(f"params.{key}", "missing required key")
    if not isinstance(params["instance_path"], str):
        raise ConfigError("params.instance_path", f"expected a path string, got {params['instance_path']!r}")
    schedule = params["schedule"]
    if not isinstance(schedule, dict):
        raise ConfigError("params.schedule", "expected an object with T_min/doublings/target")
    _reject_unknown(schedule, {"T_min", "doublings", "target"}, "params.schedule")
    if "T_min" not in schedule:
        raise ConfigError("params.schedule.T_min", "missing required key")
    return {
        "instance_path": params["instance_path"],
        "schedule": {
            "T_min": _as_float(schedule["T_min"], "params.schedule.T_min", strict_positive=True),
            "doublings": _as_int(schedule.get("doublings", 6), "params.schedule.doublings", minimum=0, maximum=16),
            "target": _as_float(schedule.get("target", 0.9), "params.schedule.target", minimum=0.0),
        },
    }


def _validate_spectral(params: dict) -> dict:
    _reject_unknown(params, {"grid", "E_B"}, "params")
    for key in ("grid", "E_B"):
        if key not in params:
            raise ConfigError(f"params.{key}", "missing required key")
    grid = params["grid"]
    if not isinstance(grid, dict):
        raise ConfigError("params.grid", "expected an object")
    _reject_unknown(grid, {"grid_points", "box_length", "mass", "potential"}, "params.grid")
    for key in ("grid_points", "box_length", "mass", "potential"):
        if key not in grid:
            raise ConfigError(f"params.grid.{key}", "missing required key")
    potential = grid["potential"]
    if not isinstance(potential, dict) or "kind" not in potential:
        raise ConfigError("params.grid.potential", "expected an object with a 'kind' key")
    kind = potential["kind"]
    if kind == "zero":
        _reject_unknown(potential, {"kind"}, "params.grid.potential")
        pot = {"kind": "zero"}
    elif kind == "harmonic":
        _reject_unknown(potential, {"kind", "omega"}, "params.grid.potential")
        if "omega" not in potential:
            raise ConfigError("params.grid.potential.omega", "missing required key")
        pot = {"kind": "harmonic", "omega": _as_float(potential["omega"], "params.grid.potential.omega", strict_positive=True)}
    elif kind == "values":
        _reject_unknown(potential, {"kind", "values"}, "params.grid.potential")
        if "values" not in potential or not isinstance(potential["values"], list):
            raise ConfigError("params.grid.potential.values", "missing or not a list")
        pot = {
            "kind": "values",
            "values": [_as_float(v, f"params.grid.potential.values[{i}]") for i, v in enumerate(potential["values"])],
        }
    else:
        raise ConfigError("params.grid.potential.kind", f"must be 'zero', 'harmonic', or 'values', got {kind!r}")
    return {
        "grid": {
            "grid_points": _as_int(grid["grid_points"], "params.grid.grid_points", minimum=3, maximum=4096),
            "box_length": _as_float(grid["box_length"], "params.grid.box_length", strict_positive=True),
            "mass": _as_float(grid["mass"], "params.grid.mass", strict_positive=True),
            "potential": pot,
        },
        "E_B": _as_float(params["E_B"], "params.E_B"),
    }


_VALIDATORS = {
    "decohere": _validate_decohere,
    "stochastic": _validate_stochastic,
    "compare": _validate_compare,
    "adiabatic": _validate_adiabatic,
    "spectral": _validate_spectral,
}


def validate_config(raw: dict) -> dict:
    """Normalize a raw config dict, rejecting unknown keys and bad ranges."""
    if not isinstance(raw, dict):
        raise ConfigError("$", f"config must be an object, got {type(raw).__name__}")
    _reject_unknown(raw, {"experiment", "seed", "hbar", "params"}, "$")
    experiment = raw.get("experiment")
    if experiment not in EXPERIMENTS:
        raise ConfigError("experiment", f"must be one of {list(EXPERIMENTS)}, got {experiment!r}")
    seed = raw.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError("seed", f"must be an integer in [0, 2^64), got {seed!r}")
    hbar = _as_float(raw.get("hbar", 1.0), "hbar", strict_positive=True)
    params = raw.get("params")
    if not isinstance(params, dict):
        raise ConfigError("params", "missing or not an object")
    return {
        "experiment": experiment,
        "seed": seed,
        "hbar": hbar,
        "params": _VALIDATORS[experiment](params),
    }


# ---------------------------------------------------------------------------
# Experiment runners
# ---------------------------------------------------------------------------

def _run_decohere(config: dict) -> dict:
    p = config["params"]
    c = PhysicalConstants(hbar=config["hbar"])
    rows = []
    for tau in p["tau"]:
        est = decohered_probability(
            p["K"], p["energy_scale"], tau, c, seed=config["seed"], trials=p["trials"]
        )
        rows.append(
            {
                "tau": tau,
                "spread": p["energy_scale"] * tau / c.hbar,
                "p_mean": est.mean,
                "p_stderr": est.stderr,
            }
        )
    chart = None
    if len(rows) > 1:
        chart = {
            "x": "tau",
            "ys": ["p_mean"],
            "title": "Averaged return probability vs interaction time",
            "xlabel": "tau",
            "ylabel": "probability",
            "logx": all(r["tau"] > 0 for r in rows),
        }
    return {
        "rows": rows,
        "summary": {"K": p["K"], "energy_scale": p["energy_scale"], "trials": p["trials"], "final_p_mean": rows[-1]["p_mean"]},
        "chart": chart,
    }


def _run_stochastic(config: dict) -> dict:
    p = config["params"]
    c = PhysicalConstants(hbar=config["hbar"])
    interaction = StochasticInteraction(a_tilde=p["A_tilde"], b_tilde=p["B_tilde"], mode=p["mode"])
    rows = []
    for tau in p["tau"]:
        est = mc_probability(interaction, tau, c, seed=config["seed"], n=p["n"])
        rows.append(
            {
                "tau": tau,
                "phase_span": phase_span(interaction, tau, c),
                "p_mean": est.mean,
                "p_stderr": est.stderr,
                "p_analytic": analytic_mean_probability(interaction, tau, c),
            }
        )
    chart = None
    if len(rows) > 1:
        chart = {
            "x": "tau",
            "ys": ["p_mean", "p_analytic"],
            "title": "Stochastic return probability vs interaction time",
            "xlabel": "tau",
            "ylabel": "probability",
            "logx": all(r["tau"] > 0 for r in rows),
        }
    return {
        "rows": rows,
        "summary": {"mode": p["mode"], "n": p["n"], "final_p_mean": rows[-1]["p_mean"]},
        "chart": chart,
    }


def _run_compare(config: dict) -> dict:
    """Side-by-side classical limits on matched parameters.

    The detector-averaging route draws branch energies uniform on
    [0, energy_scale], so the energy difference spans energy_scale; the
    stochastic route matches it with A_tilde = B_tilde = energy_scale / 2,
    making both phase arguments range over the same span.
    """
    p = config["params"]
    c = PhysicalConstants(hbar=config["hbar"])
    rows = []
    for energy_scale in p["energy_scale"]:
        interaction = StochasticInteraction(a_tilde=energy_scale / 2.0, b_tilde=energy_scale / 2.0)
        dec = decohered_probability(
            p["K"], energy_scale, p["tau"], c, seed=derive_seed(config["seed"], "decohere"), trials=p["trials"]
        )
        sto = mc_probability(interaction, p["tau"], c, seed=derive_seed(config["seed"], "stochastic"), n=p["n"])
        rows.append(
            {
                "energy_scale": energy_scale,
                "spread": energy_scale * p["tau"] / c.hbar,
                "p_decohered": dec.mean,
                "p_decohered_stderr": dec.stderr,
                "p_stochastic": sto.mean,
                "p_stochastic_stderr": sto.stderr,
                "abs_difference": abs(dec.mean - sto.mean),
            }
        )
    chart = None
    if len(rows) > 1:
        chart = {
            "x": "spread",
            "ys": ["p_decohered", "p_stochastic"],
            "title": "Two classical limits on matched parameters",
            "xlabel": "dimensionless spread",
            "ylabel": "probability",
            "logx": all(r["spread"] > 0 for r in rows),
        }
    last = rows[-1]
    return {
        "rows": rows,
        "summary": {
            "tau": p["tau"],
            "final_abs_difference": last["abs_difference"],
            "final_p_decohered": last["p_decohered"],
            "final_p_stochastic": last["p_stochastic"],
        },
        "chart": chart,
    }


def _run_adiabatic(config: dict) -> dict:
    p = config["params"]
    c = PhysicalConstants(hbar=config["hbar"])
    try:
        inst = load_instance(p["instance_path"])
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError("params.instance_path", f"cannot load instance: {exc}") from exc
    schedule_cfg = p["schedule"]
    h0 = build_begin_hamiltonian(inst)
    hc = build_cost_hamiltonian(inst)
    max_energy = max(h0.max_eigenvalue(), float(hc.energies.max(initial=0)))
    satisfying = brute_force_exact_cover(inst)

    rows = []
    last = None
    total_time = schedule_cfg["T_min"]
    for _ in range(schedule_cfg["doublings"] + 1):
        schedule = AdiabaticSchedule(total_time=total_time, steps=recommended_steps(max_energy, total_time, c))
        last = adiabatic_run(inst, schedule, c)
        rows.append(
            {
                "T": last.total_time,
                "steps": last.steps,
                "success_probability": last.success_probability,
                "norm_drift": last.norm_drift,
            }
        )
        if last.success_probability >= schedule_cfg["target"]:
            break
        total_time *= 2.0
    best_bits = most_probable_bitstring(last.state, inst.n)
    chart = {
        "x": "T",
        "ys": ["success_probability"],
        "title": "Success probability vs total schedule time",
        "xlabel": "T",
        "ylabel": "success probability",
        "logx": True,
    } if len(rows) > 1 else None
    return {
        "rows": rows,
        "summary": {
            "instance_path": p["instance_path"],
            "n": inst.n,
            "clause_count": len(inst.clauses),
            "satisfying_count": len(satisfying),
            "target": schedule_cfg["target"],
            "target_reached": rows[-1]["success_probability"] >= schedule_cfg["target"],
            "most_probable_bitstring": best_bits,
            "most_probable_satisfies": bitstring_satisfies(inst, best_bits),
            "threshold_note": "success target and doubling sweep are implementation choices",
        },
        "chart": chart,
    }


def _build_spectral_instance(grid_cfg: dict, threshold: float) -> SpectralDecisionInstance:
    n = grid_cfg["grid_points"]
    length = grid_cfg["box_length"]
    pot_cfg = grid_cfg["potential"]
    dx = length / (n + 1)
    x = dx * np.arange(1, n + 1)
    if pot_cfg["kind"] == "zero":
        v = np.zeros(n)
    elif pot_cfg["kind"] == "harmonic":
        v = 0.5 * grid_cfg["mass"] * pot_cfg["omega"] ** 2 * (x - length / 2.0) ** 2
    else:
        values = np.asarray(pot_cfg["values"], dtype=np.float64)
        if values.size != n:
            raise ConfigError(
                "params.grid.potential.values", f"need {n} samples for grid_points={n}, got {values.size}"
            )
        v = values
    return SpectralDecisionInstance(
        grid_points=n, box_length=length, mass=grid_cfg["mass"], potential=v, threshold=threshold
    )


def _run_spectral(config: dict) -> dict:
    p = config["params"]
    c = PhysicalConstants(hbar=config["hbar"])
    inst = _build_spectral_instance(p["grid"], p["E_B"])
    h, threshold = reduce_energy_decision(inst, c)
    e_dense = ground_energy(h, method="dense")
    e_inverse = ground_energy(h, method="inverse")
    slack = 1e-9 * max(1.0, abs(threshold))
    decision = bool(e_dense <= threshold + slack)
    rows = [
        {
            "grid_points": p["grid"]["grid_points"],
            "ground_energy_dense": e_dense,
            "ground_energy_inverse": e_inverse,
            "solver_relative_gap": abs(e_dense - e_inverse) / max(1.0, abs(e_dense)),
            "threshold": threshold,
            "decision": decision,
        }
    ]
    return {
        "rows": rows,
        "summary": {
            "ground_energy": e_dense,
            "threshold": threshold,
            "decision": decision,
            "potential_kind": p["grid"]["potential"]["kind"],
        },
        "chart": None,
    }


_RUNNERS = {
    "decohere": _run_decohere,
    "stochastic": _run_stochastic,
    "compare": _run_compare,
    "adiabatic": _run_adiabatic,
    "spectral": _run_spectral,
}


def _check_finite(obj, where: str) -> None:
    if isinstance(obj, dict):
        for key, value in obj.items():
            _check_finite(value, f"{where}.{key}")
    elif isinstance(obj, list):
        for pos, value in enumerate(obj):
            _check_finite(value, f"{where}[{pos}]")
    elif isinstance(obj, float) and not math.isfinite(obj):
        raise NumericalFailure(f"non-finite value at {where}: {obj}")


def run(config: dict) -> ResultRecord:
    """Validate, dispatch, and package one experiment run."""
    normalized = validate_config(config)
    started = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        outputs = _RUNNERS[normalized["experiment"]](normalized)
    _check_finite(outputs, "outputs")
    return ResultRecord(
        experiment=normalized["experiment"],
        config=normalized,
        outputs=outputs,
        warnings=[str(w.message) for w in caught],
        wall_clock_s=time.perf_counter() - started,
        version=__version__,
    )


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def record_to_json(record: ResultRecord) -> str:
    return json.dumps(dataclasses.asdict(record), indent=2, sort_keys=True) + "\n"


def record_from_json(text: str) -> ResultRecord:
    data = json.loads(text)
    return ResultRecord(
        experiment=data["experiment"],
        config=data["config"],
        outputs=data["outputs"],
        warnings=data["warnings"],
        wall_clock_s=data["wall_clock_s"],
        version=data["version"],
    )


def _write_csv(rows: list[dict], path: Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def _write_svg(record: ResultRecord, path: Path) -> None:
    chart = record.outputs["chart"]
    rows = record.outputs["rows"]
    xs = tuple(row[chart["x"]] for row in rows)
    series = [Series(label=y_key, xs=xs, ys=tuple(row[y_key] for row in rows)) for y_key in chart["ys"]]
    path.write_text(
        line_chart(
            series,
            title=chart.get("title", ""),
            xlabel=chart.get("xlabel", chart["x"]),
            ylabel=chart.get("ylabel", ""),
            logx=chart.get("logx", False),
        ),
        encoding="utf-8",
    )


def emit(record: ResultRecord, formats, out_dir) -> list[Path]:
    """Write the record in the requested formats; returns the file paths.

    JSON carries the full record; CSV flattens the per-point rows; SVG is
    only written when the run produced a chart block (sweeps). I/O errors
    propagate with the target path in the message.
    """
    formats = sorted(set(formats))
    unknown = [f for f in formats if f not in EMIT_FORMATS]
    if unknown:
        raise ValueError(f"unknown emit format(s) {unknown}, expected subset of {list(EMIT_FORMATS)}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    base = record.experiment
    written = []
    for fmt in formats:
        path = out_dir / f"{base}_result.{fmt}"
        try:
            if fmt == "json":
                path.write_text(record_to_json(record), encoding="utf-8")
            elif fmt == "csv":
                _write_csv(record.outputs["rows"], path)
            elif fmt == "svg":
                if not record.outputs.get("chart"):
                    continue
                _write_svg(record, path)
        except OSError as exc:
            raise OSError(f"failed to write {path}: {exc}") from exc
        written.append(path)
    return written
