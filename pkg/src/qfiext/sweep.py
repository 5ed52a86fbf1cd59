"""Parameter sweeps: grid specification, evaluation, CSV/JSON emission, presets.

A sweep evaluates the channel QFI over a grid of one variable (evaluation
point, evolution time, or an extension parameter) with everything else fixed.
Grid points are independent and may be computed concurrently; rows are always
assembled in grid order, and floats are emitted in shortest round-trip form,
so identical specs produce byte-identical output.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import InvalidSpec, ModelError, QuadratureNotConverged
from .extensions import AddOperator, Flood, Subtract, SubtractPerturbed, apply_extension
from .familyfile import load_definition
from .familyfile import build_family as _build_custom_family
from .linalg import HermitianOperator
from .models import (
    DirectionParams,
    NvParams,
    broken_phase_shift_family,
    direction_family,
    direction_sz_family,
    nv_family,
)
from .qfi import channel_qfi

MODELS = ("nv", "direction", "broken-phase-shift", "custom")
EXTENSION_KINDS = ("flood", "subtract", "subtract-perturbed", "add-operator", "sz")
SCALES = ("linear", "log")
CSV_HEADER = "sweep_value,channel_qfi,upper_bound,ratio,generator_method,estimated_error"

_MODEL_DEFAULTS = {
    "nv": {"Bx": 0.0, "By": 0.0, "Bz": 0.0, "D": None, "E": None, "g": None, "t": 1e-3},
    "direction": {"B": None, "theta": 0.0, "phi": 0.0, "g": None, "t": 1e-2},
    "broken-phase-shift": {"theta": 0.0, "t": 1.0},
    "custom": {"theta": 0.0, "t": 1.0},
}
_SWEEPABLES = {
    "nv": ("B_z", "t", "beta", "epsilon"),
    "direction": ("theta", "t", "beta", "kappa", "epsilon"),
    "broken-phase-shift": ("theta", "t", "beta", "epsilon"),
    "custom": ("theta", "t", "beta", "epsilon"),
}


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    points: int
    scale: str = "linear"

    def values(self) -> list[float]:
        if self.points == 1:
            return [float(self.start)]
        if self.scale == "log":
            return [float(x) for x in np.geomspace(self.start, self.stop, self.points)]
        return [float(x) for x in np.linspace(self.start, self.stop, self.points)]


@dataclass(frozen=True)
class SweepSpec:
    model: str
    sweep_variable: str
    grid: Grid
    fixed_params: dict = field(default_factory=dict)
    extension: Optional[dict] = None
    family_file: Optional[str] = None
    label: str = ""


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float
    channel_qfi: float
    upper_bound: float
    ratio: float
    generator_method: str
    estimated_error: float


@dataclass(frozen=True)
class SweepResult:
    label: str
    rows: tuple[SweepRow, ...]


def validate_spec(spec: SweepSpec) -> None:
    """Raise InvalidSpec (message carries the offending field path) on any problem."""
    if spec.model not in MODELS:
        raise InvalidSpec(f"model: must be one of {', '.join(MODELS)}, got {spec.model!r}")
    grid = spec.grid
    if grid.points < 1:
        raise InvalidSpec(f"grid.points: must be >= 1, got {grid.points}")
    if grid.scale not in SCALES:
        raise InvalidSpec(f"grid.scale: must be 'linear' or 'log', got {grid.scale!r}")
    if not (math.isfinite(grid.start) and math.isfinite(grid.stop)):
        raise InvalidSpec("grid.start/grid.stop: must be finite")
    if grid.points > 1 and not grid.start < grid.stop:
        raise InvalidSpec(f"grid.start: must be < grid.stop, got {grid.start} >= {grid.stop}")
    if grid.scale == "log" and grid.start <= 0:
        raise InvalidSpec(f"grid.start: log scale requires start > 0, got {grid.start}")
    if spec.sweep_variable not in _SWEEPABLES[spec.model]:
        raise InvalidSpec(
            f"sweep_variable: {spec.sweep_variable!r} not valid for model {spec.model!r}; "
            f"expected one of {', '.join(_SWEEPABLES[spec.model])}"
        )
    for key, value in spec.fixed_params.items():
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise InvalidSpec(f"fixed_params.{key}: must be a finite number, got {value!r}")
    if spec.model in ("broken-phase-shift", "custom") and not spec.family_file:
        raise InvalidSpec(f"family_file: required for model {spec.model!r}")
    ext = spec.extension
    if ext is not None:
        kind = ext.get("kind")
        if kind not in EXTENSION_KINDS:
            raise InvalidSpec(
                f"extension.kind: must be one of {', '.join(EXTENSION_KINDS)}, got {kind!r}"
            )
        if kind == "sz" and spec.model != "direction":
            raise InvalidSpec("extension.kind: 'sz' applies to the direction model only")
    if spec.sweep_variable == "beta" and (ext is None or ext.get("kind") != "flood"):
        raise InvalidSpec("sweep_variable: 'beta' requires extension.kind = 'flood'")
    if spec.sweep_variable == "kappa" and (ext is None or ext.get("kind") != "sz"):
        raise InvalidSpec("sweep_variable: 'kappa' requires extension.kind = 'sz'")
    if spec.sweep_variable == "epsilon" and (
        ext is None or ext.get("kind") not in ("subtract-perturbed", "add-operator")
    ):
        raise InvalidSpec(
            "sweep_variable: 'epsilon' requires extension.kind = 'subtract-perturbed' "
            "or 'add-operator'"
        )


def _params(spec: SweepSpec, sweep_value: float) -> dict:
    params = dict(_MODEL_DEFAULTS[spec.model])
    params.update(spec.fixed_params)
    if spec.sweep_variable == "B_z":
        params["Bz"] = sweep_value
    elif spec.sweep_variable in ("theta", "t"):
        params[spec.sweep_variable] = sweep_value
    return params


def load_model_family(model: str, family_file):
    """Family from a definition file, as the given file-backed model.

    The broken-phase-shift model restricts the file to const and linear
    coefficients and assembles theta*G + F with exact derivatives; the
    custom model accepts the full coefficient catalog.
    """
    definition = load_definition(family_file)
    if model == "custom":
        return _build_custom_family(definition)
    g_acc = np.zeros((definition.dim, definition.dim), dtype=complex)
    f_acc = np.zeros_like(g_acc)
    for k, term in enumerate(definition.terms):
        if term.coefficient.kind == "linear":
            g_acc += term.coefficient.scale * term.matrix.matrix
        elif term.coefficient.kind == "const":
            f_acc += term.coefficient.scale * term.matrix.matrix
        else:
            raise InvalidSpec(
                f"family_file: terms[{k}]: model 'broken-phase-shift' allows only "
                f"const and linear coefficients, got {term.coefficient.kind!r}"
            )
    return broken_phase_shift_family(HermitianOperator(g_acc), HermitianOperator(f_acc))


def _build_base(spec: SweepSpec, params: dict):
    """Model family, evaluation point and time for one grid point."""
    if spec.model == "nv":
        kwargs = {k: params[k] for k in ("Bx", "By", "Bz", "D", "E", "g", "t") if params[k] is not None}
        nv = NvParams(**kwargs)
        return nv_family(nv), params["Bz"], params["t"], nv
    if spec.model == "direction":
        if params["B"] is None:
            raise InvalidSpec("fixed_params.B: required for the direction model")
        dp = DirectionParams(
            B=params["B"], theta=params["theta"], phi=params["phi"],
            t=params["t"], **({"g": params["g"]} if params["g"] is not None else {}),
        )
        return direction_family(dp), params["theta"], params["t"], dp
    family = load_model_family(spec.model, spec.family_file)
    return family, params["theta"], params["t"], None


def _extension_spec(spec: SweepSpec, sweep_value: float, model_params):
    ext = dict(spec.extension)
    kind = ext.pop("kind")
    if spec.sweep_variable == "beta":
        ext["beta"] = sweep_value
    elif spec.sweep_variable == "kappa":
        ext["kappa"] = sweep_value
    elif spec.sweep_variable == "epsilon" and kind in ("subtract-perturbed", "add-operator"):
        ext["epsilon"] = sweep_value
    if kind == "flood":
        return Flood(beta=float(ext["beta"]), theta0=float(ext.get("theta0", 0.0)))
    if kind == "subtract":
        return Subtract(theta0=float(ext["theta0"]))
    if kind == "subtract-perturbed":
        return SubtractPerturbed(theta0=float(ext["theta0"]), epsilon=float(ext["epsilon"]))
    if kind == "add-operator":
        op = _load_operator(ext["file"])
        return AddOperator(operator=op, epsilon=float(ext["epsilon"]))
    return ("sz", float(ext["kappa"]), model_params)  # handled in _evaluate_point


def _load_operator(path) -> HermitianOperator:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    re = np.asarray(doc["re"], dtype=float)
    im = np.asarray(doc.get("im", np.zeros_like(re)), dtype=float)
    return HermitianOperator(re + 1j * im)


def _evaluate_point(spec: SweepSpec, sweep_value: float) -> SweepRow:
    params = _params(spec, sweep_value)
    family, theta_eval, t, model_params = _build_base(spec, params)
    if spec.extension is not None:
        ext = _extension_spec(spec, sweep_value, model_params)
        if isinstance(ext, tuple):  # direction-model z-field extension
            family = direction_sz_family(model_params, ext[1])
        else:
            family = apply_extension(family, ext)
    report = channel_qfi(family, theta_eval, t)
    return SweepRow(
        sweep_value,
        report.channel_qfi,
        report.upper_bound,
        report.ratio,
        report.generator_method.value,
        report.estimated_error,
    )


def run_sweep(spec: SweepSpec, jobs: Optional[int] = None) -> SweepResult:
    """Evaluate all grid points (concurrently for jobs > 1), rows in grid order."""
    validate_spec(spec)
    values = spec.grid.values()

    def evaluate(x: float) -> SweepRow:
        try:
            return _evaluate_point(spec, x)
        except (InvalidSpec, QuadratureNotConverged):
            raise
        except Exception as exc:
            raise ModelError(f"at {spec.sweep_variable}={x!r}: {exc}") from exc

    if jobs is not None and jobs > 1 and len(values) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = tuple(pool.map(evaluate, values))
    else:
        rows = tuple(evaluate(x) for x in values)
    return SweepResult(spec.label, rows)


def _fmt(x: float) -> str:
    return repr(float(x))


def rows_to_csv(result: SweepResult) -> str:
    lines = [CSV_HEADER]
    for r in result.rows:
        lines.append(
            ",".join(
                (
                    _fmt(r.sweep_value),
                    _fmt(r.channel_qfi),
                    _fmt(r.upper_bound),
                    _fmt(r.ratio),
                    r.generator_method,
                    _fmt(r.estimated_error),
                )
            )
        )
    return "\n".join(lines) + "\n"


def rows_to_json(result: SweepResult) -> str:
    doc = {
        "label": result.label,
        "rows": [
            {
                "sweep_value": r.sweep_value,
                "channel_qfi": r.channel_qfi,
                "upper_bound": r.upper_bound,
                "ratio": r.ratio,
                "generator_method": r.generator_method,
                "estimated_error": r.estimated_error,
            }
            for r in result.rows
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def spec_from_dict(doc: dict, label: str = "") -> SweepSpec:
    """Build a SweepSpec from a decoded JSON run document."""
    try:
        grid_doc = doc["grid"]
        grid = Grid(
            start=float(grid_doc["start"]),
            stop=float(grid_doc["stop"]),
            points=int(grid_doc["points"]),
            scale=str(grid_doc.get("scale", "linear")),
        )
        spec = SweepSpec(
            model=str(doc["model"]),
            sweep_variable=str(doc["sweep_variable"]),
            grid=grid,
            fixed_params=dict(doc.get("fixed_params", {})),
            extension=doc.get("extension"),
            family_file=doc.get("family_file"),
            label=str(doc.get("label", label)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpec(f"run document: {exc!r}") from exc
    validate_spec(spec)
    return spec


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    runs: tuple[SweepSpec, ...]


def _preset_dir():
    return resources.files("qfiext").joinpath("data/presets")


def preset_names() -> list[str]:
    return sorted(p.name[: -len(".json")] for p in _preset_dir().iterdir() if p.name.endswith(".json"))


def load_preset(name: str) -> Preset:
    path = _preset_dir().joinpath(f"{name}.json")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InvalidSpec(f"preset: unknown preset {name!r}; available: {', '.join(preset_names())}")
    runs = tuple(
        spec_from_dict(run, label=f"run{k}") for k, run in enumerate(doc["runs"])
    )
    return Preset(doc["name"], doc.get("description", ""), runs)


def load_config(path) -> Preset:
    """Load a config file: either one run document or {name, description, runs: [...]}."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"{path}: parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    except OSError as exc:
        raise InvalidSpec(f"--config: cannot read {path!r}: {exc}")
    if "runs" in doc:
        runs = tuple(spec_from_dict(run, label=f"run{k}") for k, run in enumerate(doc["runs"]))
        return Preset(doc.get("name", str(path)), doc.get("description", ""), runs)
    return Preset(str(path), "", (spec_from_dict(doc, label="run0"),))
