"""
Deterministic grid scans over criterion parameters.

A scan names a family (one of the built-in figure regions or a custom T-state
pair), up to three axes, fixed bindings for the remaining parameters and the
criteria to evaluate. Records come back in row-major grid order.
"""
import io
import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from itertools import product
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO, Tuple, Union

import pandas as pd

from bilocal.criteria import (
    SteeringReport, SteeringVerdict, alpha_nonbilocal, maximal_plane_condition, steering_report,
    t_local_condition, t_nonbilocal_condition, visibility_analysis,
)
from bilocal.exceptions import (
    BilocalError, EmitError, ScanConfigError,
)
from bilocal.states import TParams, XParams, validate_t_params, validate_x_params, werner
from config import AXIS_DECIMALS, CSV_FLOAT_FORMAT, FIG4_P, FIG4_Q, OUTPUT_DIR_ENV, V_LOC

logger = logging.getLogger(__name__)

Point = Dict[str, float]
Outputs = Dict[str, Any]


@dataclass(frozen=True)
class Axis:
    """One scanned parameter with an inclusive range."""
    name: str
    minimum: float
    maximum: float
    step: float

    def values(self) -> List[float]:
        """
        Grid values from minimum to maximum inclusive.

        Values are rounded to AXIS_DECIMALS; when the range is not a whole
        number of steps, the last step is clamped to maximum.
        """
        count = int(math.floor((self.maximum - self.minimum) / self.step + 1e-9))
        values = [round(self.minimum + k * self.step, AXIS_DECIMALS) for k in range(count + 1)]
        if values[-1] < self.maximum - 1e-12:
            values.append(round(self.maximum, AXIS_DECIMALS))
        return values


@dataclass(frozen=True)
class ScanRecord:
    """One grid point: axis values followed by criterion outputs."""
    axes: Dict[str, float]
    outputs: Dict[str, Any]

    def as_row(self) -> Dict[str, Any]:
        row: Dict[str, Any] = dict(self.axes)
        row.update(self.outputs)
        return row


@dataclass(frozen=True)
class Family:
    """A scan family: its parameters, criteria, evaluator and invalid-point record."""
    name: str
    parameters: Dict[str, float]
    criteria: Tuple[str, ...]
    evaluator: Callable[[Point, Sequence[str]], Outputs]
    blank: Callable[[Point, Sequence[str]], Outputs]
    default_axes: Tuple[Tuple[str, float, float], ...]
    reports_validity: bool = True


@dataclass
class ScanConfig:
    """Scan definition: family, axes, fixed bindings and criteria."""
    family: str
    axes: List[Axis]
    fixed: Dict[str, float] = field(default_factory=dict)
    criteria: List[str] = field(default_factory=list)
    workers: Optional[int] = None


# ---------------------------------------------------------------------------
# Family evaluators
# ---------------------------------------------------------------------------

T_PAIR_COLUMNS: Dict[str, Tuple[Tuple[str, Any], ...]] = {
    "r6": (("r6_value", None), ("network_local", False)),
    "r7": (("r7_value", None), ("nonbilocal", False)),
    "region": (("local_nonbilocal", False),),
}


def _t_pair_outputs(t1: TParams, t2: TParams, criteria: Sequence[str]) -> Outputs:
    valid = validate_t_params(t1)["success"] and validate_t_params(t2)["success"]
    out: Outputs = {"valid": valid}
    need_r6 = "r6" in criteria or "region" in criteria
    need_r7 = "r7" in criteria or "region" in criteria
    r6 = t_local_condition(t1, t2) if need_r6 else None
    r7 = t_nonbilocal_condition(t1, t2) if need_r7 else None
    if "r6" in criteria:
        out["r6_value"] = r6.value
        out["network_local"] = r6.flag
    if "r7" in criteria:
        out["r7_value"] = r7.value
        out["nonbilocal"] = r7.flag
    if "region" in criteria:
        out["local_nonbilocal"] = r6.flag and r7.flag
    return out


def _blank_t_pair(point: Point, criteria: Sequence[str]) -> Outputs:
    out: Outputs = {"valid": False}
    for name in criteria:
        out.update(T_PAIR_COLUMNS[name])
    return out


def _eval_fig2(point: Point, criteria: Sequence[str]) -> Outputs:
    t = TParams(point["c1"], point["c2"], point["c3"])
    return _t_pair_outputs(t, t, criteria)


def _eval_tpair(point: Point, criteria: Sequence[str]) -> Outputs:
    t1 = TParams(point["c11"], point["c21"], point["c31"])
    t2 = TParams(point["c12"], point["c22"], point["c32"])
    return _t_pair_outputs(t1, t2, criteria)


def _eval_werner(point: Point, criteria: Sequence[str]) -> Outputs:
    t = werner(point["alpha"])
    return _t_pair_outputs(t, t, criteria)


def _eval_fig3(point: Point, criteria: Sequence[str]) -> Outputs:
    report = visibility_analysis(point["phi1"], point["phi2"])
    return {"valid": True, "alpha1": report.alpha1, "alpha2": report.alpha2,
            "tradeoff": report.tradeoff, "nonbilocal": report.nonbilocal}


def _blank_fig3(point: Point, criteria: Sequence[str]) -> Outputs:
    return {"valid": False, "alpha1": None, "alpha2": None, "tradeoff": None,
            "nonbilocal": False}


def _fig4_weight_d(point: Point) -> float:
    return round(1 - point["varsigma"] - point["kappa"] - point["zeta"], AXIS_DECIMALS)


def _fig4_outputs(d: float, report: Optional[SteeringReport], criteria: Sequence[str]) -> Outputs:
    out: Outputs = {"d": d, "valid": report is not None}
    if "st10" in criteria:
        out["pre_steerable"] = None if report is None else report.pre_verdict.value
    if "st11" in criteria:
        out["post_steerable"] = None if report is None else report.post_verdict.value
    if "st12" in criteria:
        out["st12_value"] = None if report is None else report.st12_value
        out["nonbilocal"] = False if report is None else report.nonbilocal
    if "witness" in criteria:
        out["witness"] = report is not None and report.nonbilocal and (
            report.pre_verdict is SteeringVerdict.NOT_GUARANTEED
            and report.post_verdict is SteeringVerdict.NOT_GUARANTEED)
    return out


def _eval_fig4(point: Point, criteria: Sequence[str]) -> Outputs:
    d = _fig4_weight_d(point)
    x = XParams(point["varsigma"], point["kappa"], point["zeta"], d, point["p"], point["q"])
    if not validate_x_params(x)["success"]:
        return _fig4_outputs(d, None, criteria)
    return _fig4_outputs(d, steering_report(x), criteria)


def _blank_fig4(point: Point, criteria: Sequence[str]) -> Outputs:
    return _fig4_outputs(_fig4_weight_d(point), None, criteria)


def _eval_fig5(point: Point, criteria: Sequence[str]) -> Outputs:
    result = alpha_nonbilocal(point["alpha1"], point["alpha2"])
    return {"s1_value": result.value, "nonbilocal": result.flag}


def _blank_fig5(point: Point, criteria: Sequence[str]) -> Outputs:
    return {"s1_value": None, "nonbilocal": False}


def _eval_fig6(point: Point, criteria: Sequence[str]) -> Outputs:
    report = maximal_plane_condition(point["delta1"], point["delta2"])
    return {"product": report.product, "nonbilocal": report.capable}


def _blank_fig6(point: Point, criteria: Sequence[str]) -> Outputs:
    return {"product": None, "nonbilocal": False}


FAMILIES: Dict[str, Family] = {
    "fig2": Family("fig2", {"c1": 0.0, "c2": 0.0, "c3": 0.0}, ("r6", "r7", "region"),
                   _eval_fig2, _blank_t_pair, (("c1", -1.0, 1.0), ("c3", -1.0, 1.0))),
    "tpair": Family("tpair", {name: 0.0 for name in ("c11", "c21", "c31", "c12", "c22", "c32")},
                    ("r6", "r7", "region"), _eval_tpair, _blank_t_pair,
                    (("c11", -1.0, 1.0), ("c12", -1.0, 1.0))),
    "werner": Family("werner", {"alpha": 1.0}, ("r7", "r6"), _eval_werner, _blank_t_pair,
                     (("alpha", 0.0, 1.0),), reports_validity=False),
    "fig3": Family("fig3", {"phi1": 0.0, "phi2": 0.0}, ("tradeoff",), _eval_fig3, _blank_fig3,
                   (("phi1", 0.0, V_LOC), ("phi2", 0.0, 1 - V_LOC))),
    "fig4": Family("fig4", {"varsigma": 0.25, "kappa": 0.25, "zeta": 0.25, "p": FIG4_P, "q": FIG4_Q},
                   ("st10", "st11", "st12", "witness"), _eval_fig4, _blank_fig4,
                   (("varsigma", 0.0, 1.0), ("kappa", 0.0, 1.0), ("zeta", 0.0, 1.0))),
    "fig5": Family("fig5", {"alpha1": 1.0, "alpha2": 1.0}, ("s1",), _eval_fig5, _blank_fig5,
                   (("alpha1", 0.0, 1.0), ("alpha2", 0.0, 1.0)), reports_validity=False),
    "fig6": Family("fig6", {"delta1": 0.0, "delta2": 0.0}, ("x8",), _eval_fig6, _blank_fig6,
                   (("delta1", -1.0, 1.0), ("delta2", -1.0, 1.0)), reports_validity=False),
}


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

def validate_scan_config(cfg: ScanConfig) -> Family:
    """
    Check a scan configuration against its family.

    Returns:
        The resolved Family

    Raises:
        ScanConfigError: On unknown family, parameter or criterion, or a bad axis
    """
    family = FAMILIES.get(cfg.family)
    if family is None:
        raise ScanConfigError(f"Unknown scan family '{cfg.family}' "
                              f"(choose from {', '.join(sorted(FAMILIES))})")
    if not 1 <= len(cfg.axes) <= 3:
        raise ScanConfigError(f"A scan needs 1 to 3 axes, got {len(cfg.axes)}")

    seen = set()
    for axis in cfg.axes:
        if axis.name not in family.parameters:
            raise ScanConfigError(f"'{axis.name}' is not a parameter of {family.name} "
                                  f"({', '.join(family.parameters)})")
        if axis.name in seen:
            raise ScanConfigError(f"Axis '{axis.name}' given twice")
        seen.add(axis.name)
        if not axis.step > 0:
            raise ScanConfigError(f"Axis '{axis.name}': step must be > 0")
        if axis.minimum > axis.maximum:
            raise ScanConfigError(f"Axis '{axis.name}': min must not exceed max")
    for name in cfg.fixed:
        if name not in family.parameters:
            raise ScanConfigError(f"'{name}' is not a parameter of {family.name}")
        if name in seen:
            raise ScanConfigError(f"'{name}' is both an axis and a fixed binding")
    for name in cfg.criteria:
        if name not in family.criteria:
            raise ScanConfigError(f"Unknown criterion '{name}' for {family.name} "
                                  f"({', '.join(family.criteria)})")
    return family


def figure_config(figure: Union[int, str], step: float, workers: Optional[int] = None) -> ScanConfig:
    """
    Built-in configuration for a figure region over its full parameter box.

    Args:
        figure: 2-6 or a family name
        step: Grid step shared by all axes

    Raises:
        ScanConfigError: On an unknown figure
    """
    name = f"fig{figure}" if isinstance(figure, int) or str(figure).isdigit() else str(figure)
    family = FAMILIES.get(name)
    if family is None:
        raise ScanConfigError(f"Unknown figure '{figure}'")
    axes = [Axis(axis_name, lo, hi, step) for axis_name, lo, hi in family.default_axes]
    return ScanConfig(family=name, axes=axes, workers=workers)


def _parse_float(text: str, key: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ScanConfigError(f"{key}: '{text}' is not a number")


def parse_scan_config(text: str) -> ScanConfig:
    """
    Parse the flat key = value scan configuration format.

    Keys: family, axis.<name> = min, max, step, fixed.<name> = value,
    criteria = a, b, workers = n. Lines starting with # are comments.

    Raises:
        ScanConfigError: On malformed lines or missing keys
    """
    family = None
    axes: List[Axis] = []
    fixed: Dict[str, float] = {}
    criteria: List[str] = []
    workers = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ScanConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key == "family":
            family = value
        elif key.startswith("axis."):
            parts = [p.strip() for p in value.split(",")]
            if len(parts) != 3:
                raise ScanConfigError(f"line {lineno}: axis needs 'min, max, step'")
            lo, hi, step = (_parse_float(p, key) for p in parts)
            axes.append(Axis(key[len("axis."):], lo, hi, step))
        elif key.startswith("fixed."):
            fixed[key[len("fixed."):]] = _parse_float(value, key)
        elif key == "criteria":
            criteria = [c.strip() for c in value.split(",") if c.strip()]
        elif key == "workers":
            workers = int(_parse_float(value, key))
        else:
            raise ScanConfigError(f"line {lineno}: unknown key '{key}'")

    if family is None:
        raise ScanConfigError("missing 'family'")
    cfg = ScanConfig(family=family, axes=axes, fixed=fixed, criteria=criteria, workers=workers)
    validate_scan_config(cfg)
    return cfg


def read_scan_config(path: Union[str, Path]) -> ScanConfig:
    """
    Read a scan configuration file.

    Raises:
        ScanConfigError: If the file cannot be read or parsed
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        logger.error(f"Cannot read scan config '{path}': {e}")
        raise ScanConfigError(f"Cannot read scan config '{path}': {e}")
    return parse_scan_config(text)


# ---------------------------------------------------------------------------
# Running
# ---------------------------------------------------------------------------

def _evaluate_point(family_name: str, axis_names: Tuple[str, ...], base: Point,
                    criteria: Tuple[str, ...], values: Tuple[float, ...]) -> ScanRecord:
    family = FAMILIES[family_name]
    point = dict(base)
    point.update(zip(axis_names, values))
    try:
        outputs = family.evaluator(point, criteria)
    except BilocalError as e:
        logger.debug(f"{family_name} point {values} is invalid: {e}")
        outputs = family.blank(point, criteria)
    if not family.reports_validity:
        outputs.pop("valid", None)
    return ScanRecord(dict(zip(axis_names, values)), outputs)


def run_scan(cfg: ScanConfig, workers: Optional[int] = None) -> List[ScanRecord]:
    """
    Evaluate the configured criteria on every grid point.

    Args:
        cfg: Scan configuration
        workers: Process count; overrides cfg.workers. None or 1 runs in-process

    Returns:
        Records in row-major order of the axes as listed

    Raises:
        ScanConfigError: If the configuration is invalid
    """
    family = validate_scan_config(cfg)
    criteria = tuple(cfg.criteria) if cfg.criteria else family.criteria
    base = dict(family.parameters)
    base.update(cfg.fixed)
    axis_names = tuple(axis.name for axis in cfg.axes)
    grid = list(product(*(axis.values() for axis in cfg.axes)))
    evaluate = partial(_evaluate_point, family.name, axis_names, base, criteria)

    n_workers = workers if workers is not None else cfg.workers
    logger.info(f"Scanning {family.name}: {len(grid)} points over {axis_names}, "
                f"criteria {criteria}, workers={n_workers or 1}")
    if n_workers and n_workers > 1:
        chunksize = max(1, len(grid) // (n_workers * 8))
        with ProcessPoolExecutor(max_workers=n_workers) as executor:
            records = list(executor.map(evaluate, grid, chunksize=chunksize))
    else:
        records = [evaluate(values) for values in grid]

    flagged = sum(1 for r in records if r.outputs.get("nonbilocal"))
    logger.info(f"Scan complete: {len(records)} records, {flagged} flagged nonbilocal")
    return records


# ---------------------------------------------------------------------------
# Output
# ---------------------------------------------------------------------------

def render_records(records: Sequence[ScanRecord], fmt: str) -> str:
    """
    Serialize records as CSV (reals at 12 significant digits) or JSON.

    Raises:
        ScanConfigError: On an unknown format or empty record list
    """
    if not records:
        raise ScanConfigError("No records to emit")
    rows = [record.as_row() for record in records]
    if fmt == "csv":
        frame = pd.DataFrame(rows, columns=list(rows[0].keys()))
        for column in frame.columns:
            present = [v for v in frame[column] if v is not None]
            if present and all(isinstance(v, float) for v in present):
                frame[column] = frame[column].astype(float)
        buffer = io.StringIO()
        frame.to_csv(buffer, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n")
        return buffer.getvalue()
    if fmt == "json":
        return json.dumps(rows) + "\n"
    raise ScanConfigError(f"Unknown output format '{fmt}' (csv or json)")


def resolve_destination(destination: Union[str, Path]) -> Path:
    """Relative destinations land in $BILOCAL_OUTPUT_DIR when it is set."""
    path = Path(destination)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def emit(records: Sequence[ScanRecord], fmt: str,
         destination: Union[str, Path, TextIO]) -> None:
    """
    Write records to a file path or an open text stream.

    Raises:
        ScanConfigError: On an unknown format or empty record list
        EmitError: If the destination cannot be written
    """
    text = render_records(records, fmt)
    if hasattr(destination, "write"):
        destination.write(text)  # type: ignore[union-attr]
        return

    path = resolve_destination(destination)  # type: ignore[arg-type]
    try:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as e:
        logger.error(f"Cannot write scan output to '{path}': {e}")
        raise EmitError(f"Cannot write scan output to '{path}': {e}")
    logger.info(f"Wrote {len(records)} records to {path} ({fmt})")
