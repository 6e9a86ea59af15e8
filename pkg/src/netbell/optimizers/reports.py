"""CSV and JSON emission of optimization traces and scans."""

import json
import logging
from collections.abc import Mapping
from pathlib import Path

import pandas as pd

from ..utils import flatten_config, format_gamma, format_score
from .descent import OptimizationResult
from .scan import ScanResult

logger = logging.getLogger(__name__)


def _with_config(frame: pd.DataFrame, config: Mapping | None) -> pd.DataFrame:
    """Append the resolved config as constant columns."""
    if not config:
        return frame
    for key, value in flatten_config(config).items():
        frame[key] = "" if value is None else str(value)
    return frame


def trace_frame(
    result: OptimizationResult, config: Mapping | None = None
) -> pd.DataFrame:
    """One row per step of the winning restart."""
    trace = result.best_trace
    frame = pd.DataFrame(
        {
            "step": range(len(trace.scores)),
            "score": [format_score(s) for s in trace.scores],
            "best_so_far": [format_score(s) for s in trace.best_so_far()],
            "grad_norm": [format_score(g) for g in trace.grad_norms],
            "restart": trace.restart,
        }
    )
    return _with_config(frame, config)


def scan_frame(result: ScanResult, config: Mapping | None = None) -> pd.DataFrame:
    """One row per gamma; the oracle column is blank where undefined."""
    frame = pd.DataFrame(
        {
            "gamma": [format_gamma(p.gamma) for p in result.points],
            "best_score": [format_score(p.best_score) for p in result.points],
            "oracle_score": [format_score(p.oracle_score) for p in result.points],
            "restarts_used": [p.restarts_used for p in result.points],
            "warm_start": [p.warm_started for p in result.points],
            "precision": [format_score(p.precision) for p in result.points],
        }
    )
    return _with_config(frame, config)


def write_trace_csv(
    result: OptimizationResult, path: str | Path, config: Mapping | None = None
) -> Path:
    """Write the winning trace as CSV."""
    path = Path(path)
    trace_frame(result, config).to_csv(path, index=False, lineterminator="\n")
    logger.info("Wrote trace: %s", path)
    return path


def write_scan_csv(
    result: ScanResult, path: str | Path, config: Mapping | None = None
) -> Path:
    """Write a scan as CSV."""
    path = Path(path)
    scan_frame(result, config).to_csv(path, index=False, lineterminator="\n")
    logger.info("Wrote scan: %s", path)
    return path


def best_settings_record(
    result: OptimizationResult, config: Mapping | None = None
) -> dict:
    """JSON-ready summary of the best restart."""
    return {
        "best_score": format_score(result.best_score),
        "best_restart": result.best_restart,
        "best_step": result.best_trace.best_index,
        "best_settings": [format_score(v) for v in result.best_settings],
        "restart_scores": [format_score(t.best_score) for t in result.traces],
        "precision": format_score(result.best_trace.final_step_change()),
        "config": dict(config or {}),
    }


def scan_record(result: ScanResult, config: Mapping | None = None) -> dict:
    """JSON-ready scan with best settings per gamma."""
    return {
        "network": result.network_id,
        "inequality": result.inequality_id,
        "model": result.model,
        "placement": result.placement,
        "warm_start": result.warm_start,
        "critical_gamma": result.critical_gamma(),
        "points": [
            {
                "gamma": format_gamma(p.gamma),
                "best_score": format_score(p.best_score),
                "oracle_score": format_score(p.oracle_score),
                "restarts_used": p.restarts_used,
                "best_settings": [format_score(v) for v in p.best_settings],
            }
            for p in result.points
        ],
        "config": dict(config or {}),
    }


def write_json(record: Mapping, path: str | Path) -> Path:
    """Write a record as indented JSON."""
    path = Path(path)
    path.write_text(json.dumps(record, indent=2) + "\n", encoding="utf-8")
    logger.info("Wrote %s", path)
    return path
