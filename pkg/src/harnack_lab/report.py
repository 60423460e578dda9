"""Run configurations and JSON reports.

A report has a ``results`` section that depends only on the configuration
and a ``timings`` section that does not take part in comparisons.
"""

import csv
import hashlib
import io
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone

import jsonschema
import numpy as np

from . import __version__, checks, flows
from .constants import HAMILTON_3D_FACTOR, Q_SO_NORMALIZATION
from .geometry import DiffConfig

__all__ = [
    "CONFIG_SCHEMA",
    "CHECK_NAMES",
    "ConfigError",
    "default_config",
    "load_config",
    "validate_config",
    "run_report",
    "results_digest",
    "to_jsonable",
    "dumps",
    "rows_to_csv",
    "thread_count",
]

CHECK_NAMES = (
    "defect",
    "appendix_a",
    "limit",
    "evolution",
    "harnack",
    "wilking",
    "q_normalization",
    "cone_oracles",
)

CONFIG_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "models": {"type": "array", "items": {"type": "string"}},
        "checks": {"type": "array", "items": {"enum": list(CHECK_NAMES)}, "uniqueItems": True},
        "N_list": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}, "minItems": 2},
        "t_list": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "dims": {"type": "array", "items": {"type": "integer", "minimum": 2, "maximum": 8}, "minItems": 1},
        "k_list": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "seed": {"type": "integer", "minimum": 0},
        "tolerances": {
            "type": "object",
            "additionalProperties": False,
            "properties": {k: {"type": "number", "exclusiveMinimum": 0} for k in checks.DEFAULT_TOLERANCES},
        },
    },
}


class ConfigError(ValueError):
    pass


def default_config():
    return {
        "models": [m.label for m in flows.catalog()],
        "checks": list(CHECK_NAMES),
        "N_list": list(checks.DEFAULT_N_LIST),
        "t_list": [0.2, 0.5],
        "dims": [3, 4, 5, 6],
        "k_list": [1, 2],
        "seed": 0,
        "tolerances": dict(checks.DEFAULT_TOLERANCES),
    }


def validate_config(cfg):
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc.message}") from exc
    full = default_config()
    full.update(cfg)
    full["tolerances"] = {**checks.DEFAULT_TOLERANCES, **cfg.get("tolerances", {})}
    for name in full["models"]:
        try:
            flows.get_model(name)
        except (KeyError, ValueError, TypeError) as exc:
            raise ConfigError(f"invalid model {name!r}: {exc}") from exc
    return full


def load_config(path):
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    return validate_config(cfg)


def thread_count():
    """Worker count from ``HARNACK_LAB_THREADS`` (default 1)."""
    raw = os.environ.get("HARNACK_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise ConfigError(f"HARNACK_LAB_THREADS must be an integer, got {raw!r}") from exc


def to_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(obj):
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)


def results_digest(report):
    """SHA-256 of the configuration-determined part of a report."""
    body = json.dumps(to_jsonable({"config": report["config"], "results": report["results"]}), sort_keys=True)
    return hashlib.sha256(body.encode()).hexdigest()


def _map(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _plan(cfg):
    """(criterion, label, thunk) triples in a fixed order."""
    models = [flows.get_model(name) for name in cfg["models"]]
    seed, tol, Ns = cfg["seed"], cfg["tolerances"], cfg["N_list"]
    dims, ks = cfg["dims"], cfg["k_list"]
    config = cfg.get("_diff")
    jobs = []
    selected = set(cfg["checks"])
    if "defect" in selected:
        for m in models:
            for t in cfg["t_list"]:
                jobs.append((1, "defect", lambda m=m, t=t: checks.defect_scaling(m, t, Ns, seed, tolerances=tol)))
        jobs.append((1, "defect", lambda: checks.flat_defect_limit(N=max(Ns), tolerances=tol)))
    if "appendix_a" in selected:
        for m in models:
            jobs.append((2, "appendix_a", lambda m=m: checks.appendix_a(m, 1e4, 20, seed, tol)))
    if "limit" in selected:
        for m in models:
            jobs.append((3, "limit", lambda m=m: checks.limit_convergence(m, Ns, seed, tolerances=tol)))
    if "evolution" in selected:
        for m in models:
            jobs.append((4, "evolution", lambda m=m: checks.evolution(m, seed, 10, tol, config)))
    if "harnack" in selected:
        jobs.append((5, "harnack", lambda: checks.sphere_ric_tt(tolerances=tol)))
        jobs.append((5, "harnack", lambda: checks.hyperbolic_witness(tolerances=tol)))
        for m in models:
            jobs.append((5, "harnack", lambda m=m: checks.harnack_verdicts(m, seed, 10, tol)))
    if "wilking" in selected:
        jobs.append((6, "wilking", lambda: checks.wilking(dims, ks, 200, seed, 100, tol)))
    if "q_normalization" in selected:
        jobs.append((7, "q_normalization", lambda: checks.q_normalization(dims, 50, seed, tol)))
    if "cone_oracles" in selected:
        jobs.append((8, "cone_oracles", lambda: checks.cone_oracles(dims, ks, seed)))
    return jobs


def run_report(cfg=None, workers=None, diff_config=None):
    """Run the configured checks; ``passed`` is true iff every row passed."""
    cfg = validate_config(cfg or {})
    if diff_config is not None:
        cfg["_diff"] = diff_config
    workers = thread_count() if workers is None else workers
    jobs = _plan(cfg)
    cfg.pop("_diff", None)

    def run(job):
        criterion, check, thunk = job
        t0 = time.perf_counter()
        row = thunk()
        return criterion, check, row, time.perf_counter() - t0

    done = _map(run, jobs, workers)
    results, timings = [], []
    for criterion, check, row, dt in done:
        results.append({"criterion": criterion, "check": check, **row})
        timings.append({"criterion": criterion, "check": check, "name": row.get("name"), "model": row.get("model"), "seconds": dt})
    criteria = {}
    for r in results:
        key = str(r["criterion"])
        criteria[key] = criteria.get(key, True) and bool(r["passed"])
    report = {
        "version": __version__,
        "config": cfg,
        "constants": {"Q_SO_NORMALIZATION": Q_SO_NORMALIZATION, "HAMILTON_3D_FACTOR": HAMILTON_3D_FACTOR},
        "diff_config": None if diff_config is None else {"step": diff_config.step, "levels": diff_config.levels},
        "results": results,
        "criteria": criteria,
        "passed": all(criteria.values()),
        "timings": {
            "generated_at": datetime.now(timezone.utc).isoformat(),
            "workers": workers,
            "rows": timings,
            "total_seconds": sum(t["seconds"] for t in timings),
        },
    }
    report = to_jsonable(report)
    report["digest"] = results_digest(report)
    return report


def _flatten(row, prefix=""):
    out = {}
    for k, v in row.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(to_jsonable(v))
        else:
            out[key] = v
    return out


def rows_to_csv(rows):
    """Flat CSV table: nested dicts become dotted columns, lists JSON cells."""
    flat = [_flatten(to_jsonable(r)) for r in rows]
    cols = []
    for r in flat:
        for k in r:
            if k not in cols:
                cols.append(k)
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    w.writerows(flat)
    return buf.getvalue()
