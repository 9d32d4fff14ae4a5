"""
runner.py - Background work for quadricgon: worker pool, seeds and sweeps.

Provides:
- `parallel_map()`: fan a function out over a ThreadPoolExecutor; results come back
  in input order, never completion order.
- `trial_seeds()`: per-trial seeds derived from the master seed. Trial k uses
  SeedSequence(seed).spawn(n)[k], i.e. spawn key (k,), so adding trials never
  changes the earlier ones.
- `parse_param_spec()` / `expand_grid()`: turn `--param name=spec` flags into the
  cartesian product of parameter dicts.
- `run_sweep()`: one report file per tuple plus `index.json`; reports already on
  disk are reused, so an interrupted sweep resumes where it stopped.
"""

import itertools
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .errors import ParameterError, QuadricError
from .formats import dumps

logger = logging.getLogger(__name__)

INDEX_FILE = "index.json"


def parallel_map(fn, items, jobs=1):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as executor:
        return list(executor.map(fn, items))


def trial_seeds(seed, n):
    return np.random.SeedSequence(seed).spawn(n)


def trial_rngs(seed, n):
    return [np.random.default_rng(s) for s in trial_seeds(seed, n)]


def _parse_value(text):
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        return text


def parse_param_spec(spec):
    """'x=0:3' -> ('x', [0, 1, 2, 3]); 'x=1,4' -> ('x', [1, 4]); 'x=5' -> ('x', [5])."""
    if "=" not in spec:
        raise ParameterError(f"--param expects name=spec, got {spec!r}")
    name, values = spec.split("=", 1)
    name = name.strip().replace("-", "_")
    if ":" in values:
        lo, hi = values.split(":", 1)
        try:
            lo, hi = int(lo), int(hi)
        except ValueError:
            raise ParameterError(f"range bounds must be integers in {spec!r}")
        if hi < lo:
            raise ParameterError(f"empty range in {spec!r}")
        return name, list(range(lo, hi + 1))
    return name, [_parse_value(v) for v in values.split(",") if v.strip()]


def expand_grid(specs):
    """Cartesian product of parsed specs, in flag order; the last name varies fastest."""
    names = [name for name, _ in specs]
    if len(set(names)) != len(names):
        raise ParameterError("a parameter is given twice")
    return [dict(zip(names, combo)) for combo in itertools.product(*(values for _, values in specs))]


def report_name(target, params):
    parts = [f"{k}={v}" for k, v in params.items()]
    return "__".join([target] + parts) + ".json"


def run_sweep(target, grid, run_one, out_dir, jobs=1):
    """
    run_one(params) -> (status, payload). Returns (index, worst status).
    Parameter errors of a single tuple are recorded with status 2 and the sweep goes on.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def job(params):
        path = out_dir / report_name(target, params)
        if path.exists():
            stored = json.loads(path.read_text())
            logger.info("reusing %s", path.name)
            return {"params": params, "file": path.name, "status": stored["status"]}
        try:
            status, payload = run_one(params)
        except ParameterError as exc:
            status, payload = 2, {"error": str(exc)}
        except QuadricError as exc:
            status, payload = 1, {"error": str(exc)}
        path.write_text(dumps({"params": params, "status": status, "report": payload}))
        logger.info("%s -> status %d", path.name, status)
        return {"params": params, "file": path.name, "status": status}

    entries = parallel_map(job, grid, jobs)
    index = {"target": target, "count": len(entries), "reports": entries}
    (out_dir / INDEX_FILE).write_text(dumps(index))
    worst = max((e["status"] for e in entries), default=0)
    return index, worst
