"""Deterministic parameter sweeps over a process pool.

Every grid point runs in a worker with BLAS pinned to one thread, also for
``workers=1``, so the table does not depend on the worker count.
"""

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from threadpoolctl import threadpool_limits

from .config import validate
from .runners import RUNNERS


def _init_worker():
    global _LIMITS
    _LIMITS = threadpool_limits(1)


def _run_point(args):
    command, data = args
    try:
        return RUNNERS[command](validate(data)), None
    except Exception as exc:  # flagged in the table, the sweep goes on
        return None, f"{type(exc).__name__}: {exc}"


@dataclass
class SweepResult:
    axes: list
    points: list
    results: list
    errors: list

    @property
    def failed(self):
        return [(p, e) for p, e in zip(self.points, self.errors) if e is not None]

    def columns(self):
        cols = []
        for res in self.results:
            if res is not None:
                cols.extend(k for k in res.row if k not in cols)
        return cols

    def to_csv(self):
        cols = self.columns()
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(self.axes + ["status"] + cols)
        for point, res, err in zip(self.points, self.results, self.errors):
            values = [point[a] for a in self.axes]
            row = res.row if res is not None else {}
            out.writerow([_fmt(v) for v in values] + ["ok" if err is None else "failed"]
                         + [_fmt(row.get(c, math.nan)) for c in cols])
        return buf.getvalue()


def _fmt(value):
    if value is None:
        return "nan"
    if isinstance(value, (int, float)) or hasattr(value, "dtype"):
        return repr(float(value))
    return str(value)


def sweep(command, config, workers=1):
    """Run ``command`` on every grid point of ``config`` in canonical order."""
    if command not in RUNNERS:
        raise ValueError(f"unknown command {command!r}")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    points = config.points()
    jobs = [(command, cfg.to_dict()) for _, cfg in points]
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker) as pool:
        outcome = list(pool.map(_run_point, jobs))
    return SweepResult([a.name for a in config.sweep], [p for p, _ in points],
                       [r for r, _ in outcome], [e for _, e in outcome])
