"""Experiment reports and their CSV / JSON renderings."""

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np


def summarize(values):
    """mean / stddev / p50 / p99 / min / max of a list of numbers."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        return {"count": 0}
    return {
        "count": int(arr.size),
        "mean": math.fsum(arr.tolist()) / arr.size,
        "stddev": float(np.std(arr)),
        "p50": float(np.percentile(arr, 50)),
        "p99": float(np.percentile(arr, 99)),
        "min": float(arr.min()),
        "max": float(arr.max()),
    }


@dataclass
class ExperimentReport:
    """Per-trial records plus aggregates recomputable from them.

    ``groups`` names the record field that splits records into groups
    (e.g. ``n``); ``metrics`` lists the fields that get summarized.
    """

    name: str
    params: dict
    records: list = field(default_factory=list)
    metrics: tuple = ()
    groups: str = None
    extra: dict = field(default_factory=dict)

    def aggregates(self):
        out = {}
        if self.groups is None:
            buckets = {"all": self.records}
        else:
            buckets = {}
            for r in self.records:
                buckets.setdefault(r[self.groups], []).append(r)
        for g, rows in buckets.items():
            agg = {m: summarize([r[m] for r in rows]) for m in self.metrics}
            agg.update(self.extra.get(str(g), {}))
            out[str(g)] = agg
        return out

    def to_json(self):
        doc = {
            "experiment": self.name,
            "params": self.params,
            "trials": self.records,
            "aggregate": self.aggregates(),
        }
        return json.dumps(doc, indent=1, sort_keys=True, allow_nan=True) + "\n"

    def to_csv(self):
        """Header + one row per trial, then ``#`` lines with the aggregates."""
        buf = io.StringIO()
        cols = list(self.records[0]) if self.records else []
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.records:
            w.writerow([_fmt(r[c]) for c in cols])
        for g, agg in self.aggregates().items():
            for metric, stats in agg.items():
                if isinstance(stats, dict):
                    for k, v in stats.items():
                        buf.write(f"# aggregate,{g},{metric},{k},{_fmt(v)}\n")
                else:
                    buf.write(f"# aggregate,{g},{metric},,{_fmt(stats)}\n")
        return buf.getvalue()

    def render(self, fmt):
        if fmt == "json":
            return self.to_json()
        if fmt == "csv":
            return self.to_csv()
        raise ValueError(f"unknown format {fmt!r}")


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def parse_csv_records(text):
    """Read back the trial rows of :meth:`ExperimentReport.to_csv`."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = list(csv.DictReader(lines))
    out = []
    for row in rows:
        rec = {}
        for k, v in row.items():
            try:
                rec[k] = int(v)
            except ValueError:
                try:
                    rec[k] = float(v)
                except ValueError:
                    rec[k] = v
        out.append(rec)
    return out
