"""Instrumented experiments behind the command-line driver."""

import bisect
import math
import random
import time

import numpy as np

from ..cascade import graph_build, random_walk
from ..geometry import Metric, Point, QueryStats, XTree
from ..keys import MINUS_INF
from .distributions import Distribution, trial_rng
from .report import ExperimentReport

UNIFORM = Distribution("uniform_square")
METRICS = (1.0, 2.0, 3.0, math.inf)


def harmonic(n):
    return math.fsum(1.0 / i for i in range(1, n + 1))


def count_maxima(xy):
    """Points of an ``(n, 2)`` array not dominated toward (+inf, +inf).

    Identical points count once.  Sort by x then y descending and count
    strict records of y.
    """
    if len(xy) == 0:
        return 0
    order = np.lexsort((-xy[:, 1], -xy[:, 0]))
    y = xy[order, 1]
    best = np.maximum.accumulate(y)
    return 1 + int(np.count_nonzero(y[1:] > best[:-1]))


def to_points(xy, start=0):
    return [Point(float(x), float(y), start + i) for i, (x, y) in enumerate(xy.tolist())]


def linear_scan_nn(xy, ids, q, metric):
    """Exact nearest neighbor by scanning every point (ties: smallest id).

    numpy narrows the field to near-minimal distances; the final choice is
    made with ``metric.distance`` so it agrees bit-for-bit with the
    structure under test.
    """
    if len(ids) == 0:
        return None
    dx = np.abs(xy[:, 0] - q[0])
    dy = np.abs(xy[:, 1] - q[1])
    p = metric.p
    if p == math.inf:
        d = np.maximum(dx, dy)
    elif p == 1.0:
        d = dx + dy
    else:
        hi = np.maximum(dx, dy)
        lo = np.minimum(dx, dy)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(hi > 0, lo / hi, 0.0)
        d = hi * np.power(1.0 + np.power(ratio, p), 1.0 / p)
    near = np.flatnonzero(d <= d.min() * (1 + 1e-6) + 1e-300)
    best = min(near.tolist(),
               key=lambda i: (metric.distance(q, (xy[i, 0], xy[i, 1])), ids[i]))
    return ids[best]


def experiment_discrepancy_sum(dist=UNIFORM, k=64, n=4096, queries=1000, seed=0,
                               catalogs=None):
    """Sum of log2(delta) and finger steps along a path of ``k`` catalogs.

    ``catalogs`` overrides the generator with explicit key lists.
    """
    if catalogs is None:
        if k < 2 or n < 1 or queries < 1:
            raise ValueError("need k >= 2, n >= 1 and queries >= 1")
        catalogs = [dist.catalog(i, n, trial_rng(seed, 1, i)) for i in range(k)]
    else:
        k = len(catalogs)
        if k < 2:
            raise ValueError("need at least two catalogs")
    keys = [np.asarray(c, dtype=float).tolist() for c in catalogs]
    g = graph_build(list(enumerate(keys)), [(i, i + 1) for i in range(k - 1)],
                    seed=seed)
    flat = [x for c in keys for x in c]
    lo, hi = (min(flat), max(flat)) if flat else (0.0, 1.0)
    xs = trial_rng(seed, 2).uniform(lo, hi, size=queries).tolist()
    path = list(range(k))
    records = []
    for qi, x in enumerate(xs):
        _, cost = g.path_search(path, x)
        s = cost.sum_log_delta
        records.append({
            "query": qi,
            "x": x,
            "sum_log_delta": s,
            "log_delta_per_k": s / k,
            "finger_steps": cost.finger_steps,
            "steps_per_k": cost.finger_steps / k,
            "entry_steps": cost.entry_steps,
            "max_delta": max(e.delta for e in cost.edges),
        })
    params = {"dist": dist.label(), "k": k, "n": n, "queries": queries, "seed": seed}
    return ExperimentReport(
        "discrepancy", params, records,
        metrics=("log_delta_per_k", "steps_per_k", "sum_log_delta", "finger_steps"))


def experiment_maxima_count(n_list=(1024,), trials=200, seed=0, method="sweep",
                            dist=UNIFORM):
    """Mean maxima count over ``trials`` point sets, per ``n``, against H_n.

    ``method="sweep"`` counts with a vectorized sort-and-scan;
    ``method="xtree"`` builds an :class:`XTree` per trial and calls
    :meth:`XTree.maxima_count`.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if method not in ("sweep", "xtree"):
        raise ValueError(f"unknown method {method!r}")
    records = []
    extra = {}
    for n in n_list:
        if n < 1:
            raise ValueError("n must be >= 1")
        counts = []
        for t in range(trials):
            xy = dist.points(n, trial_rng(seed, n, t))
            if method == "sweep":
                c = count_maxima(xy)
            else:
                c = XTree(to_points(xy), seed=seed).maxima_count()
            counts.append(c)
            records.append({"n": n, "trial": t, "maxima": c})
        h = harmonic(n)
        mean = math.fsum(counts) / len(counts)
        extra[n] = {"harmonic": h, "ratio": mean / h}
    params = {"n": list(n_list), "trials": trials, "seed": seed, "method": method,
              "dist": dist.label()}
    rep = ExperimentReport("maxima", params, records, metrics=("maxima",),
                           groups="n", extra={str(n): v for n, v in extra.items()})
    return rep


def _far_query(rng):
    a = rng.uniform(0.0, 2 * math.pi)
    return (0.5 + 2.0 * math.cos(a), 0.5 + 2.0 * math.sin(a))


def experiment_nn_scaling(n_list=(1024,), ops=100, seed=0, dist=UNIFORM, metric=2.0):
    """Per-operation wall time and staircase sizes for growing ``n``.

    Records one row per operation.  ``query`` rows draw q from the unit
    square; ``query_far`` rows place q on a circle of radius 2 around
    the square, outside the data.  Timings are advisory; candidate counts
    are machine independent.
    """
    m = Metric(metric)
    records = []
    for n in n_list:
        if n < 1:
            raise ValueError("n must be >= 1")
        rng = trial_rng(seed, n)
        pts = to_points(dist.points(n, rng))
        t0 = time.perf_counter()
        tree = XTree(pts, seed=seed)
        build = time.perf_counter() - t0
        records.append({"n": n, "op": "build", "index": 0, "seconds": build,
                        "candidates": 0})
        fresh = to_points(dist.points(ops, rng), start=n)
        for i, p in enumerate(fresh):
            t0 = time.perf_counter()
            tree.insert(p)
            records.append({"n": n, "op": "insert", "index": i,
                            "seconds": time.perf_counter() - t0, "candidates": 0})
        qrng = random.Random(int(rng.integers(1 << 62)))
        for op in ("query", "query_far"):
            for i in range(ops):
                q = (qrng.random(), qrng.random()) if op == "query" else _far_query(qrng)
                st = QueryStats()
                t0 = time.perf_counter()
                tree.nearest_neighbor(q, m, st)
                records.append({"n": n, "op": op, "index": i,
                                "seconds": time.perf_counter() - t0,
                                "candidates": st.candidates})
        for i, p in enumerate(fresh):
            t0 = time.perf_counter()
            tree.delete(p.id)
            records.append({"n": n, "op": "delete", "index": i,
                            "seconds": time.perf_counter() - t0, "candidates": 0})
    for r in records:
        r["group"] = f"{r['n']}:{r['op']}"
    params = {"n": list(n_list), "ops": ops, "seed": seed, "dist": dist.label(),
              "metric": metric}
    return ExperimentReport("nn-scaling", params, records,
                            metrics=("seconds", "candidates"), groups="group")


def experiment_nn_check(points, queries=100, seed=0, metrics=METRICS):
    """Dynamic NN workload checked against a linear scan.

    Points are inserted one at a time; a third of them are deleted halfway
    through the queries and re-inserted afterwards.
    """
    rng = random.Random(seed)
    pts = list(points)
    tree = XTree(seed=seed)
    for p in pts:
        tree.insert(p)
    live = {p.id: p for p in pts}
    if pts:
        xs = [p.x for p in pts]
        ys = [p.y for p in pts]
        box = (min(xs), max(xs), min(ys), max(ys))
    else:
        box = (0.0, 1.0, 0.0, 1.0)
    pad_x = (box[1] - box[0]) * 0.1 or 1.0
    pad_y = (box[3] - box[2]) * 0.1 or 1.0
    removed = []
    records = []
    ms = [Metric(p) for p in metrics]
    for qi in range(queries):
        if qi == queries // 2 and live:
            removed = rng.sample(sorted(live), len(live) // 3)
            for pid in removed:
                tree.delete(pid)
                del live[pid]
        if qi == 0 or qi == queries // 2:
            cur = list(live.values())
            xy = np.array([(p.x, p.y) for p in cur], dtype=float).reshape(-1, 2)
            ids = [p.id for p in cur]
        q = (rng.uniform(box[0] - pad_x, box[1] + pad_x),
             rng.uniform(box[2] - pad_y, box[3] + pad_y))
        for m in ms:
            got = tree.nearest_neighbor(q, m)
            want = linear_scan_nn(xy, ids, q, m)
            got_id = None if got is None else got.id
            records.append({"query": qi, "p": m.p, "qx": q[0], "qy": q[1],
                            "got": got_id if got_id is not None else "",
                            "want": want if want is not None else "",
                            "match": int(got_id == want)})
    for pid in removed:
        p = next(pp for pp in pts if pp.id == pid)
        tree.insert(p)
    params = {"points": len(pts), "queries": queries, "seed": seed,
              "metrics": [m.p for m in ms]}
    return ExperimentReport("nn-check", params, records, metrics=("match",))


def experiment_graph_check(g, queries=100, seed=0, path_len=8):
    """Audit bridges, then compare random path searches with bisection."""
    rng = random.Random(seed)
    bad = g.check_bridges()
    monotone = g.check_monotone()
    records = []
    verts = g.vertices
    keys = {v: [e.key for e in g.catalog(v)] for v in verts}
    allkeys = [x for ks in keys.values() for x in ks] or [0.0]
    lo, hi = min(allkeys), max(allkeys)
    for qi in range(queries if verts else 0):
        path = random_walk(g, path_len, rng)
        x = rng.uniform(lo - 1, hi + 1)
        out, cost = g.path_search(path, x)
        ok = True
        for v, a in out:
            i = bisect.bisect_right(keys[v], x)
            want = keys[v][i - 1] if i else MINUS_INF
            got = a if a is MINUS_INF else a.key
            ok = ok and (got == want) and (got is MINUS_INF) == (want is MINUS_INF)
        records.append({"query": qi, "path_len": len(path), "x": x,
                        "finger_steps": cost.finger_steps,
                        "sum_log_delta": cost.sum_log_delta, "match": int(ok)})
    params = {"vertices": len(verts), "edges": len(g.edges), "queries": queries,
              "seed": seed}
    extra = {"all": {"bridge_mismatches": len(bad), "monotone": int(monotone)}}
    return ExperimentReport("graph-check", params, records,
                            metrics=("match", "finger_steps"), extra=extra)
