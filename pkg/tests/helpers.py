"""Shared oracles and generators for the test suite."""

import bisect
import random

from fraccascade.cascade import CatalogGraph
from fraccascade.keys import MINUS_INF


def random_graph(rng, kind, nverts, max_degree=3, total=None, keyspace=1000, seed=0):
    """Path, tree or random bounded-degree graph with random integer catalogs."""
    total = nverts * 8 if total is None else total
    g = CatalogGraph(max_degree=max_degree, seed=seed)
    sizes = [0] * nverts
    for _ in range(total):
        sizes[rng.randrange(nverts)] += 1
    for v in range(nverts):
        g.add_vertex(v, [rng.randrange(keyspace) for _ in range(sizes[v])])
    if kind == "path":
        for v in range(nverts - 1):
            g.add_edge(v, v + 1)
    elif kind == "tree":
        for v in range(1, nverts):
            cands = [u for u in range(v) if g.degree(u) < max_degree]
            g.add_edge(rng.choice(cands), v)
    else:
        for _ in range(nverts * 2):
            v, w = rng.sample(range(nverts), 2)
            if (not g.has_edge(v, w) and g.degree(v) < max_degree
                    and g.degree(w) < max_degree):
                g.add_edge(v, w)
    return g


class PredOracle:
    """Sorted ``(key, serial)`` lists per vertex, maintained independently."""

    def __init__(self, g):
        self.lists = {}
        self.serial = 0
        by_catalog = {}
        for v in g.vertices:
            cat = g.catalog(v)
            if id(cat) not in by_catalog:
                rows = []
                for e in cat:
                    if e.value is None:
                        e.value = self.serial
                        self.serial += 1
                    rows.append((e.key, e.value))
                by_catalog[id(cat)] = rows
            # vertices sharing a catalog share one oracle list
            self.lists[v] = by_catalog[id(cat)]

    def insert(self, v, key):
        s = self.serial
        self.serial += 1
        bisect.insort(self.lists[v], (key, s))
        return s

    def delete(self, v, key, serial):
        self.lists[v].remove((key, serial))

    def pred(self, v, x):
        rows = self.lists[v]
        i = bisect.bisect_right(rows, (x, float("inf")))
        return rows[i - 1] if i else MINUS_INF


def answer(a):
    return MINUS_INF if a is MINUS_INF else (a.key, a.value)


def random_path(g, rng, length):
    v = rng.choice(g.vertices)
    path = [v]
    for _ in range(length - 1):
        nbrs = g.neighbors(v)
        if not nbrs:
            break
        v = rng.choice(nbrs)
        path.append(v)
    return path


def churn(g, rng, steps, check_every=1):
    oracle = PredOracle(g)
    live = []
    seen = set()
    for v in g.vertices:
        if id(g.catalog(v)) not in seen:
            seen.add(id(g.catalog(v)))
            live.extend((v, e) for e in g.catalog(v))
    for step in range(steps):
        if live and rng.random() < 0.45:
            v, e = live.pop(rng.randrange(len(live)))
            key, serial = e.key, e.value
            assert g.delete(v, e) == key
            oracle.delete(v, key, serial)
        else:
            v = rng.choice(g.vertices)
            key = rng.randrange(200)
            serial = oracle.insert(v, key)
            live.append((v, g.insert(v, key, serial)))
        if step % check_every == 0:
            assert not g.check_bridges(), f"bridge mismatch after step {step}"
            assert g.check_monotone()
    return oracle
