"""Catalog graphs with exact bridges and discrepancy-sensitive path search.

Every directed edge ``(v, w)`` carries a bridge map sending each element
``a`` of ``C(v)`` to the closed predecessor of ``a.key`` in ``C(w)``.  A
path search does one full search at the first vertex and then, per edge,
jumps through the bridge of the current answer and finger-searches forward
in the next catalog.  The jump lands at most ``delta - 2`` elements before
the answer, where ``delta`` is the local discrepancy of the two catalogs at
the query value, so each edge costs expected ``O(log delta)`` steps.
"""

import bisect
import itertools
import math
import random
from dataclasses import dataclass, field

from .catalog import Catalog, DeadHandleError, Element
from .keys import MINUS_INF, PLUS_INF, check_key, check_query

__all__ = [
    "CatalogGraph",
    "CostTrace",
    "EdgeCost",
    "GraphError",
    "DegreeError",
    "ReducedGraph",
    "graph_build",
    "degree_reduce",
    "load_graph",
    "parse_graph",
]


class GraphError(ValueError):
    """Bad vertex, missing edge or malformed path."""


class DegreeError(GraphError):
    """An edge would push a vertex past the degree bound."""

    def __init__(self, vertex, degree, bound):
        super().__init__(
            f"vertex {vertex!r} would have degree {degree} > {bound}")
        self.vertex = vertex


@dataclass(frozen=True)
class EdgeCost:
    edge: tuple
    steps: int
    delta: int

    @property
    def log_delta(self):
        return math.log2(self.delta)


@dataclass
class CostTrace:
    """Step counters collected while a path search runs."""

    entry_steps: int = 0
    edges: list = field(default_factory=list)

    @property
    def finger_steps(self):
        return sum(e.steps for e in self.edges)

    @property
    def sum_log_delta(self):
        return math.fsum(e.log_delta for e in self.edges)

    @property
    def total_steps(self):
        return self.entry_steps + self.finger_steps


class CatalogGraph:
    """Bounded-degree graph whose vertices own sorted catalogs.

    Several vertices may share one :class:`Catalog` object (see
    :func:`degree_reduce`); updates through any of them keep the bridges
    of all sharers exact.

    Single writer: searches may run concurrently with each other, never
    with an update.
    """

    def __init__(self, max_degree=3, seed=0):
        if max_degree < 1:
            raise ValueError("max_degree must be positive")
        self.max_degree = max_degree
        self._rng = random.Random(seed)
        self._catalogs = {}
        self._owners = {}
        self._adj = {}
        self._bridges = {}

    # -- structure ----------------------------------------------------------

    def __contains__(self, v):
        return v in self._catalogs

    def __len__(self):
        return len(self._catalogs)

    @property
    def vertices(self):
        return list(self._catalogs)

    @property
    def edges(self):
        seen = set()
        out = []
        for v, nbrs in self._adj.items():
            for w in nbrs:
                if (w, v) not in seen:
                    seen.add((v, w))
                    out.append((v, w))
        return out

    def catalog(self, v):
        try:
            return self._catalogs[v]
        except KeyError:
            raise GraphError(f"unknown vertex {v!r}") from None

    def neighbors(self, v):
        self.catalog(v)
        return list(self._adj[v])

    def degree(self, v):
        self.catalog(v)
        return len(self._adj[v])

    def has_edge(self, v, w):
        return v in self._adj and w in self._adj[v]

    def sharers(self, v):
        """Vertices whose catalog is the same object as ``v``'s."""
        return list(self._owners[id(self.catalog(v))][1])

    def add_vertex(self, v, keys=(), items=None, catalog=None):
        """Add vertex ``v``.

        Its catalog is built from ``keys``, from presorted ``(key, value)``
        ``items``, or is an existing ``catalog`` object to share.
        """
        if v in self._catalogs:
            raise GraphError(f"vertex {v!r} already exists")
        if catalog is None:
            seed = self._rng.getrandbits(64)
            if items is not None:
                catalog = Catalog.from_sorted(items, seed=seed)
            else:
                catalog = Catalog(keys, seed=seed)
        entry = self._owners.setdefault(id(catalog), (catalog, []))
        entry[1].append(v)
        self._catalogs[v] = catalog
        self._adj[v] = []
        return catalog

    def remove_vertex(self, v):
        cat = self.catalog(v)
        for w in list(self._adj[v]):
            self.remove_edge(v, w)
        owners = self._owners[id(cat)][1]
        owners.remove(v)
        if not owners:
            del self._owners[id(cat)]
        del self._catalogs[v]
        del self._adj[v]

    def add_edge(self, v, w):
        """Connect ``v`` and ``w`` and bulk-build both bridge maps."""
        a = self.catalog(v)
        b = self.catalog(w)
        if v == w:
            raise GraphError(f"self-loop at {v!r}")
        if w in self._adj[v]:
            raise GraphError(f"duplicate edge {v!r}-{w!r}")
        for x in (v, w):
            d = len(self._adj[x]) + 1
            if d > self.max_degree:
                raise DegreeError(x, d, self.max_degree)
        self._adj[v].append(w)
        self._adj[w].append(v)
        self._bridges[(v, w)] = merge_bridges(a, b)
        self._bridges[(w, v)] = merge_bridges(b, a)

    def remove_edge(self, v, w):
        if not self.has_edge(v, w):
            raise GraphError(f"no edge {v!r}-{w!r}")
        self._adj[v].remove(w)
        self._adj[w].remove(v)
        del self._bridges[(v, w)]
        del self._bridges[(w, v)]

    def bridge(self, v, w, a):
        """Bridge target of element ``a`` of ``C(v)`` on edge ``v -> w``."""
        try:
            return self._bridges[(v, w)][a]
        except KeyError:
            if not self.has_edge(v, w):
                raise GraphError(f"no edge {v!r}-{w!r}") from None
            raise GraphError(f"{a!r} is not an element of C({v!r})") from None

    def bridge_map(self, v, w):
        if not self.has_edge(v, w):
            raise GraphError(f"no edge {v!r}-{w!r}")
        return dict(self._bridges[(v, w)])

    # -- updates ------------------------------------------------------------

    def insert(self, v, key, value=None):
        """Insert ``key`` into ``C(v)`` and repair every affected bridge."""
        cat = self.catalog(v)
        node = cat.insert(key, value)
        k = node.key
        nxt = node.next[0]
        catalogs = self._catalogs
        bridges = self._bridges
        for u in self._owners[id(cat)][1]:
            for w in self._adj[u]:
                wc = catalogs[w]
                bridges[(u, w)][node] = wc.pred(k)
                incoming = bridges[(w, u)]
                a = wc._succ_node(k)
                if nxt is None:
                    while a is not None:
                        incoming[a] = node
                        a = a.next[0]
                else:
                    limit = nxt.key
                    while a is not None and a.key < limit:
                        incoming[a] = node
                        a = a.next[0]
        return node

    def delete(self, v, handle):
        """Delete ``handle`` from ``C(v)``; bridges aimed at it move to its
        predecessor (or ``MINUS_INF``)."""
        cat = self.catalog(v)
        if not isinstance(handle, Element):
            raise TypeError(f"expected an Element handle, got {handle!r}")
        if handle.catalog is None:
            raise DeadHandleError(f"{handle!r} was already deleted")
        if handle.catalog is not cat:
            raise GraphError(f"{handle!r} is not in C({v!r})")
        k = handle.key
        p = handle.prev[0]
        target = MINUS_INF if p is cat.head else p
        catalogs = self._catalogs
        bridges = self._bridges
        owners = self._owners[id(cat)][1]
        for u in owners:
            for w in self._adj[u]:
                incoming = bridges[(w, u)]
                a = catalogs[w]._succ_node(k)
                while a is not None and incoming.get(a) is handle:
                    incoming[a] = target
                    a = a.next[0]
        for u in owners:
            for w in self._adj[u]:
                del bridges[(u, w)][handle]
        return cat.delete(handle)

    # -- queries ------------------------------------------------------------

    def local_discrepancy(self, v, w, x):
        """``2 + |{b in C(w): a- <= b < a+}|`` for the gap of ``C(v)`` holding x."""
        if not self.has_edge(v, w):
            raise GraphError(f"no edge {v!r}-{w!r}")
        check_query(x)
        a_cat = self._catalogs[v]
        b_cat = self._catalogs[w]
        lo = a_cat.pred(x)
        if lo is MINUS_INF:
            hi = a_cat.head.next[0]
            b = b_cat.head.next[0]
        else:
            hi = lo.next[0]
            b = b_cat._succ_node(lo.key)
        count = 0
        if hi is None:
            while b is not None:
                count += 1
                b = b.next[0]
        else:
            limit = hi.key
            while b is not None and b.key < limit:
                count += 1
                b = b.next[0]
        return 2 + count

    def step(self, v, w, a, x):
        """Given ``a = pred_{C(v)}(x)``, return ``(pred_{C(w)}(x), steps)``."""
        wc = self._catalogs[w]
        if a is MINUS_INF:
            return wc._finger(wc.head, x)
        start = self._bridges[(v, w)][a]
        return wc._finger(wc.head if start is MINUS_INF else start, x)

    def step_succ(self, v, w, a, x):
        """Given ``a = succ_{C(v)}(x)``, return ``(succ_{C(w)}(x), steps)``.

        The bridge of ``a`` is the last element of ``C(w)`` not above
        ``a.key``; if it is still >= x the answer lies behind it, otherwise
        the answer is its successor.
        """
        wc = self._catalogs[w]
        if a is PLUS_INF:
            start = wc._last
            if start is None or start.key < x:
                return PLUS_INF, 1
            return wc._finger_back(start, x)
        b = self._bridges[(v, w)][a]
        if b is MINUS_INF:
            first = wc.head.next[0]
            return (PLUS_INF if first is None else first), 1
        if b.key < x:
            n = b.next[0]
            return (PLUS_INF if n is None else n), 1
        return wc._finger_back(b, x)

    def path_search(self, path, x, trace=True):
        """Locate ``x`` in every catalog along ``path``.

        Returns ``([(vertex, pred), ...], CostTrace)``; each ``pred`` is an
        :class:`Element` or ``MINUS_INF``.  With ``trace=False`` the
        per-edge discrepancy is not computed (steps are still counted).
        """
        path = list(path)
        if not path:
            raise GraphError("path is empty")
        check_query(x)
        v0 = path[0]
        a, entry = self.catalog(v0).search(x)
        cost = CostTrace(entry_steps=entry)
        out = [(v0, a)]
        for v, w in zip(path, path[1:]):
            if not self.has_edge(v, w):
                raise GraphError(f"path uses missing edge {v!r}-{w!r}")
            a, steps = self.step(v, w, a, x)
            delta = self.local_discrepancy(v, w, x) if trace else 0
            cost.edges.append(EdgeCost((v, w), steps, delta))
            out.append((w, a))
        return out, cost

    # -- audit --------------------------------------------------------------

    def brute_force_bridges(self, v, w):
        """Recompute the ``v -> w`` bridge map by independent search."""
        wc = self._catalogs[w]
        keys = wc.keys()
        elems = list(wc)
        out = {}
        for a in self._catalogs[v]:
            i = bisect.bisect_right(keys, a.key)
            out[a] = elems[i - 1] if i else MINUS_INF
        return out

    def check_bridges(self):
        """Return a list of ``(v, w, element, maintained, expected)`` mismatches."""
        bad = []
        for (v, w), m in self._bridges.items():
            expect = self.brute_force_bridges(v, w)
            if set(m) != set(expect):
                bad.append((v, w, None, len(m), len(expect)))
                continue
            for a, t in expect.items():
                if m[a] is not t:
                    bad.append((v, w, a, m[a], t))
        return bad

    def check_monotone(self):
        """True if every bridge map is non-decreasing along its catalog."""
        for (v, w), m in self._bridges.items():
            rank = {e: i for i, e in enumerate(self._catalogs[w])}
            last = -1
            for a in self._catalogs[v]:
                t = m[a]
                r = -1 if t is MINUS_INF else rank[t]
                if r < last:
                    return False
                last = r
        return True


def merge_bridges(a_cat, b_cat):
    """Bridge map ``a -> pred_B(a.key)`` by one merge pass, O(|A| + |B|)."""
    out = {}
    target = MINUS_INF
    b = b_cat.head.next[0]
    for a in a_cat:
        k = a.key
        while b is not None and b.key <= k:
            target = b
            b = b.next[0]
        out[a] = target
    return out


def graph_build(vertices, edges, max_degree=3, seed=0):
    """Build a :class:`CatalogGraph` from ``(id, keys)`` pairs and an edge list."""
    g = CatalogGraph(max_degree=max_degree, seed=seed)
    for v, keys in vertices:
        g.add_vertex(v, keys)
    degree = {}
    for v, w in edges:
        for x in (v, w):
            if x not in g:
                raise GraphError(f"edge endpoint {x!r} is not a vertex")
            degree[x] = degree.get(x, 0) + 1
            if degree[x] > max_degree:
                raise DegreeError(x, degree[x], max_degree)
    for v, w in edges:
        g.add_edge(v, w)
    return g


@dataclass
class ReducedGraph:
    """Result of :func:`degree_reduce`.

    ``roots`` maps each original vertex to the root of its replacement
    tree (itself if it was not replaced); ``ports`` maps a directed
    original edge ``(v, u)`` to the vertex of ``v``'s tree that carries it.
    """

    graph: CatalogGraph
    roots: dict
    ports: dict
    trees: dict

    def translate_path(self, path):
        """Map an original path to a reduced one.

        Returns ``(reduced_path, positions)`` where ``positions[i]`` indexes
        the reduced vertex standing in for ``path[i]``.
        """
        path = list(path)
        if not path:
            raise GraphError("path is empty")
        out = []
        positions = []
        for i, v in enumerate(path):
            enter = self.ports[(v, path[i - 1])] if i else None
            leave = self.ports[(v, path[i + 1])] if i + 1 < len(path) else None
            if enter is None and leave is None:
                walk = [self.roots[v]]
            elif enter is None:
                walk = [leave]
            elif leave is None:
                walk = [enter]
            else:
                walk = self._tree_walk(v, enter, leave)
            positions.append(len(out))
            out.extend(walk)
        return out, positions

    def _tree_walk(self, v, a, b):
        if a == b or v not in self.trees:
            return [a]
        index = self.trees[v]
        ia, ib = index[a], index[b]
        up, down = [], []
        while ia != ib:
            if ia > ib:
                up.append(ia)
                ia //= 2
            else:
                down.append(ib)
                ib //= 2
        seq = up + [ia] + down[::-1]
        names = {i: n for n, i in index.items()}
        return [names[i] for i in seq]


def degree_reduce(g, target=3):
    """Replace every vertex of degree > ``target`` by a complete binary tree.

    All tree nodes share one copy of the original catalog.  Leaves carry
    the original edges, ``target - 1`` per leaf.  If no vertex exceeds the
    bound the input graph is returned as is, with identity mappings.
    """
    if target < 3:
        raise ValueError("degree reduction needs target >= 3")
    verts = g.vertices
    if all(g.degree(v) <= target for v in verts):
        roots = {v: v for v in verts}
        ports = {(v, u): v for v in verts for u in g.neighbors(v)}
        return ReducedGraph(g, roots, ports, {})
    out = CatalogGraph(max_degree=target, seed=g._rng.getrandbits(64))
    roots = {}
    ports = {}
    trees = {}
    per_leaf = target - 1
    for v in verts:
        src = g.catalog(v)
        cat = Catalog.from_sorted(((e.key, e.value) for e in src),
                                  seed=out._rng.getrandbits(64))
        nbrs = g.neighbors(v)
        if len(nbrs) <= target:
            out.add_vertex(v, catalog=cat)
            roots[v] = v
            for u in nbrs:
                ports[(v, u)] = v
            continue
        leaves = 2
        while leaves * per_leaf < len(nbrs):
            leaves *= 2
        index = {}
        for i in range(1, 2 * leaves):
            name = v if i == 1 else (v, i)
            out.add_vertex(name, catalog=cat)
            index[name] = i
        names = {i: n for n, i in index.items()}
        for i in range(2, 2 * leaves):
            out.add_edge(names[i // 2], names[i])
        for j, u in enumerate(nbrs):
            ports[(v, u)] = names[leaves + j // per_leaf]
        roots[v] = v
        trees[v] = index
    for v, u in g.edges:
        out.add_edge(ports[(v, u)], ports[(u, v)])
    return ReducedGraph(out, roots, ports, trees)


def _parse_key(token):
    try:
        return int(token)
    except ValueError:
        return float(token)


def parse_graph(lines, max_degree=3, seed=0):
    """Parse the line format ``v <id> <k1> <k2> ...`` / ``e <id> <id>``."""
    vertices = []
    edges = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] == "v" and len(parts) >= 2:
                vertices.append(
                    (parts[1], [check_key(_parse_key(t)) for t in parts[2:]]))
            elif parts[0] == "e" and len(parts) == 3:
                edges.append((parts[1], parts[2]))
            else:
                raise GraphError("expected 'v <id> <keys...>' or 'e <id> <id>'")
        except (ValueError, TypeError) as exc:
            raise GraphError(f"line {lineno}: {exc}") from None
    return graph_build(vertices, edges, max_degree=max_degree, seed=seed)


def load_graph(path, max_degree=3, seed=0):
    with open(path) as f:
        return parse_graph(f, max_degree=max_degree, seed=seed)


def random_walk(g, length, rng):
    """A random walk of at most ``length`` vertices (stops at dead ends)."""
    verts = g.vertices
    v = rng.choice(verts)
    walk = [v]
    prev = None
    for _ in itertools.repeat(None, length - 1):
        nbrs = g.neighbors(v)
        if not nbrs:
            break
        choices = [u for u in nbrs if u != prev] or nbrs
        prev, v = v, rng.choice(choices)
        walk.append(v)
    return walk
