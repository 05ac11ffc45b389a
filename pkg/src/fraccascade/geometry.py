"""Dynamic planar point set with staircase and nearest-neighbor queries.

Points live in the leaves of a weight-balanced binary tree ordered by
``(x, id)``.  Every tree node is a vertex of a :class:`CatalogGraph` whose
catalog holds the y-values of the points below it, and every parent/child
link is a graph edge, so a root-to-leaf walk that tracks the position of a
y-value is exactly a cascaded path search.

All four quadrants are answered by one south-west routine working on a
sign-flipped view: ``x' = sx * x`` and ``y' = sy * y``.  Flipping x swaps
the roles of the two children; flipping y turns predecessor searches into
successor searches.
"""

import enum
import math
import operator
from dataclasses import dataclass, field

from .cascade import CatalogGraph
from .keys import MINUS_INF, PLUS_INF

__all__ = [
    "Point",
    "Quadrant",
    "Metric",
    "MaximaSet",
    "QueryStats",
    "XTree",
    "brute_staircase",
    "read_points",
    "parse_points",
]

INF = math.inf


@dataclass(frozen=True, slots=True)
class Point:
    x: float
    y: float
    id: int

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point {self.id!r} has a non-finite coordinate")


class Quadrant(enum.Enum):
    """Closed quadrant of a query point, with its reflection signs."""

    NE = (-1, -1)
    NW = (1, -1)
    SW = (1, 1)
    SE = (-1, 1)

    @property
    def sx(self):
        return self.value[0]

    @property
    def sy(self):
        return self.value[1]

    def contains(self, q, s):
        return self.sx * s.x <= self.sx * q[0] and self.sy * s.y <= self.sy * q[1]


class Metric:
    """Minkowski distance of order ``p`` in [1, inf]."""

    def __init__(self, p=2):
        p = float(p)
        if math.isnan(p) or p < 1:
            raise ValueError(f"Minkowski order must be in [1, inf], got {p}")
        self.p = p

    def __repr__(self):
        return f"Metric(p={self.p:g})"

    def distance(self, q, s):
        dx = abs(q[0] - s[0])
        dy = abs(q[1] - s[1])
        p = self.p
        if p == 1.0:
            return dx + dy
        if p == 2.0:
            return math.hypot(dx, dy)
        hi, lo = (dx, dy) if dx >= dy else (dy, dx)
        if p == INF or hi == 0.0:
            return hi
        # scaled form: never overflows and never drops below the max-norm
        return hi * (1.0 + (lo / hi) ** p) ** (1.0 / p)


@dataclass
class MaximaSet:
    """Staircase of one quadrant, ordered by increasing reflected x."""

    quadrant: Quadrant
    points: list

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def is_staircase(self):
        sx, sy = self.quadrant.value
        pts = self.points
        return all(sx * a.x < sx * b.x and sy * a.y > sy * b.y
                   for a, b in zip(pts, pts[1:]))


@dataclass
class QueryStats:
    candidates: int = 0
    steps: int = 0
    staircases: dict = field(default_factory=dict)


def _as_xy(q):
    if isinstance(q, Point):
        return (q.x, q.y)
    x, y = q
    return (float(x), float(y))


class _Node:
    __slots__ = ("left", "right", "parent", "size", "point", "lo", "hi")

    def __init__(self, parent=None):
        self.left = None
        self.right = None
        self.parent = parent
        self.size = 0
        self.point = None
        self.lo = None
        self.hi = None

    def __repr__(self):
        return f"<_Node size={self.size} lo={self.lo} hi={self.hi}>"


_by_y = operator.itemgetter(0)


class XTree:
    """Dynamic point set answering staircase and nearest-neighbor queries.

    ``alpha`` is the weight-balance bound: a subtree is rebuilt as soon as
    one child holds more than ``alpha`` of its points.
    """

    def __init__(self, points=(), alpha=0.7, seed=0):
        if not 0.5 < alpha < 1:
            raise ValueError("alpha must lie in (0.5, 1)")
        self.alpha = alpha
        self.graph = CatalogGraph(max_degree=3, seed=seed)
        self.root = None
        self._leaves = {}
        self.rebuilds = 0
        points = list(points)
        if points:
            ids = {p.id for p in points}
            if len(ids) != len(points):
                raise ValueError("duplicate point ids")
            pts = sorted(points, key=lambda p: (p.x, p.id))
            self.root, _ = self._build(pts, None)

    def __len__(self):
        return 0 if self.root is None else self.root.size

    def __contains__(self, pid):
        return pid in self._leaves

    def points(self):
        return [leaf.point for leaf in self._leaf_nodes()]

    def get(self, pid):
        return self._leaves[pid].point

    # -- construction -------------------------------------------------------

    def _build(self, pts, parent):
        """Build a balanced subtree over ``pts`` (sorted by (x, id))."""
        node = _Node(parent)
        ys = self._build_into(node, pts)
        self.graph.add_vertex(node, items=ys)
        self._link_children(node)
        return node, ys

    def _build_into(self, node, pts):
        node.size = len(pts)
        node.lo = (pts[0].x, pts[0].id)
        node.hi = (pts[-1].x, pts[-1].id)
        if len(pts) == 1:
            p = pts[0]
            node.point = p
            self._leaves[p.id] = node
            return [(p.y, p)]
        mid = len(pts) // 2
        node.point = None
        node.left, ly = self._build(pts[:mid], node)
        node.right, ry = self._build(pts[mid:], node)
        ys = ly + ry
        ys.sort(key=_by_y)
        return ys

    def _link_children(self, node):
        if node.point is None:
            self.graph.add_edge(node, node.left)
            self.graph.add_edge(node, node.right)

    def _rebuild(self, node):
        """Rebuild everything below ``node``; its own catalog is kept."""
        pts = []
        stack = [node]
        doomed = []
        while stack:
            n = stack.pop()
            if n.point is not None:
                pts.append(n.point)
            else:
                stack.append(n.right)
                stack.append(n.left)
            if n is not node:
                doomed.append(n)
        for n in doomed:
            self.graph.remove_vertex(n)
        pts.sort(key=lambda p: (p.x, p.id))
        self._build_into(node, pts)
        self._link_children(node)
        self.rebuilds += 1

    def _rebalance(self, path):
        alpha = self.alpha
        for n in path:
            if n.point is None and max(n.left.size, n.right.size) > alpha * n.size:
                self._rebuild(n)
                return

    # -- updates ------------------------------------------------------------

    def insert(self, p):
        """Add point ``p``; y is inserted into every catalog on its path."""
        if p.id in self._leaves:
            raise KeyError(f"point id {p.id!r} already present")
        key = (p.x, p.id)
        g = self.graph
        if self.root is None:
            leaf = _Node()
            leaf.size = 1
            leaf.point = p
            leaf.lo = leaf.hi = key
            g.add_vertex(leaf, items=[(p.y, p)])
            self.root = leaf
            self._leaves[p.id] = leaf
            return
        path = []
        node = self.root
        while node.point is None:
            path.append(node)
            node = node.left if key <= node.left.hi else node.right
        path.append(node)
        for n in path:
            g.insert(n, p.y, p)
            n.size += 1
            if key < n.lo:
                n.lo = key
            if key > n.hi:
                n.hi = key
        # the old leaf turns into an internal node over two new leaves
        old = node.point
        node.point = None
        a = self._new_leaf(old, node)
        b = self._new_leaf(p, node)
        if key < (old.x, old.id):
            a, b = b, a
        node.left, node.right = a, b
        self._link_children(node)
        self._rebalance(path)

    def _new_leaf(self, p, parent):
        leaf = _Node(parent)
        leaf.size = 1
        leaf.point = p
        leaf.lo = leaf.hi = (p.x, p.id)
        self.graph.add_vertex(leaf, items=[(p.y, p)])
        self._leaves[p.id] = leaf
        return leaf

    def delete(self, pid):
        """Remove the point with id ``pid`` and return it."""
        try:
            leaf = self._leaves.pop(pid)
        except KeyError:
            raise KeyError(f"no point with id {pid!r}") from None
        p = leaf.point
        g = self.graph
        if leaf is self.root:
            g.remove_vertex(leaf)
            self.root = None
            return p
        path = []
        n = leaf.parent
        while n is not None:
            path.append(n)
            n = n.parent
        path.reverse()
        for n in path:
            g.delete(n, self._find(n, p))
            n.size -= 1
        parent = leaf.parent
        sib = parent.right if parent.left is leaf else parent.left
        g.remove_vertex(leaf)
        g.remove_vertex(sib)
        if sib.point is not None:
            parent.point = sib.point
            parent.left = parent.right = None
            self._leaves[sib.point.id] = parent
        else:
            parent.left, parent.right = sib.left, sib.right
            parent.left.parent = parent.right.parent = parent
            self._link_children(parent)
        for n in reversed(path):
            if n.point is not None:
                n.lo = n.hi = (n.point.x, n.point.id)
            else:
                n.lo = n.left.lo
                n.hi = n.right.hi
        self._rebalance(path)
        return p

    def _find(self, node, p):
        e = self.graph.catalog(node).pred(p.y)
        while e is not MINUS_INF and e.value is not p:
            e = e.prev[0]
            if e.catalog is None or e.key != p.y:
                break
        if e is MINUS_INF or e.value is not p:
            raise AssertionError(f"point {p.id!r} missing from a catalog")
        return e

    # -- south-west machinery on a reflected view ---------------------------

    def _staircase(self, q, sx, sy, stats):
        if self.root is None:
            return []
        g = self.graph
        qx = sx * q[0]
        qy = q[1]
        if sy > 0:
            step = g.step
            root_pos = g.catalog(self.root).pred(qy)
            empty = MINUS_INF
        else:
            step = g.step_succ
            root_pos = g.catalog(self.root).succ(qy)
            empty = PLUS_INF

        def xmax(n):
            return n.hi[0] if sx > 0 else -n.lo[0]

        # canonical subtrees of {x' <= qx'}, left to right
        canon = []
        node = self.root
        pos = root_pos
        steps = 0
        while node.point is None:
            near, far = (node.left, node.right) if sx > 0 else (node.right, node.left)
            if xmax(near) <= qx:
                a, c1 = step(node, near, pos, qy)
                canon.append((near, a))
                pos, c2 = step(node, far, pos, qy)
                node = far
            else:
                a, c1 = (None, 0)
                pos, c2 = step(node, near, pos, qy)
                node = near
            steps += c1 + c2
        if sx * node.point.x <= qx:
            canon.append((node, pos))

        def better(b, c):
            # higher y', then larger x', then smaller id
            if b is None:
                return c
            if sy * c.y != sy * b.y:
                return c if sy * c.y > sy * b.y else b
            if sx * c.x != sx * b.x:
                return c if sx * c.x > sx * b.x else b
            return c if c.id < b.id else b

        def top_of(e):
            # best point among the run of equal y-keys ending (or starting) at e
            best = e.value
            k = e.key
            nb = e.prev[0] if sy > 0 else e.next[0]
            while nb is not None and nb.catalog is not None and nb.key == k:
                best = better(best, nb.value)
                nb = nb.prev[0] if sy > 0 else nb.next[0]
            return best

        def highest_right_of(sub, pos, bound):
            nonlocal steps
            best = None
            node = sub
            while node.point is None:
                near, far = (node.left, node.right) if sx > 0 else (node.right, node.left)
                if xmax(near) > bound:
                    a, c1 = step(node, far, pos, qy)
                    if a is not empty:
                        best = better(best, top_of(a))
                    pos, c2 = step(node, near, pos, qy)
                    node = near
                else:
                    c1 = 0
                    pos, c2 = step(node, far, pos, qy)
                    node = far
                steps += c1 + c2
            if pos is not empty and sx * node.point.x > bound:
                best = better(best, node.point)
            return best

        cands = []
        thresh = -INF
        for sub, pos in reversed(canon):
            if pos is empty:
                continue
            c = top_of(pos)
            first = sy * c.y
            while c is not None and sy * c.y >= thresh:
                cands.append(c)
                if sub.point is not None:
                    break
                c = highest_right_of(sub, pos, sx * c.x)
            if first > thresh:
                thresh = first
        if stats is not None:
            stats.steps += steps

        # exact dominance filter: scan from the corner outwards
        cands.sort(key=lambda s: (-sx * s.x, -sy * s.y, s.id))
        out = []
        best_y = -INF
        for s in cands:
            if sy * s.y > best_y:
                out.append(s)
                best_y = sy * s.y
        out.reverse()
        return out

    # -- queries ------------------------------------------------------------

    def dominated_maxima(self, q, quad=Quadrant.SW, stats=None):
        """Staircase of the points in closed quadrant ``quad`` of ``q``."""
        q = _as_xy(q)
        if any(math.isnan(c) for c in q):
            raise ValueError("query coordinates must not be NaN")
        quad = Quadrant[quad] if isinstance(quad, str) else quad
        pts = self._staircase(q, quad.sx, quad.sy, stats)
        if stats is not None:
            stats.candidates += len(pts)
            stats.staircases[quad.name] = len(pts)
        return MaximaSet(quad, pts)

    def maxima_count(self):
        """Number of points not dominated toward (+inf, +inf)."""
        return len(self._staircase((INF, INF), 1, 1, None))

    def nearest_neighbor(self, q, metric=None, stats=None):
        """Closest point to ``q`` (ties: smallest id), or ``None`` if empty.

        The four staircases supply the candidates.  A closed box of the
        winning radius is then scanned so that exact distance ties with
        dominated points still resolve to the smallest id.
        """
        if self.root is None:
            return None
        metric = metric or Metric(2)
        q = _as_xy(q)
        dist = metric.distance
        best = None
        best_key = None
        for quad in Quadrant:
            for s in self.dominated_maxima(q, quad, stats):
                k = (dist(q, (s.x, s.y)), s.id)
                if best_key is None or k < best_key:
                    best, best_key = s, k
        d = best_key[0]
        pad = 1e-9 * (abs(q[0]) + abs(q[1]) + d) + 1e-300
        r = d + pad
        for s in self.report_box(q[0] - r, q[0] + r, q[1] - r, q[1] + r, stats):
            k = (dist(q, (s.x, s.y)), s.id)
            if k < best_key:
                best, best_key = s, k
        return best

    def report_box(self, xlo, xhi, ylo, yhi, stats=None):
        """All points with ``xlo <= x <= xhi`` and ``ylo <= y <= yhi``."""
        out = []
        if self.root is None or xlo > xhi or ylo > yhi:
            return out
        g = self.graph
        steps = 0
        stack = [(self.root, g.catalog(self.root).succ(ylo))]
        while stack:
            node, pos = stack.pop()
            if pos is PLUS_INF or node.hi[0] < xlo or node.lo[0] > xhi:
                continue
            if xlo <= node.lo[0] and node.hi[0] <= xhi:
                e = pos
                while e is not None and e.key <= yhi:
                    out.append(e.value)
                    e = e.next[0]
                continue
            for child in (node.right, node.left):
                a, c = g.step_succ(node, child, pos, ylo)
                steps += c
                stack.append((child, a))
        if stats is not None:
            stats.steps += steps
        return out

    # -- audit --------------------------------------------------------------

    def _leaf_nodes(self):
        out = []
        stack = [self.root] if self.root is not None else []
        while stack:
            n = stack.pop()
            if n.point is not None:
                out.append(n)
            else:
                stack.append(n.right)
                stack.append(n.left)
        return out

    def check_invariants(self, bridges=False):
        """Full audit: order, sizes, balance, catalog contents, optionally bridges."""
        if self.root is None:
            assert not self._leaves and len(self.graph) == 0
            return
        nodes = 0

        def walk(n, parent):
            nonlocal nodes
            nodes += 1
            assert n.parent is parent
            if n.point is not None:
                assert n.size == 1
                assert self._leaves[n.point.id] is n
                pts = [n.point]
            else:
                assert n.left.parent is n and n.right.parent is n
                pts = walk(n.left, n) + walk(n.right, n)
                assert n.size == n.left.size + n.right.size
                assert max(n.left.size, n.right.size) <= self.alpha * n.size
                assert n.left.hi < n.right.lo
            assert n.size == len(pts)
            assert n.lo == (pts[0].x, pts[0].id) and n.hi == (pts[-1].x, pts[-1].id)
            cat = self.graph.catalog(n)
            cat.check_invariants()
            got = sorted((e.key, e.value.id) for e in cat)
            assert got == sorted((p.y, p.id) for p in pts), "catalog mismatch"
            return pts

        pts = walk(self.root, None)
        keys = [(p.x, p.id) for p in pts]
        assert keys == sorted(keys)
        assert len(pts) == len(self._leaves)
        assert nodes == len(self.graph)
        if bridges:
            assert not self.graph.check_bridges()


def brute_staircase(points, q, quad=Quadrant.SW):
    """Quadratic-time staircase oracle, same ordering as :class:`MaximaSet`."""
    q = _as_xy(q)
    quad = Quadrant[quad] if isinstance(quad, str) else quad
    sx, sy = quad.value
    inside = [s for s in points if quad.contains(q, s)]
    keep = []
    for s in inside:
        dominated = False
        for t in inside:
            if t is s:
                continue
            if sx * t.x >= sx * s.x and sy * t.y >= sy * s.y:
                if (t.x, t.y) != (s.x, s.y) or t.id < s.id:
                    dominated = True
                    break
        if not dominated:
            keep.append(s)
    keep.sort(key=lambda s: sx * s.x)
    return keep


def parse_points(lines):
    """Parse ``x,y`` lines; ``#`` starts a comment; ids follow data order."""
    out = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [t.strip() for t in line.split(",")]
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'x,y', got {raw.strip()!r}")
        try:
            x, y = float(parts[0]), float(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: bad number in {raw.strip()!r}") from None
        try:
            out.append(Point(x, y, len(out)))
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
    return out


def read_points(path):
    with open(path) as f:
        return parse_points(f)
