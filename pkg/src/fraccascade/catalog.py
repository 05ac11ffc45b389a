"""Ordered catalogs backed by a doubly linked skip list.

A :class:`Catalog` is a sorted multiset of keys, each carrying an optional
payload.  Every stored element is its own handle (:class:`Element`), so a
caller can keep a reference and later delete it in expected O(1) time or
start a finger search from it.
"""

import random

from .keys import MINUS_INF, PLUS_INF, check_key, check_query

__all__ = [
    "Catalog",
    "Element",
    "DeadHandleError",
    "FingerSearchError",
]

MAX_LEVEL = 48


class DeadHandleError(LookupError):
    """Raised when a deleted element handle is used."""


class FingerSearchError(ValueError):
    """Raised when a finger search starts on the wrong side of its target."""


class Element:
    """A stored catalog element; doubles as a stable handle.

    ``next[i]``/``prev[i]`` link the element into level ``i``.  ``catalog``
    is the owning catalog while the element is live and ``None`` after it
    has been deleted.
    """

    __slots__ = ("key", "value", "next", "prev", "catalog")

    def __init__(self, key, value, height, catalog):
        self.key = key
        self.value = value
        self.next = [None] * height
        self.prev = [None] * height
        self.catalog = catalog

    @property
    def alive(self):
        return self.catalog is not None

    @property
    def height(self):
        return len(self.next)

    def deref(self):
        """Return the key, raising :class:`DeadHandleError` once deleted."""
        if self.catalog is None:
            raise DeadHandleError("element was deleted")
        return self.key

    def __repr__(self):
        state = "" if self.catalog is not None else " dead"
        return f"<Element {self.key!r}{state}>"


class Catalog:
    """Sorted multiset with handles, predecessor search and finger search.

    Equal keys are kept in insertion order (a new copy goes after the
    existing ones).  Level coins come from a private ``random.Random``
    seeded at construction, so structure and step counts are reproducible.
    """

    def __init__(self, keys=(), seed=0):
        self._rng = random.Random(seed)
        self._head = Element(MINUS_INF, None, MAX_LEVEL, self)
        self._level = 1
        self._size = 0
        self._last = None
        items = sorted(((check_key(k), None) for k in keys), key=_first)
        if items:
            self._bulk_load(items)

    @classmethod
    def from_sorted(cls, items, seed=0):
        """Build from ``(key, value)`` pairs already sorted by key, in O(n)."""
        cat = cls(seed=seed)
        items = [(check_key(k), v) for k, v in items]
        for (a, _), (b, _) in zip(items, items[1:]):
            if b < a:
                raise ValueError("from_sorted() needs keys in non-decreasing order")
        if items:
            cat._bulk_load(items)
        return cat

    def _bulk_load(self, items):
        head = self._head
        tails = [head] * MAX_LEVEL
        top = 1
        height = self._height
        for key, value in items:
            h = height()
            node = Element(key, value, h, self)
            for i in range(h):
                t = tails[i]
                t.next[i] = node
                node.prev[i] = t
                tails[i] = node
            if h > top:
                top = h
        self._level = top
        self._size = len(items)
        self._last = tails[0]

    def _height(self):
        bits = self._rng.getrandbits(MAX_LEVEL - 1)
        h = 1
        while bits & 1:
            h += 1
            bits >>= 1
        return h

    def __len__(self):
        return self._size

    def __iter__(self):
        node = self._head.next[0]
        while node is not None:
            yield node
            node = node.next[0]

    def __reversed__(self):
        node = self._last
        head = self._head
        while node is not None and node is not head:
            yield node
            node = node.prev[0]

    def __repr__(self):
        return f"Catalog({self.keys()!r})"

    def keys(self):
        return [e.key for e in self]

    @property
    def head(self):
        """The internal -inf node; finger searches may start from it."""
        return self._head

    def first(self):
        node = self._head.next[0]
        return PLUS_INF if node is None else node

    def last(self):
        return MINUS_INF if self._last is None else self._last

    def insert(self, key, value=None):
        """Insert ``key`` after any equal keys and return its handle."""
        key = check_key(key)
        h = self._height()
        node = Element(key, value, h, self)
        if h > self._level:
            self._level = h
        x = self._head
        for i in range(self._level - 1, -1, -1):
            nxt = x.next[i]
            while nxt is not None and nxt.key <= key:
                x = nxt
                nxt = x.next[i]
            if i < h:
                node.next[i] = nxt
                node.prev[i] = x
                x.next[i] = node
                if nxt is not None:
                    nxt.prev[i] = node
        if node.next[0] is None:
            self._last = node
        self._size += 1
        return node

    def delete(self, handle):
        """Unlink ``handle`` and return its key; other handles stay valid."""
        self._check_owned(handle)
        head = self._head
        for i in range(len(handle.next)):
            p = handle.prev[i]
            n = handle.next[i]
            p.next[i] = n
            if n is not None:
                n.prev[i] = p
        if self._last is handle:
            p = handle.prev[0]
            self._last = None if p is head else p
        while self._level > 1 and head.next[self._level - 1] is None:
            self._level -= 1
        self._size -= 1
        handle.catalog = None
        handle.next = handle.prev = ()
        return handle.key

    def _check_owned(self, handle):
        if not isinstance(handle, Element):
            raise TypeError(f"expected an Element handle, got {handle!r}")
        if handle.catalog is None:
            raise DeadHandleError(f"{handle!r} was already deleted")
        if handle.catalog is not self or handle is self._head:
            raise ValueError(f"{handle!r} does not belong to this catalog")

    # -- searches -----------------------------------------------------------

    def pred(self, x):
        """Largest element with key <= x, or ``MINUS_INF``."""
        return self.search(x)[0]

    def search(self, x):
        """Top-down predecessor search; returns ``(pred, steps)``."""
        check_query(x)
        node = self._head
        steps = 1
        for i in range(self._level - 1, -1, -1):
            nxt = node.next[i]
            while nxt is not None and nxt.key <= x:
                node = nxt
                nxt = node.next[i]
                steps += 1
            steps += 1
        return (MINUS_INF if node is self._head else node), steps

    def succ(self, x):
        """Smallest element with key >= x, or ``PLUS_INF``."""
        check_query(x)
        node = self._succ_node(x)
        return PLUS_INF if node is None else node

    def _succ_node(self, x):
        node = self._head
        for i in range(self._level - 1, -1, -1):
            nxt = node.next[i]
            while nxt is not None and nxt.key < x:
                node = nxt
                nxt = node.next[i]
        return node.next[0]

    def finger_search(self, start, x):
        """Forward finger search for ``pred(x)`` from ``start``.

        ``start`` is a live element of this catalog with key <= x, or
        ``MINUS_INF``.  Returns ``(pred, steps)`` where ``steps`` counts
        pointer moves and level changes; it grows with log of the rank
        distance covered, not with the catalog size.
        """
        check_query(x)
        if start is MINUS_INF:
            start = self._head
        else:
            self._check_owned(start)
            if start.key > x:
                raise FingerSearchError(
                    f"finger at {start.key!r} is past the target {x!r}")
        return self._finger(start, x)

    def _finger(self, node, x):
        level = self._level
        lvl = 0
        steps = 1
        while True:
            nxt = node.next
            while lvl + 1 < len(nxt) and lvl + 1 < level:
                up = nxt[lvl + 1]
                if up is None or up.key > x:
                    break
                lvl += 1
                steps += 1
            step = nxt[lvl]
            if step is None or step.key > x:
                break
            node = step
            steps += 1
        for i in range(lvl - 1, -1, -1):
            steps += 1
            step = node.next[i]
            while step is not None and step.key <= x:
                node = step
                step = node.next[i]
                steps += 1
        return (MINUS_INF if node is self._head else node), steps

    def finger_search_back(self, start, x):
        """Backward finger search for ``succ(x)`` from ``start``.

        Mirror image of :meth:`finger_search`: ``start`` has key >= x, or
        is ``PLUS_INF`` (meaning: start from the last element).
        """
        check_query(x)
        if start is PLUS_INF:
            if self._last is None or self._last.key < x:
                return PLUS_INF, 1
            start = self._last
        else:
            self._check_owned(start)
            if start.key < x:
                raise FingerSearchError(
                    f"finger at {start.key!r} is before the target {x!r}")
        return self._finger_back(start, x)

    def _finger_back(self, node, x):
        head = self._head
        lvl = 0
        steps = 1
        while True:
            prv = node.prev
            while lvl + 1 < len(prv):
                up = prv[lvl + 1]
                if up is head or up.key < x:
                    break
                lvl += 1
                steps += 1
            step = prv[lvl]
            if step is head or step.key < x:
                break
            node = step
            steps += 1
        for i in range(lvl - 1, -1, -1):
            steps += 1
            step = node.prev[i]
            while step is not head and step.key >= x:
                node = step
                step = node.prev[i]
                steps += 1
        return node, steps

    # -- audit --------------------------------------------------------------

    def check_invariants(self):
        """Raise ``AssertionError`` if any level is mis-linked or unsorted."""
        head = self._head
        count = 0
        prev_key = None
        for node in self:
            assert node.catalog is self
            if prev_key is not None:
                assert prev_key <= node.key, "catalog out of order"
            prev_key = node.key
            count += 1
        assert count == self._size, "size mismatch"
        for i in range(MAX_LEVEL):
            p = head
            node = head.next[i]
            if i >= self._level:
                assert node is None, "link above the current level"
            while node is not None:
                assert node.prev[i] is p, "broken back link"
                assert len(node.next) > i
                p = node
                node = node.next[i]
        if self._size:
            assert self._last is not None and self._last.next[0] is None
        else:
            assert self._last is None


def _first(pair):
    return pair[0]
