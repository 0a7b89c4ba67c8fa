"""Engine-agnostic graph exploration.

An *engine* exposes hashable nodes and the following methods::

    initial(allowed)            -> [(node, entry)]
    successors(node, allowed)   -> [(label, node, entry)]
    states(node)                -> tuple of state indices
    meets(node_or_entry, zcons) -> bool
    restrict(node, zcons)       -> node | None
    divergent(node)             -> bool
    deadlock(node)              -> None | witness data
    concretize(path, final, tail) -> Run

``allowed`` maps a state vector to ``None`` (no restriction), ``[]``
(forbidden) or a list of convex pieces of the formula clock.  A path is a
list of ``(label, node)`` pairs whose first label is ``None``.
"""

from __future__ import annotations

from collections import deque


class SearchLimit(Exception):
    """The exploration exceeded its node budget."""


class Graph:
    def __init__(self, keep_edges: bool = True):
        self.ids: dict = {}
        self.nodes: list = []
        self.parent: list = []  # (parent id, label) or None for roots
        self.prefix: dict = {}  # root id -> path leading to it
        self.succ: list | None = [] if keep_edges else None
        self.hit = None
        self.arrival = None  # (via, label) of the arrival being visited

    def __len__(self):
        return len(self.nodes)

    def add(self, node, parent=None, label=None, prefix=None):
        nid = self.ids.get(node)
        if nid is not None:
            return nid, False
        nid = len(self.nodes)
        self.ids[node] = nid
        self.nodes.append(node)
        self.parent.append(None if parent is None else (parent, label))
        if self.succ is not None:
            self.succ.append([])
        if parent is None:
            self.prefix[nid] = prefix if prefix is not None else [(None, node)]
        return nid, True

    def path(self, nid: int) -> list:
        rev = []
        while self.parent[nid] is not None:
            pid, label = self.parent[nid]
            rev.append((label, self.nodes[nid]))
            nid = pid
        return list(self.prefix[nid]) + rev[::-1]

    def arrival_path(self, nid: int) -> list:
        """Path through the arrival currently being visited."""
        if self.arrival is None:
            return self.path(nid)
        via, label = self.arrival
        return self.path(via) + [(label, self.nodes[nid])]

    def hit_path(self) -> list:
        nid, _value, via, label = self.hit
        if via is None:
            # a start node; ``label`` holds the prefix it was offered with
            return list(label) if label is not None else self.path(nid)
        return self.path(via) + [(label, self.nodes[nid])]

    def find_cycle(self, within=None):
        """A lasso ``(path, k)`` where ``path[k:]`` loops back to ``path[k]``.

        Uses an iterative Tarjan pass over the stored edges; ``within`` may
        restrict the search to a set of node ids.
        """
        if self.succ is None:
            raise ValueError("graph was explored without edges")
        succ = self.succ
        n = len(self.nodes)
        index = [-1] * n
        low = [0] * n
        on = [False] * n
        stack: list[int] = []
        counter = 0
        for root in range(n):
            if index[root] != -1 or (within is not None and root not in within):
                continue
            work = [(root, 0)]
            index[root] = low[root] = counter
            counter += 1
            stack.append(root)
            on[root] = True
            while work:
                v, pos = work[-1]
                edges = succ[v]
                if pos < len(edges):
                    work[-1] = (v, pos + 1)
                    w = edges[pos][1]
                    if within is not None and w not in within:
                        continue
                    if w == v:
                        return self._lasso(v, {v})
                    if index[w] == -1:
                        index[w] = low[w] = counter
                        counter += 1
                        stack.append(w)
                        on[w] = True
                        work.append((w, 0))
                    elif on[w]:
                        low[v] = min(low[v], index[w])
                    continue
                work.pop()
                if work:
                    u = work[-1][0]
                    low[u] = min(low[u], low[v])
                if low[v] == index[v]:
                    comp = set()
                    while True:
                        w = stack.pop()
                        on[w] = False
                        comp.add(w)
                        if w == v:
                            break
                    if len(comp) > 1:
                        return self._lasso(v, comp)
        return None

    def _lasso(self, v: int, comp: set):
        # shortest loop v -> ... -> v inside the component
        back: dict = {}
        queue = deque([v])
        found = None
        while queue and found is None:
            u = queue.popleft()
            for label, w in self.succ[u]:
                if w not in comp:
                    continue
                if w == v:
                    found = (u, label)
                    break
                if w not in back:
                    back[w] = (u, label)
                    queue.append(w)
        u, label = found
        loop = [(label, self.nodes[v])]
        while u != v:
            pu, lu = back[u]
            loop.append((lu, self.nodes[u]))
            u = pu
        prefix = self.path(v)
        return prefix + loop[::-1], len(prefix) - 1


def explore(engine, allowed=None, starts=None, expand_if=None, visit=None,
            keep_edges: bool = True, limit: int | None = None, subsume=None) -> Graph:
    """Breadth-first exploration.

    ``starts`` is a list of ``(prefix, node, entry)``; by default the engine's
    initial nodes.  ``visit(graph, nid, entry, new)`` is called for every
    arrival and may return a non-None value to stop; ``graph.hit`` is then
    ``(nid, value, via, label)`` and :meth:`Graph.hit_path` gives the path
    through that very arrival.  Nodes failing ``expand_if`` are not expanded.

    ``subsume(node)`` returning True marks a new node as covered by one seen
    earlier: it is recorded and visited but not expanded.  Only sound for
    searches whose targets are upward closed (reachability, not cycles).
    """
    g = Graph(keep_edges)
    if starts is None:
        starts = [(None, n, e) for n, e in engine.initial(allowed)]
    queue = deque()
    for prefix, node, entry in starts:
        nid, new = g.add(node, prefix=prefix)
        if new and (subsume is None or not subsume(node)):
            queue.append(nid)
        if visit is not None:
            g.arrival = None
            hit = visit(g, nid, entry, new)
            if hit is not None:
                g.hit = (nid, hit, None, prefix)
                return g
    while queue:
        nid = queue.popleft()
        node = g.nodes[nid]
        if expand_if is not None and not expand_if(node):
            continue
        for label, nxt, entry in engine.successors(node, allowed):
            mid, new = g.add(nxt, nid, label)
            if keep_edges:
                g.succ[nid].append((label, mid))
            if new:
                if subsume is None or not subsume(nxt):
                    queue.append(mid)
                if limit is not None and len(g) > limit:
                    raise SearchLimit(f"more than {limit} nodes")
            if visit is not None:
                g.arrival = (nid, label)
                hit = visit(g, mid, entry, new)
                if hit is not None:
                    g.hit = (mid, hit, nid, label)
                    return g
    return g


def reach(engine, target, allowed=None, expand_if=None):
    """Path to the first node whose arrival satisfies ``target(node, entry)``."""

    def visit(g, nid, entry, new):
        return True if target(g.nodes[nid], entry) else None

    g = explore(engine, allowed, expand_if=expand_if, visit=visit, keep_edges=False)
    if g.hit is None:
        return None
    return g.hit_path()
