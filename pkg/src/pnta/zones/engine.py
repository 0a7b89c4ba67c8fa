"""Symbolic zone-graph engine for one network instantiation.

A node is ``(states, zone bytes, piece)``: the state vector, the canonical
time-closed zone over all instance clocks (plus the formula clock ``z`` when
the network has one), and the convex piece of ``z`` the node was restricted
to (an empty tuple when unrestricted).  Zones are stored as raw ``int32``
bytes from :mod:`pnta.zones.kernel`; clocks that are inactive in the current
state vector are freed before extrapolation.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from ..semantics import (
    CONST,
    DIAG,
    EngineLimitation,
    Network,
    RunBuilder,
    _finish,
    active_clocks,
)
from . import kernel as K
from .dbm import DBM, DiagonalUnsupported

NO_PIECE = ()


def _rows_for(clock: int, op: str, q) -> list:
    """Packed DBM rows for ``x_clock op q`` (``clock`` is a DBM index)."""
    q = int(q)
    rows = []
    if op in ("<", "<=", "=="):
        rows.append((clock, 0, K.pack(q, op != "<")))
    if op in (">", ">=", "=="):
        rows.append((0, clock, K.pack(-q, op != ">")))
    return rows


def _as_int(value, what: str) -> int:
    v = Fraction(value)
    if v.denominator != 1:
        raise EngineLimitation(f"{what} {v} is not an integer; scale the model first")
    return int(v)


class ZoneEngine:
    name = "zone"

    def __init__(self, net: Network, bound=None, reduce_inactive: bool = True, pinned=None):
        self.net = net
        self.dim = net.num_clocks + 1
        self.zi = None if net.z is None else net.z + 1
        big = [0] * self.dim
        self.inv_rows: list[list] = []
        self.upper_free: list[list[bool]] = []
        self.tight: list[list] = []
        self.inactive: list[list] = []
        self.trans: dict = {}
        acts = [active_clocks(t) for t in net.templates]
        for idx, (l, _i) in enumerate(net.instances):
            tmpl, off = net.templates[l], net.offset[idx]
            inv_rows, ufree, tight, inact = [], [], [], []
            for s in range(len(tmpl.states)):
                atoms = tmpl.inv[s]
                rows, free_, tt = [], True, []
                if atoms is None:
                    rows = None
                else:
                    for kind, a, op, b in atoms:
                        if kind == DIAG:
                            raise DiagonalUnsupported(f"{tmpl.name}: diagonal invariant in state {tmpl.states[s]}")
                        c = _as_int(b, "constant")
                        big[off + a + 1] = max(big[off + a + 1], c)
                        rows.extend(_rows_for(off + a + 1, op, c))
                        if op in ("<", "<=", "=="):
                            free_ = False
                        if op in ("<=", "=="):
                            tt.append((off + a + 1, c))
                inv_rows.append(rows)
                ufree.append(free_)
                tight.append(tt)
                inact.append(tuple(off + c + 1 for c in range(len(tmpl.clocks)) if c not in acts[l][s])
                             if reduce_inactive else ())
                for t in tmpl.out[s]:
                    grows = []
                    for kind, a, op, b in t.guard:
                        if kind == DIAG:
                            raise DiagonalUnsupported(f"{tmpl.name}: diagonal guard on a transition from {tmpl.states[s]}")
                        c = _as_int(b, "constant")
                        big[off + a + 1] = max(big[off + a + 1], c)
                        grows.extend(_rows_for(off + a + 1, op, c))
                    self.trans[(idx, t.index)] = (
                        K.cons_array(grows),
                        np.array([off + r + 1 for r in t.resets], dtype=K.DTYPE),
                        grows,
                    )
            self.inv_rows.append(inv_rows)
            self.upper_free.append(ufree)
            self.tight.append(tight)
            self.inactive.append(inact)
        # target invariants need the constants above, so compile them after
        for idx, (l, _i) in enumerate(net.instances):
            tmpl = net.templates[l]
            for s in range(len(tmpl.states)):
                for t in tmpl.out[s]:
                    g, r, grows = self.trans[(idx, t.index)]
                    tinv = self.inv_rows[idx][t.target]
                    self.trans[(idx, t.index)] = (g, r, grows, None if tinv is None else K.cons_array(tinv))
        self.bound = bound
        if self.zi is not None:
            q = 0 if bound is None else _as_int(bound[1], "time bound")
            big[self.zi] = q
        self.maxc = np.array(big, dtype=np.int64)
        self._inv_cache: dict = {}
        self._free_cache: dict = {}
        self._piece_cache: dict = {}
        self.initial_states = tuple(net.templates[l].init for l, _ in net.instances)
        self._setup_symmetry(pinned)

    def _setup_symmetry(self, pinned):
        """Instances of one template are interchangeable unless pinned.

        With ``pinned`` set (possibly empty), successors are mapped to a
        representative of their orbit under permutations of the unpinned
        instances of each template.  The edge label then records the
        permutation so witnesses can be mapped back.
        """
        net = self.net
        self.groups: list[list[int]] = []
        self._group_meta: list = []
        if pinned is None:
            return
        pinned = set(pinned)
        by_tmpl: dict = {}
        for idx, (l, _i) in enumerate(net.instances):
            if idx not in pinned:
                by_tmpl.setdefault(l, []).append(idx)
        self.groups = [g for g in by_tmpl.values() if len(g) > 1]
        grouped = {i for g in self.groups for i in g}
        fixed = [0]
        for idx in range(len(net.instances)):
            if idx not in grouped:
                fixed.extend(self._clocks_of(idx))
        if self.zi is not None:
            fixed.append(self.zi)
        self._fixed = np.array(sorted(set(fixed)), dtype=np.intp)
        self._group_meta = []
        for grp in self.groups:
            meta = []
            for j in grp:
                others = [x for g in grp if g != j for x in self._clocks_of(g)]
                meta.append((np.array(self._clocks_of(j), dtype=np.intp), np.array(others, dtype=np.intp)))
            self._group_meta.append(meta)

    def _clocks_of(self, idx: int) -> list[int]:
        off = self.net.offset[idx]
        return [off + c + 1 for c in range(len(self.net.tmpl(idx).clocks))]

    def _canon(self, states, d):
        """``(states, zone, order)``; ``order[p]`` is the old instance at ``p``."""
        if not self.groups:
            return states, d, None
        order = list(range(len(states)))
        fixed = self._fixed
        for grp, meta in zip(self.groups, self._group_meta):
            sts = [states[j] for j in grp]
            shared = {s for s in sts if sts.count(s) > 1}
            keys = {}
            for j, (cs, others) in zip(grp, meta):
                s = states[j]
                if s not in shared:
                    keys[j] = (s, b"", j)
                    continue
                # position-free description of j's clocks in the zone
                rows = d[cs]
                cols = d[:, cs].T
                key = (rows[:, fixed].tobytes() + cols[:, fixed].tobytes()
                       + np.sort(rows[:, others], axis=1).tobytes() + np.sort(cols[:, others], axis=1).tobytes())
                keys[j] = (s, key, j)
            for pos, j in zip(grp, sorted(grp, key=keys.__getitem__)):
                order[pos] = j
        if all(p == j for p, j in enumerate(order)):
            return states, d, None
        return (*self._permute(states, d, order), tuple(order))

    def _permute(self, states, d, order):
        perm = list(range(self.dim))
        for p, j in enumerate(order):
            for a, b in zip(self._clocks_of(p), self._clocks_of(j)):
                perm[a] = b
        d = np.ascontiguousarray(d[np.ix_(perm, perm)])
        return tuple(states[j] for j in order), d

    # -- helpers ------------------------------------------------------------

    def zone(self, node) -> np.ndarray:
        return np.frombuffer(node[1], dtype=K.DTYPE).reshape(self.dim, self.dim)

    def states(self, node):
        return node[0]

    def _inv(self, states):
        arr = self._inv_cache.get(states)
        if arr is None:
            rows = []
            for idx, s in enumerate(states):
                rows.extend(self.inv_rows[idx][s] or ())
            arr = self._inv_cache[states] = K.cons_array(rows)
        return arr

    def _frees(self, states):
        arr = self._free_cache.get(states)
        if arr is None:
            xs = []
            for idx, s in enumerate(states):
                xs.extend(self.inactive[idx][s])
            arr = self._free_cache[states] = np.array(xs, dtype=K.DTYPE)
        return arr

    def _piece(self, zcons) -> np.ndarray:
        arr = self._piece_cache.get(zcons)
        if arr is None:
            rows = []
            for op, q in zcons:
                if self.zi is None:
                    raise ValueError("time-bounded piece on a network without formula clock")
                rows.extend(_rows_for(self.zi, op, _as_int(q, "time bound")))
            arr = self._piece_cache[zcons] = K.cons_array(rows)
        return arr

    def _pieces(self, allowed, states) -> list:
        if allowed is None:
            return [NO_PIECE]
        ps = allowed(states)
        if ps is None:
            return [NO_PIECE]
        return [NO_PIECE if p is None else tuple(p) for p in ps]

    def _close(self, states, entry, piece, canon=False):
        ok, d = K.time_closure(entry, self._piece(piece), self._inv(states), self._frees(states), self.maxc)
        if not ok:
            return None
        order = None
        if canon:
            states, d, order = self._canon(states, d)
            return (states, d.tobytes(), piece), order
        return (states, d.tobytes(), piece)

    # -- engine protocol ----------------------------------------------------

    def initial(self, allowed=None):
        out = []
        states = self.initial_states
        for piece in self._pieces(allowed, states):
            ok, entry = K.enter(K.origin(self.dim), self._piece(piece))
            if not ok:
                continue
            node = self._close(states, entry, piece)
            if node is not None:
                out.append((node, entry))
        return out

    def successors(self, node, allowed=None):
        net = self.net
        states = node[0]
        src = self.zone(node)
        out = []
        for idx, s in enumerate(states):
            for t in net.tmpl(idx).out[s]:
                if not net.eval_guard(states, t.allowed, idx):
                    continue
                g, r, _grows, tinv = self.trans[(idx, t.index)]
                if tinv is None:
                    continue
                ok, entry = K.successor(src, g, r, tinv)
                if not ok:
                    continue
                nstates = states[:idx] + (t.target,) + states[idx + 1:]
                for piece in self._pieces(allowed, nstates):
                    e = entry
                    if piece:
                        ok, e = K.enter(entry, self._piece(piece))
                        if not ok:
                            continue
                    res = self._close(nstates, e, piece, canon=True)
                    if res is not None:
                        nxt, order = res
                        out.append((("sync", idx, t, order, None), nxt, e))
        return out

    def cover(self):
        """A fresh ``subsume`` callback: is a node's zone inside an earlier one?"""
        store: dict = {}

        def covered(node) -> bool:
            key = (node[0], node[2])
            z = np.frombuffer(node[1], dtype=K.DTYPE)
            zs = store.get(key)
            if zs is None:
                store[key] = _ZoneSet(z)
                return False
            if zs.includes(z):
                return True
            zs.add(z)
            return False

        return covered

    def meets(self, x, zcons) -> bool:
        if not zcons:
            return True
        d = self.zone(x) if isinstance(x, tuple) else x
        ok, _ = K.enter(d, self._piece(tuple(zcons)))
        return ok

    def restrict(self, node, zcons):
        ok, entry = K.enter(self.zone(node), self._piece(tuple(zcons)))
        if not ok:
            return None
        return self._close(node[0], entry, NO_PIECE)

    def restrict_arrival(self, node, label, entry, zcons):
        """The arrival ``label``/``entry`` cut down to ``z`` in ``zcons``.

        Returns ``(label, node)`` for a start node that may only be entered
        at such valuations, or None when the entry misses ``zcons``.
        """
        ok, e = K.enter(entry, self._piece(tuple(zcons)))
        if not ok:
            return None
        order = label[3]
        states = node[0]
        if order is not None:
            pre = [None] * len(states)
            for p, j in enumerate(order):
                pre[j] = states[p]
            states = tuple(pre)
        ok, d = K.time_closure(e, self._piece(NO_PIECE), self._inv(states), self._frees(states), self.maxc)
        if not ok:
            return None
        if order is not None:
            states, d = self._permute(states, d, order)
        return (label[:4] + (tuple(zcons),), (states, d.tobytes(), NO_PIECE))

    def divergent(self, node) -> bool:
        states = node[0]
        if not all(self.upper_free[idx][s] for idx, s in enumerate(states)):
            return False
        if self.zi is not None and self.zone(node)[self.zi, 0] < K.INF:
            return False
        return True

    def deadlock(self, node):
        """Extra packed rows selecting deadlocked valuations, or None."""
        net = self.net
        states = node[0]
        faces = []
        for idx, s in enumerate(states):
            faces.extend(self.tight[idx][s])
        if not faces:
            return None
        enabled = []
        for idx, s in enumerate(states):
            off = net.offset[idx]
            tmpl = net.tmpl(idx)
            for t in tmpl.out[s]:
                if not net.eval_guard(states, t.allowed, idx):
                    continue
                _g, _r, grows, _tinv = self.trans[(idx, t.index)]
                rows = list(grows)
                feasible = True
                for kind, a, op, b in tmpl.inv[t.target] or ():
                    if a in t.resets:
                        feasible = feasible and _zero_ok(op, b)
                    else:
                        rows.extend(_rows_for(off + a + 1, op, int(b)))
                if tmpl.inv[t.target] is None:
                    feasible = False
                if feasible:
                    enabled.append(rows)
        base = self.zone(node)
        for x, c in faces:
            d = base.copy()
            if not K.tighten(d, 0, x, K.pack(-c, True)):
                continue
            found = _avoid(d, enabled, 0, [(0, x, K.pack(-c, True))])
            if found is not None:
                return tuple(found)
        return None

    # -- witnesses ----------------------------------------------------------

    def concretize(self, path, final=None, tail=None):
        """Exact run following ``path``.

        ``final`` holds extra packed rows (or ``("z", zcons)``) for the last
        configuration; ``tail`` is as in the discrete engine.
        """
        path, final, tail = self._unpermute(path, final, tail)
        net = self.net
        extra_t = net.z is None
        n = net.num_clocks + (1 if extra_t else 0)
        ti = n  # DBM index of the global time clock
        origin = DBM.zero(n)

        def frac_rows(rows):
            out = []
            for i, j, b in rows:
                v, le = K.unpack(int(b))
                out.append((i, j, (Fraction(v), le)))
            return out

        def piece_rows(piece):
            rows = []
            for op, q in piece:
                rows.extend(_rows_for(ti, op, _as_int(q, "time bound")))
            return frac_rows(rows)

        def inv_rows(states):
            return frac_rows(list(self._inv(states)))

        # forward: exact entry and time-closed zones
        entries, closed = [], []
        label0, node0 = path[0]
        e = origin.tighten(piece_rows(node0[2]))
        entries.append(e)
        closed.append(e.up().tighten(inv_rows(node0[0]) + piece_rows(node0[2])))
        for k in range(1, len(path)):
            label, node = path[k]
            prev = closed[-1]
            if label[0] == "sync":
                idx, t = label[1], label[2]
                g, r, grows, tinv = self.trans[(idx, t.index)]
                e = prev.tighten(frac_rows(grows)).reset([int(x) for x in r])
                e = e.tighten(frac_rows(list(tinv)) + piece_rows(node[2]))
                if len(label) > 4 and label[4]:
                    e = e.tighten(piece_rows(label[4]))
            elif label[0] == "restrict":
                e = prev.tighten(piece_rows(tuple(label[1])))
            else:
                raise ValueError(f"unexpected label {label}")
            if e.is_empty():
                raise AssertionError("zone path is not realizable")
            entries.append(e)
            closed.append(e.up().tighten(inv_rows(node[0]) + piece_rows(node[2])))

        last = closed[-1]
        if final is not None:
            if final and final[0] == "z":
                last = last.tighten(piece_rows(tuple(final[1])))
            elif final and final[0] == "entry":
                last = entries[-1].tighten(piece_rows(tuple(final[1])))
            else:
                last = last.tighten(frac_rows(final))
        if last.is_empty():
            raise AssertionError("final constraint is not realizable on the exact zone")

        # backward: choose the point where each node is left
        points = [None] * len(path)
        entry_pts = [None] * len(path)
        points[-1] = last.pick_point()
        for k in range(len(path) - 1, 0, -1):
            w = DBM.from_point(points[k])
            u = w.down().meet(entries[k]).pick_point()
            entry_pts[k] = u
            label = path[k][0]
            if label[0] == "sync":
                _g, r, grows, _tinv = self.trans[(label[1], label[2].index)]
                reset = {int(x) for x in r}
                fix = []
                for x in range(1, n + 1):
                    if x not in reset:
                        fix.append((x, 0, (u[x - 1], 1)))
                        fix.append((0, x, (-u[x - 1], 1)))
                cand = closed[k - 1].tighten(frac_rows(grows) + fix)
                points[k - 1] = cand.pick_point()
            else:
                points[k - 1] = u
        if not closed[0].contains(points[0]):
            raise AssertionError("backward pass left the initial zone")

        b = RunBuilder(net)
        marks = [0]
        b.delay(points[0][ti - 1])
        for k in range(1, len(path)):
            label = path[k][0]
            if label[0] == "sync":
                b.sync(label[1], label[2])
                b.delay(points[k][ti - 1] - entry_pts[k][ti - 1])
            else:
                b.delay(points[k][ti - 1] - points[k - 1][ti - 1])
            marks.append(b.mark())
        got = b.current.clocks
        if tuple(got) != tuple(points[-1][: net.num_clocks]):
            raise AssertionError("concretized run drifted from the chosen points")
        return _finish(b, marks, tail)


    def _unpermute(self, path, final, tail):
        """Map a path over orbit representatives back to concrete instances."""
        if not any(lab is not None and lab[0] == "sync" and len(lab) > 3 and lab[3] is not None
                   for lab, _ in path):
            return path, final, tail
        n = len(path[0][1][0])
        sigma = list(range(n))  # representative position -> concrete instance
        sigmas = []

        def concrete(node):
            states = [None] * n
            for p, s in enumerate(node[0]):
                states[sigma[p]] = s
            return (tuple(states), None, node[2])

        def step(label, node):
            nonlocal sigma
            if label[0] != "sync":
                return label, concrete(node)
            idx = sigma[label[1]]
            order = label[3]
            if order is not None:
                sigma = [sigma[j] for j in order]
            extra = label[4] if len(label) > 4 else None
            return ("sync", idx, label[2], None, extra), concrete(node)

        out = []
        for k, (label, node) in enumerate(path):
            if k == 0:
                # a start node may carry a prefix of its own
                out.append((label, concrete(node)))
            else:
                out.append(step(label, node))
            sigmas.append(list(sigma))
        if tail is not None and tail[0] == "cycle":
            start = tail[1]
            loop = path[start + 1:]
            rounds = 1
            while sigma != sigmas[start]:
                if rounds > 10000:
                    raise AssertionError("permutation along the loop does not return")
                for label, node in loop:
                    out.append(step(label, node))
                rounds += 1
        if final and final[0] not in ("z", "entry"):
            inst_of = {}
            for p in range(n):
                for c in self._clocks_of(p):
                    inst_of[c] = (p, c - self._clocks_of(p)[0])

            def cmap(x):
                if x not in inst_of:
                    return x
                p, c = inst_of[x]
                return self._clocks_of(sigma[p])[0] + c

            final = tuple((cmap(i), cmap(j), b) for i, j, b in final)
        return out, final, tail


class _ZoneSet:
    """Flat canonical zones of one discrete state, tested for inclusion."""

    def __init__(self, z):
        self.rows = np.empty((4, z.size), dtype=z.dtype)
        self.rows[0] = z
        self.n = 1

    def includes(self, z) -> bool:
        # canonical DBMs: inclusion is entrywise comparison
        return bool(np.any(np.all(self.rows[: self.n] >= z, axis=1)))

    def add(self, z) -> None:
        if self.n == len(self.rows):
            self.rows = np.concatenate([self.rows, np.empty_like(self.rows)])
        self.rows[self.n] = z
        self.n += 1


def _zero_ok(op: str, b) -> bool:
    from ..model import compare

    return compare(0, op, b)


def _avoid(d, enabled, k, acc):
    """Depth-first split of ``d`` minus the union of convex ``enabled`` sets."""
    if k == len(enabled):
        return acc
    rows = enabled[k]
    if not rows:
        return None
    probe = d.copy()
    if not K.apply(probe, K.cons_array(rows)):
        return _avoid(d, enabled, k + 1, acc)
    for i, j, b in rows:
        neg = 1 - b  # not (x_i - x_j <= b)  <=>  x_j - x_i < -b
        e = d.copy()
        if K.tighten(e, j, i, neg):
            found = _avoid(e, enabled, k + 1, acc + [(j, i, neg)])
            if found is not None:
                return found
    return None


def zone_successors(node, engine: ZoneEngine):
    """Symbolic successors of a node (one per enabled instance transition)."""
    return [nxt for _label, nxt, _entry in engine.successors(node)]
