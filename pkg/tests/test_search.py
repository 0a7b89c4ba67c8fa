import pytest

from pnta import search


class ToyEngine:
    """Explicit graph; nodes are ints, entries unused."""

    def __init__(self, edges, init=(0,)):
        self.edges = edges
        self.init = init

    def initial(self, allowed=None):
        return [(n, None) for n in self.init]

    def successors(self, node, allowed=None):
        return [(f"{node}->{m}", m, None) for m in self.edges.get(node, ())]


def test_reach_returns_shortest_path():
    eng = ToyEngine({0: [1, 2], 1: [3], 2: [4], 4: [3]})
    path = search.reach(eng, lambda n, e: n == 3)
    assert [n for _, n in path] == [0, 1, 3]
    assert search.reach(eng, lambda n, e: n == 9) is None


def test_expand_if_blocks():
    eng = ToyEngine({0: [1, 2], 1: [3], 2: [3]})
    g = search.explore(eng, expand_if=lambda n: n != 1)
    assert sorted(g.nodes) == [0, 1, 2, 3]
    assert search.reach(eng, lambda n, e: n == 3, expand_if=lambda n: n == 0) is None


def test_find_cycle_lasso():
    eng = ToyEngine({0: [1], 1: [2], 2: [3], 3: [1]})
    g = search.explore(eng)
    path, k = g.find_cycle()
    nodes = [n for _, n in path]
    assert nodes[k] == nodes[-1] == 1 and nodes[:k + 1] == [0, 1]
    assert len(nodes) - 1 - k == 3


def test_self_loop_and_acyclic():
    g = search.explore(ToyEngine({0: [1], 1: [1]}))
    path, k = g.find_cycle()
    assert [n for _, n in path][k:] == [1, 1]
    assert search.explore(ToyEngine({0: [1, 2], 1: [2]})).find_cycle() is None


def test_cycle_restricted():
    g = search.explore(ToyEngine({0: [1, 0], 1: [2], 2: [1]}))
    path, k = g.find_cycle(within={g.ids[1], g.ids[2]})
    assert {n for _, n in path[k:]} == {1, 2}


def test_limit():
    with pytest.raises(search.SearchLimit):
        search.explore(ToyEngine({n: [n + 1] for n in range(100)}), limit=10)


def test_subsumed_nodes_are_not_expanded():
    eng = ToyEngine({0: [1, 2], 2: [5], 1: [4]})
    g = search.explore(eng, subsume=lambda n: n == 2)
    assert 2 in g.ids and 5 not in g.ids and 4 in g.ids
