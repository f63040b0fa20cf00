import pytest

import horoscope as h

FAMILY_SPECS = {
    "integers": h.GroupSpec("integers"),
    "ladder": h.GroupSpec("integers-times-cyclic", modulus=2),
    "ladder3": h.GroupSpec("integers-times-cyclic", modulus=3),
    "dihedral": h.GroupSpec("infinite-dihedral"),
    "lattice": h.GroupSpec("integer-lattice-2d"),
    "free2": h.GroupSpec("free-2"),
}

LINEAR_FAMILIES = ("integers", "ladder", "ladder3", "dihedral")


@pytest.fixture(scope="session")
def graphs():
    """One shared Cayley graph per family; BFS memos accumulate across tests."""
    return {name: h.cayley_graph(spec) for name, spec in FAMILY_SPECS.items()}


def bfs_distance(g, x, y, cap=200_000):
    """Independent BFS distance oracle over the neighbor oracle only."""
    if x == y:
        return 0
    from collections import deque
    depth = {x: 0}
    q = deque([x])
    while q:
        v = q.popleft()
        for u in g.neighbors(v):
            if u not in depth:
                depth[u] = depth[v] + 1
                if u == y:
                    return depth[u]
                q.append(u)
        assert len(depth) < cap, "oracle cap"
    raise AssertionError("disconnected")
