import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import horoscope as h
from conftest import FAMILY_SPECS, bfs_distance


def half_line_graph():
    return h.RootedGraph(lambda n: [n - 1, n + 1] if n > 0 else [1], 0,
                         name="half-line")


# ---------------------------------------------------------------- distance


def test_distance_integers(graphs):
    assert h.distance(graphs["integers"], 3, -2) == 5


def test_distance_identity(graphs):
    for g in graphs.values():
        assert h.distance(g, g.basepoint, g.basepoint) == 0


def test_distance_lattice(graphs):
    assert h.distance(graphs["lattice"], (0, 0), (2, 3)) == 5


@pytest.mark.parametrize("family", list(FAMILY_SPECS))
def test_exact_metric_matches_bfs(graphs, family):
    g = graphs[family]
    ball = h.layer_decomposition(g, 3).ball()
    rng = random.Random(7)
    pairs = [(rng.choice(ball), rng.choice(ball)) for _ in range(25)]
    for x, y in pairs:
        assert h.distance(g, x, y) == bfs_distance(g, x, y)


def test_distance_budget_exhausted():
    g = h.explicit_graph(["a", "b", "c"], [["a", "b"]], "a")
    with pytest.raises(h.BudgetExhausted):
        h.distance(g, "a", "c")


def test_symmetry_check(graphs):
    ball = h.layer_decomposition(graphs["dihedral"], 4).ball()
    h.verify_symmetric(graphs["dihedral"], ball)
    broken = h.RootedGraph(lambda n: [n + 1], 0, name="one-way")
    with pytest.raises(h.MalformedSpec):
        h.verify_symmetric(broken, [0, 1])


# ---------------------------------------------------------------- layers


def test_layers_integers(graphs):
    ld = h.layer_decomposition(graphs["integers"], 5)
    assert ld.sphere_sizes == [1, 2, 2, 2, 2, 2]


def test_layers_lattice(graphs):
    assert h.layer_decomposition(graphs["lattice"], 2).sphere_sizes == [1, 4, 8]


def test_layers_free2(graphs):
    assert h.layer_decomposition(graphs["free2"], 3).sphere_sizes == [1, 4, 12, 36]


def test_layer_invariants(graphs):
    for g in graphs.values():
        ld = h.layer_decomposition(g, 5)
        assert ld.layers[0] == (g.basepoint,)
        seen = set()
        for r in range(1, 6):
            for v in ld.layers[r]:
                assert v not in seen
                assert any(u in ld and ld.depth_of(u) == r - 1
                           for u in g.neighbors(v))
            seen.update(ld.layers[r])
        assert len(ld.ball()) == sum(ld.sphere_sizes)


def test_layer_budget():
    g = h.cayley_graph(h.GroupSpec("free-2"))
    with pytest.raises(h.BudgetExhausted):
        h.layer_decomposition(g, 10, budget=100)
    # a small ball still works afterwards
    assert h.layer_decomposition(g, 2, budget=100).sphere_sizes == [1, 4, 12]


# ---------------------------------------------------------------- Busemann


def test_busemann_integers(graphs):
    bt = h.busemann(graphs["integers"], 5, 3)
    assert bt.values.value(2) == -2
    assert bt.values.value(-1) == 1
    assert bt.values.value(0) == 0


def test_busemann_at_basepoint(graphs):
    for g in graphs.values():
        bt = h.busemann(g, g.basepoint, 3)
        ld = h.layer_decomposition(g, 3)
        assert all(bt.values.value(y) == ld.depth_of(y) for y in ld.ball())


@given(z=st.integers(-40, 40))
@settings(max_examples=30, deadline=None)
def test_busemann_integers_formula(z):
    g = h.cayley_graph(h.GroupSpec("integers"))
    bt = h.busemann(g, z, 4)
    for y in range(-4, 5):
        assert bt.values.value(y) == abs(z - y) - abs(z)


def _assert_one_lipschitz(g, vm):
    dom = set(vm.domain)
    for y in vm.domain:
        for u in g.neighbors(y):
            if u in dom:
                assert abs(vm.value(y) - vm.value(u)) <= 1


def test_busemann_invariants(graphs):
    for g in graphs.values():
        ld = h.layer_decomposition(g, 4)
        for z in ld.layers[4][:3]:
            bt = h.busemann(g, z, 3)
            for y in bt.values.domain:
                assert abs(bt.values.value(y)) <= ld.depth_of(y)
            _assert_one_lipschitz(g, bt.values)


# ---------------------------------------------------------------- value maps


def test_valuemap_roundtrip():
    vm = h.ValueMap.from_dict({3: -1, 1: 2, 2: 0}, radius=5)
    assert vm.domain == (1, 2, 3)
    assert vm.values == (2, 0, -1)
    assert vm.value(3) == -1
    with pytest.raises(KeyError):
        vm.value(9)
    assert vm.restrict([1, 3]).items == ((1, 2), (3, -1))
    assert vm.to_jsonable() == [[1, 2], [2, 0], [3, -1]]


@given(st.dictionaries(st.integers(-9, 9), st.integers(-5, 5), min_size=1))
def test_valuemap_ordering_is_item_order(d):
    vm = h.ValueMap.from_dict(d)
    assert vm.as_dict() == d
    assert list(vm.items) == sorted(d.items())


# ---------------------------------------------------------------- rays


def test_canonical_ray(graphs):
    ray = h.canonical_ray(graphs["integers"], 5)
    assert ray.vertices == (0, -1, -2, -3, -4, -5)
    h.validate_ray(graphs["integers"], ray)


def test_extend_ray_policy(graphs):
    g = graphs["integers"]
    ray = h.GeodesicRay((0,), extension=lambda gg, vs: vs[-1] + 1)
    assert h.extend_ray(g, ray, 4).vertices == (0, 1, 2, 3, 4)
    bad = h.GeodesicRay((0, 1), extension=lambda gg, vs: vs[-1] - 1)
    with pytest.raises(h.NotGeodesic):
        h.extend_ray(g, bad, 4)


def test_extend_ray_dead_end():
    g = h.explicit_graph([0, 1, 2], [[0, 1], [1, 2]], 0)
    with pytest.raises(h.RayNotExtendable):
        h.extend_ray(g, h.GeodesicRay((0,)), 5)


def test_validate_ray_rejects_non_geodesic(graphs):
    with pytest.raises(h.NotGeodesic):
        h.validate_ray(graphs["integers"], h.GeodesicRay((0, 1, 0)))
    with pytest.raises(h.NotGeodesic):
        h.validate_ray(graphs["integers"], h.GeodesicRay((0, 2)))


# ---------------------------------------------------------------- horofunctions


def test_horofunction_integers(graphs):
    g = graphs["integers"]
    ha = h.horofunction_approx(g, h.GeodesicRay((0, 1, 2)), 4, 8)
    for y in range(-4, 5):
        assert ha.values.value(y) == -y
    assert ha.values.value(0) == 0
    _assert_one_lipschitz(g, ha.values)


def test_horofunction_ray_vertices(graphs):
    g = graphs["ladder"]
    ray = h.canonical_ray(g, 12)
    ha = h.horofunction_approx(g, ray, 5, 6)
    ld = h.layer_decomposition(g, 5)
    for n, z in enumerate(ha.ray.vertices):
        if z in ld:
            assert ha.values.value(z) == -n


def test_horofunction_ladder_limit_values(graphs):
    # the canonical ladder ray heads to (-inf, 0); its limit is (y, u) -> y + u
    g = graphs["ladder"]
    ha = h.horofunction_approx(g, h.canonical_ray(g, 16), 4, 8)
    for (y, u) in ha.values.domain:
        assert ha.values.value((y, u)) == y + u


def test_horofunction_stabilized_on_half_line():
    g = half_line_graph()
    ha = h.horofunction_approx(g, h.GeodesicRay((0, 1)), 4, 6)
    assert ha.status == "stabilized"
    assert ha.floor_certified == 5
    assert [ha.values.value(y) for y in range(5)] == [0, -1, -2, -3, -4]


def test_horofunction_heuristic_on_line(graphs):
    ha = h.horofunction_approx(graphs["integers"], h.GeodesicRay((0, 1)), 3, 5)
    assert ha.status == "heuristic"  # values at -y never hit -d(o,y) for y < 0
    assert ha.stabilization_depth <= 3


def test_horofunction_requires_basepoint(graphs):
    with pytest.raises(h.NotGeodesic):
        h.horofunction_approx(graphs["integers"], h.GeodesicRay((1, 2)), 3, 4)


# ---------------------------------------------------------------- enumeration


def test_enumerate_integers_two_maps(graphs):
    g = graphs["integers"]
    maps = h.enumerate_horofunction_restrictions(g, 5, 20, 8)
    dom = tuple(range(-5, 6))
    expect = {tuple(-y for y in dom), tuple(y for y in dom)}
    assert {vm.values for vm in maps} == expect
    assert all(vm.domain == dom for vm in maps)


def test_enumerate_restriction_consistency(graphs):
    g = graphs["ladder"]
    ld = h.layer_decomposition(g, 6)
    deep = h.enumerate_horofunction_restrictions(g, 6, 40, 8)
    shallow = set(h.enumerate_horofunction_restrictions(g, 5, 40, 8))
    inner = ld.ball(5)
    for vm in deep:
        assert vm.restrict(inner, 5) in shallow


def test_enumerate_count_monotone_in_radius(graphs):
    for family in ("integers", "ladder", "dihedral", "lattice"):
        g = graphs[family]
        counts = [len(h.enumerate_horofunction_restrictions(g, r, 26, 8))
                  for r in range(1, 6)]
        assert counts == sorted(counts)


def test_enumerate_rejects_shallow_depth(graphs):
    with pytest.raises(ValueError):
        h.enumerate_horofunction_restrictions(graphs["integers"], 5, 10, 8)


def test_enumerate_empty_sphere():
    g = h.explicit_graph([0, 1, 2], [[0, 1], [1, 2]], 0)
    with pytest.raises(h.EmptySphere):
        h.enumerate_horofunction_restrictions(g, 1, 5, 2)


# ---------------------------------------------------------------- rerooting


def test_reroot_already_at_basepoint(graphs):
    g = graphs["integers"]
    ray = h.GeodesicRay((0, 1, 2, 3))
    n0, back = h.reroot_ray(g, ray)
    assert n0 == 0
    assert back.vertices == ray.vertices


def test_reroot_shifted_positive(graphs):
    n0, back = h.reroot_ray(graphs["integers"], h.GeodesicRay((1, 2, 3, 4)))
    assert n0 == 0
    assert back.vertices == (0, 1, 2, 3, 4)


def test_reroot_negative_example(graphs):
    n0, back = h.reroot_ray(graphs["integers"], h.GeodesicRay((-3, -4, -5, -6)))
    assert n0 == 0
    assert back.vertices == (0, -1, -2, -3, -4, -5, -6)


def test_reroot_with_turnaround(graphs):
    # walks toward o then away: the difference sequence settles mid-prefix
    g = graphs["integers"]
    n0, back = h.reroot_ray(g, h.GeodesicRay((2, 3, 4, 5)))
    assert n0 == 0 and back.vertices == (0, 1, 2, 3, 4, 5)
    n0, back = h.reroot_ray(g, h.GeodesicRay((-2, -1, 0, 1, 2, 3)))
    assert back.vertices[-4:] == (0, 1, 2, 3)
    assert all(h.distance(g, 0, v) == i for i, v in enumerate(back.vertices))


def test_reroot_prefix_too_short(graphs):
    with pytest.raises(h.PrefixTooShort):
        h.reroot_ray(graphs["integers"], h.GeodesicRay((2, 1)))


@pytest.mark.parametrize("family", list(FAMILY_SPECS))
def test_reroot_random_prefixes(graphs, family):
    g = graphs[family]
    rng = random.Random(11)
    ball = h.layer_decomposition(g, 4).ball()
    done = 0
    while done < 10:
        start = rng.choice(ball)
        vs = [start]
        ok = True
        for _ in range(12):
            want = len(vs)
            cands = [u for u in g.neighbors(vs[-1])
                     if h.distance(g, start, u) == want]
            if not cands:
                ok = False
                break
            vs.append(rng.choice(cands))
        if not ok:
            continue
        done += 1
        n0, back = h.reroot_ray(g, h.GeodesicRay(tuple(vs)))
        assert back.vertices[0] == g.basepoint
        for i, v in enumerate(back.vertices):
            assert h.distance(g, g.basepoint, v) == i
        tail = len(vs) - 1 - n0
        assert back.vertices[-(tail + 1):] == tuple(vs[n0:])


def test_busemann_monotone_along_ray(graphs):
    # non-increasing and bounded below by -d(o, y), per family
    for g in graphs.values():
        ray = h.canonical_ray(g, 12)
        ld = h.layer_decomposition(g, 3)
        for y in ld.ball():
            prev = None
            dy = ld.depth_of(y)
            for n, z in enumerate(ray.vertices):
                b = h.distance(g, z, y) - n
                assert b >= -dy
                if prev is not None:
                    assert b <= prev
                prev = b
