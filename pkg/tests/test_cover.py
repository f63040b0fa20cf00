import pytest

import horoscope as h
from horoscope import corpus
from horoscope.npartite import enumerate_spanning_paths


def brute_minimum(lg, paths, depth):
    """Oracle for the packed-count DP: enumerate every spanning path."""
    best = None
    for names in enumerate_spanning_paths(lg, depth):
        top = max(sum(1 for i, nm in enumerate(names) if q.name_at(i) == nm)
                  for q in paths)
        best = top if best is None else min(best, top)
    return best


def walk_trace(node):
    yield node
    for child in node.children:
        yield from walk_trace(child)


@pytest.mark.parametrize("name,lg", corpus.corpus(0))
def test_cover_shape_and_verification(name, lg):
    res = h.monotone_cover(lg)
    assert len(res.paths) == res.k
    assert not res.approximate
    for p in res.paths:
        assert p.infinite
        p.validate(lg, depth=50)
    minima = h.spanning_intersection_minima(lg, res.paths, (10, 20, 40))
    assert minima[10] is not None and minima[10] >= 1
    assert minima[10] <= minima[20] <= minima[40]


@pytest.mark.parametrize("name,lg", corpus.corpus(0))
def test_trace_split_arithmetic(name, lg):
    res = h.monotone_cover(lg)
    for node in walk_trace(res.trace):
        if node.kind == "split":
            assert node.v + node.w == node.k
            assert 1 <= node.v < node.k
            assert 1 <= node.w < node.k
            a, b = node.children
            assert a.k <= node.v
            assert b.k <= node.w
            assert len(node.padded) == (node.v - a.k) + (node.w - b.k)


def test_dp_matches_brute_enumeration():
    for name, lg in corpus.corpus(0):
        if lg.k > 3:
            continue
        res = h.monotone_cover(lg)
        dp = h.spanning_intersection_minima(lg, res.paths, (8,))
        assert dp[8] == brute_minimum(lg, res.paths, 8), name


def test_hall_funnel_cover_paths():
    lg = corpus.hall_funnel()
    res = h.monotone_cover(lg)
    assert res.k == 2
    spine = next(p for p in res.paths if p.name_at(0) == "a")
    assert all(spine.name_at(i) == "a" for i in range(31))
    # only two paths span the depth-30 unfolding; both ride the a-spine
    for names in enumerate_spanning_paths(lg, 30):
        hits = sum(1 for i, nm in enumerate(names) if spine.name_at(i) == nm)
        assert hits >= 28


def test_crossing_cover_meets_a_spine_often():
    lg = corpus.two_spine_crossing()
    res = h.monotone_cover(lg)
    minima = h.spanning_intersection_minima(lg, res.paths, (30,))
    assert minima[30] >= 15


def test_half_line_base_case():
    res = h.monotone_cover(corpus.half_line())
    assert res.k == 1
    assert res.paths[0].cycle == ("a",)
    assert res.trace.kind == "match"


def test_collapse_needs_split_and_padding():
    res = h.monotone_cover(corpus.three_spine_collapse())
    assert res.k == 3
    split = res.trace
    assert split.kind == "split"
    assert (split.v, split.w) == (1, 2)
    assert split.padded == ("b",)
    starts = sorted(p.name_at(p.start) for p in res.paths)
    assert starts == ["a", "b", "c"]
    pad = next(p for p in res.paths if p.name_at(p.start) == "b")
    assert all(pad.name_at(i) == "a" for i in range(pad.start + 1, 20))


def test_double_funnel_nests_twice():
    res = h.monotone_cover(corpus.double_funnel_k4())
    assert res.k == 4
    kinds = [n.kind for n in walk_trace(res.trace)]
    assert kinds.count("split") >= 2


def test_period2_funnel_collapses_to_one_path():
    res = h.monotone_cover(corpus.period2_funnel())
    assert res.k == 1
    (p,) = res.paths
    # the surviving name x sits on the odd layers; every spanning path must
    # cross it there, so one path covers everything
    assert p.name_at(1) == "x"
    assert p.name_at(3) == "x"


def test_cover_deterministic():
    a = h.monotone_cover(corpus.double_funnel_k4())
    b = h.monotone_cover(corpus.double_funnel_k4())
    assert a == b


def test_reachability_functoriality():
    # paths in a reachability reduction lift to monotone paths of the parent
    # hitting the same vertices at the selected layers
    from horoscope.npartite import _expand_path, _reduce_with_map

    lg = corpus.two_spine_crossing()
    red, lmap = _reduce_with_map(lg, h.Stride(0, 2))
    for q in h.partition_by_matchings(red):
        lifted = _expand_path(lg, lmap, q)
        lifted.validate(lg, depth=24)
        for t in range(12):
            assert lifted.name_at(2 * t) == q.name_at(t)


def test_expand_path_realigns_short_cycles():
    # a cycle shorter than the parent period must be unrolled until the
    # segment pattern repeats
    from horoscope.npartite import _expand_path

    lg = corpus.two_spine_crossing()          # period 2
    spine = h.MonotonePath(0, (), ("a",))     # cycle length 1
    lifted = _expand_path(lg, h.Stride(0, 1), spine)
    assert len(lifted.cycle) == 2
    lifted.validate(lg, depth=24)
    assert all(lifted.name_at(i) == "a" for i in range(24))


def test_cover_propagates_empty():
    lg = h.LayeredGraph.periodic([["a"]], [], [])
    with pytest.raises(h.EmptyGraph):
        h.monotone_cover(lg)


def test_truncation_cover_flagged_approximate():
    # spanning semantics differ from the periodic ones here: b_i for i >= 1
    # lies on no spanning path (nothing feeds b), so pruning leaves one spine
    lg = corpus.hall_funnel().unfold(30)
    res = h.monotone_cover(lg)
    assert res.approximate
    assert res.k == 1
    (p,) = res.paths
    assert p.covers(0) and p.covers(30)
    assert p.name_at(5) == "a"
    minima = h.spanning_intersection_minima(lg, res.paths, (10, 20))
    assert minima[20] >= minima[10] >= 1


def test_truncation_cover_match_branch():
    lg = corpus.two_spine_crossing().unfold(20)
    res = h.monotone_cover(lg)
    assert res.trace.kind == "match"
    covered = {(i, p.name_at(i)) for p in res.paths for i in range(21)}
    everything = {(i, nm) for i in range(21) for nm in lg.layer(i)}
    assert covered == everything


def test_multi_phase_hall_failure():
    # Hall fails at both phases of a period-2 block with nothing pruned, so
    # the stride analysis runs on the two-phase graph directly
    lg = corpus.funnel_both_phases()
    pr = h.prune_to_spanning(lg)
    assert pr.dropped == () and pr.selection is None
    w = h.find_hall_failure(lg)
    assert w.base_layer == 0
    assert w.U == ("a", "b") and w.sizes == (2, 1)
    res = h.monotone_cover(lg)
    assert res.k == 2 and res.trace.kind == "split"
    spine = next(p for p in res.paths if p.name_at(0) == "a")
    assert spine.name_at(1) == "x" and spine.name_at(2) == "a"


def test_prefix_funnel_sheds_prefix_then_splits():
    res = h.monotone_cover(corpus.prefix_funnel())
    assert res.k == 2
    assert res.trace.kind == "split"
    # paths are prepended back through the seam to layer 0
    assert any(p.covers(0) and p.name_at(0) == "s" for p in res.paths)


def test_reachability_crossing_the_prefix():
    red = h.monotone_reachability(corpus.prefix_feeder(), h.Stride(0, 2))
    assert red.prefix_layers == (("s",),)
    assert sorted(red.seam_edges) == [("s", "a"), ("s", "b")]
    assert red.period_layers == (("a", "b"),)
    assert sorted(red.period_edges[0]) == [("a", "a"), ("b", "b")]


def test_random_instances_stress():
    for seed in range(25):
        lg = corpus.random_periodic(seed, k=2 + seed % 3, period=1 + seed % 2)
        res = h.monotone_cover(lg)
        assert len(res.paths) == res.k
        minima = h.spanning_intersection_minima(lg, res.paths, (40,))
        assert minima[40] is not None and minima[40] >= 4
        for p in res.paths:
            p.validate(lg, depth=44)


def random_with_dead_ends(seed, k, period):
    """Random periodic graph that may strand vertices (no forward edge)."""
    import random as _random

    rng = _random.Random(seed)
    names = [f"v{i}" for i in range(k)]
    steps = []
    for _ in range(period):
        pairs = {(rng.choice(names), rng.choice(names))
                 for _ in range(rng.randrange(1, 2 * k + 1))}
        steps.append(sorted(pairs))
    return h.LayeredGraph.periodic([names] * period, steps[:-1], steps[-1])


def test_cover_catches_long_random_walks():
    # every maximal forward walk in the pruned graph is infinite; any such
    # walk of 200 layers must already meet some cover path many times
    import random as _random

    rng = _random.Random(99)
    covered_cases = 0
    for seed in range(60):
        lg = random_with_dead_ends(seed, k=2 + seed % 3, period=1 + seed % 2)
        try:
            res = h.monotone_cover(lg)
        except h.EmptyGraph:
            continue
        covered_cases += 1
        pruned = h.prune_to_spanning(lg).graph
        for _ in range(5):
            start_layer = rng.randrange(0, 3)
            names = pruned.layer(start_layer)
            if not names:
                continue
            cur = rng.choice(names)
            walk = [(start_layer, cur)]
            for i in range(start_layer, start_layer + 200):
                succ = [b for a, b in pruned.edge_pairs(i) if a == cur]
                assert succ, "pruned vertices always extend forward"
                cur = rng.choice(succ)
                walk.append((i + 1, cur))
            best = max(
                sum(1 for i, nm in walk if q.name_at(i) == nm)
                for q in res.paths)
            assert best >= 4, f"seed {seed}: walk met covers only {best} times"
    assert covered_cases >= 30


def test_cover_paths_realize_all_horofunctions(graphs):
    # end to end on the ladder: quotient the spheres, cover them, lift each
    # cover path to a geodesic ray, follow its Busemann limit, and compare
    # with the independently enumerated restrictions: the set is complete
    g = graphs["ladder"]
    sq = h.sphere_quotient(g, bound=24)
    res = h.monotone_cover(sq)
    assert res.k == 4
    limits = set()
    for path in res.paths:
        ray = h.monotone_to_ray(g, sq, path)
        approx = h.horofunction_approx(g, ray, 5, 8)
        limits.add(approx.values)
    enumerated = set(h.enumerate_horofunction_restrictions(g, 5, 40, 8))
    assert limits == enumerated
