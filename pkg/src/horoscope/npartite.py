"""Layered (N-partite) graphs with finite layers and monotone path covers.

A layered graph has its vertices split into layers 0, 1, 2, ... with edges
only between consecutive layers; a *monotone* path meets each layer at most
once, so an infinite one marches through consecutive layers forever.  Two
finite descriptions are supported:

* truncation: an explicit finite list of layers, and
* eventually periodic: a finite prefix plus a repeating period block (with
  seam edges prefix -> period and wrap edges from the last period layer to
  the first layer of the next copy).

The eventually periodic form is the exactness domain: pruning to vertices on
infinite monotone paths, "matchings exist for all large strides", and the
funnel (Hall-failure) recursion are all decided exactly there, because the
one-period reachability relation is a boolean matrix whose powers repeat.
On truncations, "infinite" is approximated by "spanning the truncation" and
every result is flagged approximate.

The monotone cover is the showpiece: k monotone paths such that every
infinite monotone path shares infinitely many vertices with one of them,
computed by induction on k via perfect matchings when they exist and via a
Hall-failure split into a funnel part and its complement when they do not.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Any, NamedTuple

from .errors import (
    EmptyGraph,
    MalformedSpec,
    MalformedSubsequence,
    NoConstantSubsequence,
    NoMatching,
    NonConsecutiveEdge,
    RayTooShort,
    UnequalLayers,
)
from .graphs import (
    DEFAULT_BUDGET,
    GeodesicRay,
    RootedGraph,
    _bfs_depths,
    canonical_geodesic,
    extend_ray,
    layer_decomposition,
)
from .matching import HallViolator, Matching, matching_or_violator

Name = Any  # vertex name within one layer: any sortable, hashable value


# ---------------------------------------------------------------------------
# the graph type


@dataclass(frozen=True)
class LayeredGraph:
    """Finitely described layered graph (truncation or eventually periodic).

    ``period_layers`` empty means truncation mode.  In periodic mode,
    ``period_edges`` has one entry per block layer: entry j < B-1 joins block
    layers j and j+1, and the last entry is the wrap relation from block
    layer B-1 to block layer 0 of the next copy.  Unfolded layer i carries
    the vertex set of prefix layer i (i < P) or period layer (i - P) mod B.
    ``layer_tags`` optionally labels truncation layers (sphere quotients
    store their sphere radii there).
    """

    prefix_layers: tuple[tuple[Name, ...], ...]
    prefix_edges: tuple[frozenset, ...]
    seam_edges: frozenset | None
    period_layers: tuple[tuple[Name, ...], ...]
    period_edges: tuple[frozenset, ...]
    layer_tags: tuple | None = None

    # -- construction -------------------------------------------------------

    @classmethod
    def truncation(cls, layers, steps, tags=None) -> "LayeredGraph":
        """Truncation from layer name lists and per-step edge pair lists."""
        layers = tuple(tuple(sorted(set(layer))) for layer in layers)
        steps = tuple(frozenset((a, b) for a, b in step) for step in steps)
        if len(steps) != max(len(layers) - 1, 0):
            raise MalformedSpec(
                f"{len(layers)} layers need {len(layers) - 1} edge steps, "
                f"got {len(steps)}")
        lg = cls(prefix_layers=layers, prefix_edges=steps, seam_edges=None,
                 period_layers=(), period_edges=(),
                 layer_tags=tuple(tags) if tags is not None else None)
        lg._check_edges()
        return lg

    @classmethod
    def periodic(cls, period_layers, period_steps, wrap,
                 prefix_layers=(), prefix_steps=(), seam=None) -> "LayeredGraph":
        """Eventually periodic graph.

        ``period_steps`` are the B-1 internal steps of the block, ``wrap``
        joins the last block layer to the first one of the next copy, and
        ``seam`` joins the last prefix layer to block layer 0.
        """
        period_layers = tuple(tuple(sorted(set(layer))) for layer in period_layers)
        if not period_layers:
            raise MalformedSpec("periodic description needs a nonempty period block")
        period_steps = tuple(frozenset((a, b) for a, b in step) for step in period_steps)
        if len(period_steps) != len(period_layers) - 1:
            raise MalformedSpec(
                f"period of {len(period_layers)} layers needs "
                f"{len(period_layers) - 1} internal steps, got {len(period_steps)}")
        prefix_layers = tuple(tuple(sorted(set(layer))) for layer in prefix_layers)
        prefix_steps = tuple(frozenset((a, b) for a, b in step) for step in prefix_steps)
        if len(prefix_steps) != max(len(prefix_layers) - 1, 0):
            raise MalformedSpec("prefix step count does not match prefix layers")
        if bool(prefix_layers) != (seam is not None):
            raise MalformedSpec("seam edges required exactly when a prefix is present")
        lg = cls(prefix_layers=prefix_layers, prefix_edges=prefix_steps,
                 seam_edges=frozenset((a, b) for a, b in seam) if seam is not None else None,
                 period_layers=period_layers,
                 period_edges=period_steps + (frozenset((a, b) for a, b in wrap),))
        lg._check_edges()
        return lg

    def _check_edges(self):
        for i in range(self.num_prefix - 1):
            self._check_step(self.prefix_edges[i], self.layer(i), self.layer(i + 1), f"prefix step {i}")
        if self.seam_edges is not None:
            self._check_step(self.seam_edges, self.prefix_layers[-1],
                             self.period_layers[0], "seam")
        for j in range(self.period_length):
            src = self.period_layers[j]
            dst = self.period_layers[(j + 1) % self.period_length]
            self._check_step(self.period_edges[j], src, dst,
                             "wrap" if j == self.period_length - 1 else f"period step {j}")

    @staticmethod
    def _check_step(pairs, src, dst, where):
        src, dst = set(src), set(dst)
        for a, b in pairs:
            if a not in src or b not in dst:
                raise MalformedSpec(f"{where}: edge ({a!r}, {b!r}) references unknown names")

    # -- shape ---------------------------------------------------------------

    @property
    def is_periodic(self) -> bool:
        return bool(self.period_layers)

    @property
    def num_prefix(self) -> int:
        return len(self.prefix_layers)

    @property
    def period_length(self) -> int:
        return len(self.period_layers)

    @property
    def num_layers(self) -> int | None:
        """Layer count for truncations, None for periodic graphs."""
        return None if self.is_periodic else len(self.prefix_layers)

    @property
    def k(self) -> int:
        """Maximum layer cardinality."""
        sizes = [len(l) for l in self.prefix_layers + self.period_layers]
        return max(sizes, default=0)

    def layer(self, i: int) -> tuple[Name, ...]:
        if i < 0:
            raise IndexError(i)
        if i < self.num_prefix:
            return self.prefix_layers[i]
        if not self.is_periodic:
            raise IndexError(f"layer {i} beyond truncation depth")
        return self.period_layers[(i - self.num_prefix) % self.period_length]

    def edge_pairs(self, i: int) -> frozenset:
        """Edges between unfolded layers i and i+1."""
        p = self.num_prefix
        if i < 0:
            raise IndexError(i)
        if i < p - 1:
            return self.prefix_edges[i]
        if not self.is_periodic:
            raise IndexError(f"no step {i} in a truncation of {p} layers")
        if i == p - 1:
            return self.seam_edges
        return self.period_edges[(i - p) % self.period_length]

    def forward_map(self, i: int) -> dict:
        out = {a: set() for a in self.layer(i)}
        for a, b in self.edge_pairs(i):
            out[a].add(b)
        return {a: tuple(sorted(t)) for a, t in out.items()}

    def backward_map(self, i: int) -> dict:
        """Edges of step i keyed by the layer-(i+1) endpoint."""
        out = {b: set() for b in self.layer(i + 1)}
        for a, b in self.edge_pairs(i):
            out[b].add(a)
        return {b: tuple(sorted(t)) for b, t in out.items()}

    def unfold(self, depth: int) -> "LayeredGraph":
        """Truncation holding layers 0..depth of the unfolding."""
        layers = [self.layer(i) for i in range(depth + 1)]
        steps = [self.edge_pairs(i) for i in range(depth)]
        return LayeredGraph.truncation(layers, steps)


def build_layered(spec: dict) -> LayeredGraph:
    """Validated layered graph from its JSON description."""
    if not isinstance(spec, dict) or spec.get("kind") != "layered":
        raise MalformedSpec('layered spec must be an object with "kind": "layered"')

    def parse_edges(entries, n_layers, where):
        steps = [[] for _ in range(max(n_layers - 1, 0))]
        for e in entries:
            if not isinstance(e, list) or len(e) != 3:
                raise MalformedSpec(f"{where}: edge entry {e!r} must be [layer, from, to]")
            j, a, b = e
            if not isinstance(j, int) or not 0 <= j < n_layers - 1:
                raise NonConsecutiveEdge(
                    f"{where}: edge {e!r} does not join consecutive layers in range")
            steps[j].append((a, b))
        return steps

    if "period" in spec:
        period = spec["period"]
        p_layers = period.get("layers")
        if not p_layers or any(not layer for layer in p_layers):
            raise MalformedSpec("period.layers must be nonempty lists of names")
        p_steps = parse_edges(period.get("edges", []), len(p_layers), "period")
        wrap = [tuple(e) for e in spec.get("wrap", [])]
        prefix = spec.get("prefix")
        if prefix is not None:
            f_layers = prefix.get("layers") or []
            f_steps = parse_edges(prefix.get("edges", []), len(f_layers), "prefix")
            seam = [tuple(e) for e in spec.get("seam", [])]
            return LayeredGraph.periodic(p_layers, p_steps, wrap,
                                         prefix_layers=f_layers,
                                         prefix_steps=f_steps, seam=seam)
        return LayeredGraph.periodic(p_layers, p_steps, wrap)

    layers = spec.get("layers")
    if not layers:
        raise MalformedSpec('truncation spec needs a nonempty "layers" list')
    steps = parse_edges(spec.get("edges", []), len(layers), "layers")
    return LayeredGraph.truncation(layers, steps)


# ---------------------------------------------------------------------------
# monotone paths


@dataclass(frozen=True)
class MonotonePath:
    """A monotone path: one vertex in each layer from ``start`` on.

    ``head`` lists the first names explicitly; a nonempty ``cycle`` continues
    them periodically, making the path infinite.
    """

    start: int
    head: tuple[Name, ...]
    cycle: tuple[Name, ...] = ()

    @property
    def infinite(self) -> bool:
        return bool(self.cycle)

    @property
    def end(self) -> int | None:
        """Last covered layer, or None when infinite."""
        return None if self.cycle else self.start + len(self.head) - 1

    def covers(self, i: int) -> bool:
        return i >= self.start and (self.infinite or i <= self.end)

    def name_at(self, i: int) -> Name | None:
        if not self.covers(i):
            return None
        off = i - self.start
        if off < len(self.head):
            return self.head[off]
        return self.cycle[(off - len(self.head)) % len(self.cycle)]

    def entries(self, upto: int) -> list[tuple[int, Name]]:
        """(layer, name) pairs for covered layers up to ``upto`` inclusive."""
        return [(i, self.name_at(i)) for i in range(self.start, upto + 1)
                if self.covers(i)]

    def validate(self, lg: LayeredGraph, depth: int = 64) -> None:
        """Check adjacency and layer membership on the first ``depth`` layers."""
        last = depth if self.infinite else min(self.end, depth)
        prev = None
        for i in range(self.start, last + 1):
            name = self.name_at(i)
            assert name in lg.layer(i), f"{name!r} not in layer {i}"
            if prev is not None:
                assert (prev, name) in lg.edge_pairs(i - 1), \
                    f"({prev!r}, {name!r}) not an edge at step {i - 1}"
            prev = name


# ---------------------------------------------------------------------------
# relations between layers (monotone reachability)


def _identity_rel(names):
    return {a: frozenset((a,)) for a in names}


def _compose(r1: dict, r2: dict) -> dict:
    out = {}
    for a, mids in r1.items():
        acc = set()
        for m in mids:
            acc |= r2.get(m, frozenset())
        out[a] = frozenset(acc)
    return out


def _step_rel(lg: LayeredGraph, i: int) -> dict:
    out = {a: set() for a in lg.layer(i)}
    for a, b in lg.edge_pairs(i):
        out[a].add(b)
    return {a: frozenset(t) for a, t in out.items()}


def relation_between(lg: LayeredGraph, i: int, j: int) -> dict:
    """Monotone reachability relation from layer i to layer j >= i: maps each
    name of layer i to the layer-j names reachable by an ascending path."""
    rel = _identity_rel(lg.layer(i))
    for t in range(i, j):
        rel = _compose(rel, _step_rel(lg, t))
    return rel


def _rel_key(rel):
    return tuple(sorted((a, tuple(sorted(t))) for a, t in rel.items()))


def _rel_pairs(rel):
    return [(a, b) for a, ts in rel.items() for b in ts]


def _perfect_matching(rel, names):
    res = matching_or_violator(names, names, rel)
    return res if isinstance(res, Matching) else None


# ---------------------------------------------------------------------------
# selections (layer subsequences)


class Stride(NamedTuple):
    """Arithmetic layer selection start, start + stride, start + 2 stride, ..."""

    start: int
    stride: int


def _reduce_with_map(lg: LayeredGraph, selection):
    """Reachability graph on a layer subsequence plus the index map back.

    Returns (reduced graph, layer_map) where layer_map sends a reduced layer
    index to the parent layer index: a Stride acts affinely, an explicit
    tuple by lookup.
    """
    if isinstance(selection, Stride):
        if not lg.is_periodic:
            raise MalformedSubsequence("stride selections need a periodic graph")
        start, stride = selection
        if start < 0 or stride < 1:
            raise MalformedSubsequence(f"bad stride selection {selection}")
        p, b = lg.num_prefix, lg.period_length
        # selected indices below the prefix boundary become the new prefix
        pre_idx = []
        t = start
        while t < p:
            pre_idx.append(t)
            t += stride
        first_periodic = t
        new_prefix = [lg.layer(i) for i in pre_idx]
        new_prefix_steps = [_rel_pairs(relation_between(lg, pre_idx[u], pre_idx[u + 1]))
                            for u in range(len(pre_idx) - 1)]
        seam = None
        if pre_idx:
            seam = _rel_pairs(relation_between(lg, pre_idx[-1], first_periodic))
        b_new = b // gcd(b, stride)
        blocks = []
        steps = []
        for u in range(b_new):
            a0 = first_periodic + u * stride
            blocks.append(lg.layer(a0))
            steps.append(_rel_pairs(relation_between(lg, a0, a0 + stride)))
        reduced = LayeredGraph.periodic(
            blocks, steps[:-1], steps[-1],
            prefix_layers=new_prefix, prefix_steps=new_prefix_steps, seam=seam)
        return reduced, selection

    idx = tuple(selection)
    if not idx or any(b <= a for a, b in zip(idx, idx[1:])) or idx[0] < 0:
        raise MalformedSubsequence(f"selection must be strictly increasing, got {idx}")
    if not lg.is_periodic and idx[-1] >= lg.num_layers:
        raise MalformedSubsequence(f"selection exceeds truncation depth {lg.num_layers}")
    layers = [lg.layer(i) for i in idx]
    steps = [_rel_pairs(relation_between(lg, idx[u], idx[u + 1]))
             for u in range(len(idx) - 1)]
    tags = tuple(lg.layer_tags[i] for i in idx) if lg.layer_tags else None
    return LayeredGraph.truncation(layers, steps, tags=tags), idx


def monotone_reachability(lg: LayeredGraph, selection) -> LayeredGraph:
    """The layered graph on a subsequence of layers, with an edge exactly
    when a monotone path joins the endpoints in ``lg``.

    ``selection`` is either a strictly increasing index sequence (the result
    is a truncation) or a :class:`Stride` on a periodic graph (the result is
    again eventually periodic).
    """
    return _reduce_with_map(lg, selection)[0]


# ---------------------------------------------------------------------------
# pruning


@dataclass(frozen=True)
class PruneResult:
    """Pruned graph plus the equal-size layer selection, when sizes differ.

    ``selection`` is None when all surviving layers already share one
    cardinality; otherwise it selects the layers of limit-inferior size
    (a Stride for periodic graphs, an index tuple for truncations).
    ``approximate`` marks truncation mode, where "lies on an infinite
    monotone path" is approximated by "lies on a spanning path".
    """

    graph: LayeredGraph
    selection: Any
    approximate: bool
    dropped: tuple

    @property
    def equal_size_selection(self):
        return self.selection


def _restrict_pairs(pairs, src_keep, dst_keep):
    return [(a, b) for a, b in pairs if a in src_keep and b in dst_keep]


def prune_to_spanning(lg: LayeredGraph) -> PruneResult:
    """Delete every vertex that lies on no infinite monotone path.

    Periodic mode is exact: a vertex survives iff it can reach, at the next
    block boundary, a name from which arbitrarily long walks exist in the
    one-period reachability relation.  Truncation mode keeps the vertices on
    paths spanning the full truncation and flags the result approximate.
    Raises EmptyGraph when nothing survives.
    """
    if lg.is_periodic:
        return _prune_periodic(lg)
    return _prune_truncation(lg)


def _prune_periodic(lg: LayeredGraph) -> PruneResult:
    p, b = lg.num_prefix, lg.period_length
    block_rel = [_step_rel(lg, p + j) for j in range(b)]
    one_period = _identity_rel(lg.period_layers[0])
    for j in range(b):
        one_period = _compose(one_period, block_rel[j])
    # names with arbitrarily long forward walks: co-inductive trimming
    alive = set(lg.period_layers[0])
    while True:
        nxt = {u for u in alive if one_period[u] & alive}
        if nxt == alive:
            break
        alive = nxt
    if not alive:
        raise EmptyGraph("no infinite monotone path survives pruning")
    keep = [set() for _ in range(b)]
    keep[0] = alive
    tail = alive
    for j in range(b - 1, 0, -1):
        tail = {a for a in lg.period_layers[j] if block_rel[j][a] & tail}
        keep[j] = tail

    keep_prefix = [set() for _ in range(p)]
    if p:
        seam = lg.seam_edges
        keep_prefix[p - 1] = {a for a, bb in seam if bb in keep[0]}
        for i in range(p - 2, -1, -1):
            nxt = keep_prefix[i + 1]
            keep_prefix[i] = {a for a, bb in lg.prefix_edges[i] if bb in nxt}

    dropped = tuple(sorted(
        [(i, a) for i in range(p) for a in lg.prefix_layers[i]
         if a not in keep_prefix[i]]
        + [(p + j, a) for j in range(b) for a in lg.period_layers[j]
           if a not in keep[j]]))

    new_prefix = [tuple(sorted(keep_prefix[i])) for i in range(p)]
    new_prefix_steps = [_restrict_pairs(lg.prefix_edges[i], keep_prefix[i],
                                        keep_prefix[i + 1])
                        for i in range(p - 1)]
    new_seam = (_restrict_pairs(lg.seam_edges, keep_prefix[p - 1], keep[0])
                if p else None)
    new_blocks = [tuple(sorted(keep[j])) for j in range(b)]
    new_steps = [_restrict_pairs(lg.period_edges[j], keep[j], keep[(j + 1) % b])
                 for j in range(b)]
    pruned = LayeredGraph.periodic(
        new_blocks, new_steps[:-1], new_steps[-1],
        prefix_layers=new_prefix, prefix_steps=new_prefix_steps, seam=new_seam)

    period_sizes = [len(keep[j]) for j in range(b)]
    all_sizes = [len(s) for s in keep_prefix] + period_sizes
    if len(set(all_sizes)) <= 1:
        selection = None
    elif len(set(period_sizes)) == 1:
        selection = Stride(p, 1)
    else:
        j_star = min(range(b), key=lambda j: (period_sizes[j], j))
        selection = Stride(p + j_star, b)
    return PruneResult(pruned, selection, approximate=False, dropped=dropped)


def _prune_truncation(lg: LayeredGraph) -> PruneResult:
    d = lg.num_layers
    fwd = [set() for _ in range(d)]
    fwd[d - 1] = set(lg.layer(d - 1))
    for i in range(d - 2, -1, -1):
        rel = _step_rel(lg, i)
        fwd[i] = {a for a in lg.layer(i) if rel[a] & fwd[i + 1]}
    back = [set() for _ in range(d)]
    back[0] = set(lg.layer(0))
    for i in range(1, d):
        prev = back[i - 1]
        pairs = lg.edge_pairs(i - 1)
        back[i] = {bb for a, bb in pairs if a in prev}
    keep = [fwd[i] & back[i] for i in range(d)]
    if not any(keep):
        raise EmptyGraph("no monotone path spans the truncation")
    dropped = tuple(sorted((i, a) for i in range(d) for a in lg.layer(i)
                           if a not in keep[i]))
    layers = [tuple(sorted(keep[i])) for i in range(d)]
    steps = [_restrict_pairs(lg.edge_pairs(i), keep[i], keep[i + 1])
             for i in range(d - 1)]
    pruned = LayeredGraph.truncation(layers, steps, tags=lg.layer_tags)
    sizes = [len(k) for k in keep]
    if len(set(sizes)) <= 1:
        selection = None
    else:
        smallest = min(sizes)
        selection = tuple(i for i in range(d) if sizes[i] == smallest)
    return PruneResult(pruned, selection, approximate=True, dropped=dropped)


# ---------------------------------------------------------------------------
# matchings along layers


def layer_matching(lg: LayeredGraph, j: int):
    """Perfect matching between layers j and j+1, or the Hall certificate."""
    left, right = lg.layer(j), lg.layer(j + 1)
    if len(left) != len(right):
        raise UnequalLayers(
            f"layers {j} and {j + 1} have sizes {len(left)} != {len(right)}")
    return matching_or_violator(left, right, lg.forward_map(j))


def partition_by_matchings(lg: LayeredGraph) -> tuple[MonotonePath, ...]:
    """Partition all vertices into k vertex-disjoint monotone paths by
    following a perfect matching at every consecutive layer pair.

    Periodic mode composes the block matchings (plus wrap) into a
    permutation of the first block layer; each path then follows one
    permutation cycle forever.  Raises NoMatching (with the Hall
    certificate) at the first failing pair.
    """
    def need(j):
        res = layer_matching(lg, j)
        if isinstance(res, HallViolator):
            raise NoMatching(f"no perfect matching at layer pair ({j}, {j + 1})",
                             certificate=res)
        return res.as_dict()

    if not lg.is_periodic:
        d = lg.num_layers
        steps = [need(j) for j in range(d - 1)]
        paths = []
        for a in lg.layer(0):
            names = [a]
            for m in steps:
                names.append(m[names[-1]])
            paths.append(MonotonePath(0, tuple(names)))
        return tuple(paths)

    p, b = lg.num_prefix, lg.period_length
    prefix_steps = [need(i) for i in range(p)]           # includes the seam
    block_steps = [need(p + j) for j in range(b)]        # includes the wrap
    pi = {}
    for u in lg.period_layers[0]:
        cur = u
        for m in block_steps:
            cur = m[cur]
        pi[u] = cur
    paths = []
    for a in lg.layer(0):
        names = [a]
        for m in prefix_steps:
            names.append(m[names[-1]])
        entry = names[-1]           # name at the first block layer
        cyc_len = 1
        cur = pi[entry]
        while cur != entry:
            cyc_len += 1
            cur = pi[cur]
        cycle = []
        cur = entry
        for _ in range(cyc_len):
            for m in block_steps:
                cycle.append(cur)
                cur = m[cur]
        paths.append(MonotonePath(0, tuple(names[:-1]), tuple(cycle)))
    return tuple(paths)


# ---------------------------------------------------------------------------
# Hall failure analysis


@dataclass(frozen=True)
class HallFailureWitness:
    """A base layer n and sampled layers m with sets U, V_m certifying that
    every monotone path from U into layer m ends inside the strictly smaller
    set V_m (and every v in V_m is so reachable, by construction)."""

    base_layer: int
    witness_layers: tuple[int, ...]
    U: tuple[Name, ...]
    V: tuple[tuple[int, tuple[Name, ...]], ...]
    sizes: tuple[int, int]

    def v_at(self, m: int) -> tuple[Name, ...]:
        return dict(self.V)[m]


class _MatchInfo(NamedTuple):
    start: int
    stride: int


class _FailInfo(NamedTuple):
    phase: int        # block layer index of the base
    q0: int           # first period count in the stabilized class
    cycle: int        # period count between class members
    U: tuple
    V: tuple


_POWER_CAP = 4096  # safety only; powers of a k x k boolean matrix repeat long before


def _stride_analysis(lg: LayeredGraph):
    """Decide between the matching branch and the Hall-failure branch.

    For each block phase j, the reachability relation over q periods is the
    q-th power of a boolean matrix, so it repeats; if some power of some
    phase admits a perfect matching, an infinite equal-gap subsequence with
    matchings at every consecutive pair exists (_MatchInfo).  Otherwise the
    violators of the powers inside the stabilized cycle repeat verbatim and
    give a Hall-failure witness with constant U and V (_FailInfo).  The
    search over same-phase strides is complete: any infinite matchable
    subsequence contains one along a fixed phase, because compositions of
    perfect matchings are perfect matchings inside the composed relation.
    """
    assert lg.is_periodic
    p, b = lg.num_prefix, lg.period_length
    names = [lg.period_layers[j] for j in range(b)]
    assert all(names), "empty block layer: prune first"
    one_period = []
    for j in range(b):
        rel = _identity_rel(names[j])
        for t in range(b):
            rel = _compose(rel, _step_rel(lg, p + j + t))
        one_period.append(rel)

    power = [None] * b
    history = [dict() for _ in range(b)]   # rel key -> q
    cycle_of = [None] * b                  # (pre_period, cycle_len)
    matrices = [dict() for _ in range(b)]  # q -> relation
    q = 0
    while True:
        q += 1
        assert q <= _POWER_CAP, "boolean matrix powers failed to cycle"
        progress = False
        for j in range(b):
            if cycle_of[j] is not None:
                continue
            progress = True
            power[j] = one_period[j] if q == 1 else _compose(power[j], one_period[j])
            key = _rel_key(power[j])
            if key in history[j]:
                q1 = history[j][key]
                cycle_of[j] = (q1, q - q1)
                continue
            history[j][key] = q
            matrices[j][q] = power[j]
            if _perfect_matching(power[j], names[j]) is not None:
                return _MatchInfo(start=p + j, stride=q * b)
        if not progress:
            break

    j_star = 0
    pre, cyc = cycle_of[j_star]
    classes = {}
    for qq in range(pre, pre + cyc):
        cert = matching_or_violator(names[j_star], names[j_star], matrices[j_star][qq])
        assert isinstance(cert, HallViolator)
        key = (cert.subset, len(cert.neighborhood))
        classes.setdefault(key, []).append((qq, cert.neighborhood))
    (u_set, _), members = min(classes.items(), key=lambda kv: kv[0])
    q0, v_set = members[0]
    return _FailInfo(phase=j_star, q0=q0, cycle=cyc, U=u_set, V=v_set)


def find_hall_failure(lg: LayeredGraph) -> HallFailureWitness | None:
    """Witness that some base layer fails Hall's condition against all
    sufficiently deep layers, or None when matchings exist along a stride.

    The input should be pruned.  Periodic graphs are decided exactly via the
    stabilized matrix powers; truncations scan base layers against every
    deeper equal-size layer and are approximate by nature.
    """
    if lg.is_periodic:
        res = _stride_analysis(lg)
        if isinstance(res, _MatchInfo):
            return None
        return _witness_from_fail(lg, res)

    d = lg.num_layers
    for n in range(d - 1):
        later = [m for m in range(n + 1, d) if len(lg.layer(m)) == len(lg.layer(n))]
        if not later:
            continue
        certs = []
        for m in later:
            res = matching_or_violator(lg.layer(n), lg.layer(m),
                                       relation_between(lg, n, m))
            if isinstance(res, Matching):
                certs = None
                break
            certs.append((m, res))
        if certs:
            classes = {}
            for m, cert in certs:
                key = (cert.subset, len(cert.neighborhood))
                classes.setdefault(key, []).append((m, cert.neighborhood))
            # largest class, then least (U, |V|): deterministic
            (u_set, vlen), members = sorted(
                classes.items(), key=lambda kv: (-len(kv[1]), kv[0]))[0]
            return HallFailureWitness(
                base_layer=n,
                witness_layers=tuple(m for m, _ in members),
                U=u_set,
                V=tuple((m, v) for m, v in members),
                sizes=(len(u_set), vlen))
    return None


def _witness_from_fail(lg: LayeredGraph, info: _FailInfo) -> HallFailureWitness:
    base = lg.num_prefix + info.phase
    ms = tuple(base + (info.q0 + i * info.cycle) * lg.period_length for i in range(3))
    return HallFailureWitness(
        base_layer=base, witness_layers=ms, U=info.U,
        V=tuple((m, info.V) for m in ms), sizes=(len(info.U), len(info.V)))


# ---------------------------------------------------------------------------
# the cover


@dataclass(frozen=True)
class TraceNode:
    """One step of the cover recursion: a matching branch, or a Hall-failure
    split into the funnel sets and their complements."""

    kind: str                      # "match" | "split" | "void"
    k: int
    selection: tuple | None = None
    witness: HallFailureWitness | None = None
    v: int | None = None
    w: int | None = None
    children: tuple["TraceNode", ...] = ()
    padded: tuple[Name, ...] = ()


@dataclass(frozen=True)
class CoverResult:
    """k monotone paths meeting every infinite monotone path infinitely often
    (spanning paths, in truncation mode), plus the recursion trace."""

    paths: tuple[MonotonePath, ...]
    trace: TraceNode
    k: int
    approximate: bool


def _slp(names, rel_pairs) -> LayeredGraph:
    """Single-layer-period graph: every layer the same name set, wrap = rel."""
    return LayeredGraph.periodic([names], [], rel_pairs)


def _greedy_walk(rel: dict, start: Name) -> MonotonePath:
    """Deterministic infinite walk in a single-layer-period relation: always
    step to the least successor; the visit sequence is eventually periodic."""
    seen = {}
    names = []
    cur = start
    while cur not in seen:
        seen[cur] = len(names)
        names.append(cur)
        cur = min(rel[cur])
    i = seen[cur]
    return MonotonePath(0, tuple(names[:i]), tuple(names[i:]))


def _least_segment(lg: LayeredGraph, i: int, u: Name, j: int, v: Name) -> tuple:
    """Lexicographically least monotone path (layer i, u) -> (layer j, v)."""
    reach = {j: {v}}
    for t in range(j - 1, i, -1):
        rel = _step_rel(lg, t)
        reach[t] = {a for a in lg.layer(t) if rel[a] & reach[t + 1]}
    out = [u]
    cur = u
    for t in range(i, j):
        rel = _step_rel(lg, t)
        cands = rel[cur] & reach[t + 1] if t + 1 < j else (rel[cur] & {v})
        cur = min(cands)
        out.append(cur)
    return tuple(out)


def _expand_path(parent: LayeredGraph, layer_map, path: MonotonePath) -> MonotonePath:
    """Lift a path through a reachability reduction: each reduced edge becomes
    its least realizing monotone segment in the parent."""
    if isinstance(layer_map, Stride):
        to_parent = lambda t: layer_map.start + t * layer_map.stride
        stride = layer_map.stride
    else:
        to_parent = lambda t: layer_map[t]
        stride = None

    if not path.infinite:
        names = []
        for off in range(len(path.head) - 1):
            t = path.start + off
            seg = _least_segment(parent, to_parent(t), path.head[off],
                                 to_parent(t + 1), path.head[off + 1])
            names.extend(seg[:-1])
        names.append(path.head[-1])
        return MonotonePath(to_parent(path.start), tuple(names))

    assert stride is not None, "infinite paths need an affine layer map"
    span = len(path.cycle) * stride
    bp = parent.period_length
    repeat = bp // gcd(bp, span)

    def seg(t, a, bname):
        return _least_segment(parent, to_parent(t), a, to_parent(t + 1), bname)

    head_names = []
    for off in range(len(path.head)):
        t = path.start + off
        nxt = path.name_at(t + 1)
        head_names.extend(seg(t, path.head[off], nxt)[:-1])
    cycle_names = []
    c0 = path.start + len(path.head)
    for off in range(len(path.cycle) * repeat):
        t = c0 + off
        cycle_names.extend(seg(t, path.name_at(t), path.name_at(t + 1))[:-1])
    return MonotonePath(to_parent(path.start), tuple(head_names), tuple(cycle_names))


def _extend_back(lg: LayeredGraph, path: MonotonePath) -> MonotonePath:
    """Prepend vertices toward layer 0 while a backward neighbor exists."""
    start = path.start
    if start == 0:
        return path
    first = path.name_at(start)
    prefix = []
    cur = first
    while start > 0:
        back = [a for a, b in lg.edge_pairs(start - 1) if b == cur]
        if not back:
            break
        cur = min(back)
        prefix.append(cur)
        start -= 1
    if not prefix:
        return path
    prefix.reverse()
    if path.infinite and not path.head:
        # materialize one cycle turn into the head so indices stay aligned
        head = tuple(prefix) + tuple(path.name_at(path.start + i)
                                     for i in range(len(path.cycle)))
        return MonotonePath(start, head, path.cycle)
    return MonotonePath(start, tuple(prefix) + path.head, path.cycle)


def _extend_forward(lg: LayeredGraph, path: MonotonePath) -> MonotonePath:
    """Append vertices toward the last truncation layer while edges exist."""
    if path.infinite or lg.is_periodic:
        return path
    names = list(path.head)
    end = path.end
    while end < lg.num_layers - 1:
        rel = _step_rel(lg, end)
        nxt = rel[names[-1]]
        if not nxt:
            break
        names.append(min(nxt))
        end += 1
    return MonotonePath(path.start, tuple(names))


def _uniform_size(lg: LayeredGraph) -> int:
    sizes = {len(l) for l in lg.prefix_layers + lg.period_layers}
    assert len(sizes) == 1, f"layers not uniform: {sizes}"
    return sizes.pop()


def monotone_cover(lg: LayeredGraph) -> CoverResult:
    """k monotone paths such that every infinite monotone path meets one of
    them infinitely often (for truncations: every spanning path meets one,
    approximately in the depth).

    Pipeline: prune, pass to an equal-size layer subsequence when needed,
    then recurse on the uniform graph: take the matching branch along a
    stride when one exists, otherwise split along the Hall-failure witness
    into the funnel Γ_A (the V sets) and its complement Γ_B, solve both by
    induction, and lift everything back to the input graph.  k is the
    uniform layer size after pruning; the result paths live in the original
    layer indexing.
    """
    if lg.is_periodic:
        pr = prune_to_spanning(lg)
        g0 = pr.graph
        sel = pr.selection
        if sel is None and g0.num_prefix > 0:
            sel = Stride(g0.num_prefix, 1)
        if sel is not None:
            g1, lmap = _reduce_with_map(g0, sel)
        else:
            g1, lmap = g0, None
        paths1, trace = _cover_uniform_periodic(g1)
        if lmap is not None:
            paths1 = [_expand_path(g0, lmap, q) for q in paths1]
        paths = tuple(_extend_back(lg, q) for q in paths1)
        return CoverResult(paths=paths, trace=trace, k=_uniform_size(g1),
                           approximate=False)

    pr = prune_to_spanning(lg)
    g0 = pr.graph
    if pr.selection is not None:
        g1, lmap = _reduce_with_map(g0, pr.selection)
    else:
        g1, lmap = g0, None
    paths1, trace = _cover_uniform_truncation(g1)
    if lmap is not None:
        paths1 = [_expand_path(g0, lmap, q) for q in paths1]
    paths = tuple(_extend_forward(lg, _extend_back(lg, q)) for q in paths1)
    return CoverResult(paths=paths, trace=trace, k=_uniform_size(g1),
                       approximate=True)


def _cover_uniform_periodic(g: LayeredGraph):
    """Cover recursion on a prefixless periodic graph with uniform layer
    size; returns exactly that many paths plus the trace."""
    k = _uniform_size(g)
    res = _stride_analysis(g)
    if isinstance(res, _MatchInfo):
        gn, lmap = _reduce_with_map(g, Stride(res.start, res.stride))
        pn = partition_by_matchings(gn)
        paths = [_expand_path(g, lmap, q) for q in pn]
        return paths, TraceNode(kind="match", k=k,
                                selection=("stride", res.start, res.stride))

    witness = _witness_from_fail(g, res)
    mstart = g.num_prefix + res.phase + res.q0 * g.period_length
    mstride = res.cycle * g.period_length
    gm, lmapm = _reduce_with_map(g, Stride(mstart, mstride))
    rel = _step_rel(gm, 0)                     # the wrap relation of gm
    all_names = gm.period_layers[0]
    v_names = tuple(sorted(res.V))
    w_names = tuple(sorted(set(all_names) - set(res.V)))

    def child(sub):
        sub_rel = [(a, bb) for a, bb in _rel_pairs(rel)
                   if a in set(sub) and bb in set(sub)]
        try:
            pruned = prune_to_spanning(_slp(sub, sub_rel)).graph
        except EmptyGraph:
            return [], TraceNode(kind="void", k=0), tuple(sub)
        paths, trace = _cover_uniform_periodic(pruned)
        dropped = tuple(sorted(set(sub) - set(pruned.period_layers[0])))
        return paths, trace, dropped

    paths_a, trace_a, dropped_a = child(v_names)
    paths_b, trace_b, dropped_b = child(w_names)
    assert not dropped_a, "funnel sets are forward closed"
    padded = dropped_a + dropped_b
    pad_paths = [_greedy_walk(rel, u) for u in padded]
    paths_m = list(paths_a) + list(paths_b) + pad_paths
    paths = [_expand_path(g, lmapm, q) for q in paths_m]
    trace = TraceNode(kind="split", k=k, witness=witness,
                      v=len(v_names), w=len(w_names),
                      children=(trace_a, trace_b), padded=padded)
    assert len(paths) == k
    return paths, trace


def _cover_uniform_truncation(g: LayeredGraph):
    """Truncation analogue: greedy matchable chain, else Hall split."""
    k = _uniform_size(g)
    d = g.num_layers
    chain = [0]
    while chain[-1] < d - 1:
        cur = chain[-1]
        found = None
        for m in range(cur + 1, d):
            if _perfect_matching(relation_between(g, cur, m), g.layer(cur)):
                found = m
                break
        if found is None:
            break
        chain.append(found)

    if chain[-1] == d - 1:
        gn, lmap = _reduce_with_map(g, tuple(chain))
        pn = partition_by_matchings(gn)
        paths = [_expand_path(g, lmap, q) for q in pn]
        return paths, TraceNode(kind="match", k=k,
                                selection=("layers", tuple(chain)))

    n = chain[-1]
    certs = []
    for m in range(n + 1, d):
        res = matching_or_violator(g.layer(n), g.layer(m),
                                   relation_between(g, n, m))
        assert isinstance(res, HallViolator)
        certs.append((m, res))
    classes: dict = {}
    for m, cert in certs:
        key = (cert.subset, len(cert.neighborhood))
        classes.setdefault(key, []).append((m, cert.neighborhood))
    (u_set, vlen), members = sorted(classes.items(),
                                    key=lambda kv: (-len(kv[1]), kv[0]))[0]
    ms = tuple(m for m, _ in members)
    witness = HallFailureWitness(
        base_layer=n, witness_layers=ms, U=u_set,
        V=tuple((m, v) for m, v in members), sizes=(len(u_set), vlen))

    gm, lmapm = _reduce_with_map(g, ms)
    v_sets = [set(v) for _, v in members]

    def sub_graph(layer_sets):
        layers = [tuple(sorted(s)) for s in layer_sets]
        steps = [_restrict_pairs(gm.edge_pairs(t), layer_sets[t], layer_sets[t + 1])
                 for t in range(len(layer_sets) - 1)]
        return LayeredGraph.truncation(layers, steps)

    w_sets = [set(gm.layer(t)) - v_sets[t] for t in range(len(ms))]

    def child(layer_sets, expect):
        try:
            sub = sub_graph(layer_sets)
            res = monotone_cover(sub)
        except EmptyGraph:
            return [], TraceNode(kind="void", k=0), expect
        pad = expect - res.k
        return list(res.paths), res.trace, pad

    paths_a, trace_a, pad_a = child(v_sets, vlen)
    paths_b, trace_b, pad_b = child(w_sets, k - vlen)
    covered0 = {q.name_at(0) for q in paths_a + paths_b if q.covers(0)}
    spare = [a for a in gm.layer(0) if a not in covered0]
    spare += [a for a in gm.layer(0)]          # fallback pool, deterministic
    padded = tuple(spare[: pad_a + pad_b])
    pad_paths = [_spanning_greedy(gm, u) for u in padded]
    paths_m = paths_a + paths_b + pad_paths
    paths = [_expand_path(g, lmapm, q) for q in paths_m]
    trace = TraceNode(kind="split", k=k, witness=witness, v=vlen, w=k - vlen,
                      children=(trace_a, trace_b), padded=padded)
    assert len(paths) == k
    return paths, trace


def _spanning_greedy(lg: LayeredGraph, start_name: Name) -> MonotonePath:
    """Greedy forward path from (0, start_name) through a truncation."""
    names = [start_name]
    for t in range(lg.num_layers - 1):
        nxt = _step_rel(lg, t)[names[-1]]
        if not nxt:
            break
        names.append(min(nxt))
    return MonotonePath(0, tuple(names))


# ---------------------------------------------------------------------------
# exhaustive verification (independent of the cover construction)


def spanning_intersection_minima(lg: LayeredGraph, paths, depths=(10, 20, 40)):
    """For each depth D: the minimum over all monotone paths spanning layers
    0..D of the unfolding of max_j |path ∩ paths[j]|.

    Dynamic program over (vertex, intersection count vector) states, with
    counts packed 8 bits per path; exact because counts stay below 256.
    Returns {D: minimum} with None when no spanning path reaches depth D.
    """
    assert len(paths) <= 8, "count packing supports at most 8 paths"
    depths = sorted(depths)
    top = depths[-1]
    if not lg.is_periodic:
        top = min(top, lg.num_layers - 1)
        depths = [dd for dd in depths if dd <= top]

    def hit_mask(i, name):
        m = 0
        for j, q in enumerate(paths):
            if q.name_at(i) == name:
                m += 1 << (8 * j)
        return m

    def score(states):
        best = None
        for (_, packed) in states:
            top_count = max((packed >> (8 * j)) & 255 for j in range(len(paths)))
            best = top_count if best is None else min(best, top_count)
        return best

    minima = {}
    states = {(a, hit_mask(0, a)) for a in lg.layer(0)}
    for i in range(top + 1):
        if i in depths:
            minima[i] = score(states)
        if i == top:
            break
        rel = _step_rel(lg, i)
        nxt = set()
        for (a, packed) in states:
            for bb in rel[a]:
                nxt.add((bb, packed + hit_mask(i + 1, bb)))
        states = nxt
        if not states:
            for dd in depths:
                if dd > i:
                    minima[dd] = None
            return minima
    return minima


def enumerate_spanning_paths(lg: LayeredGraph, depth: int):
    """All monotone paths spanning layers 0..depth, as name tuples.  Only for
    small fixtures; the DP above scales, this exists as its oracle."""
    partial = [[a] for a in lg.layer(0)]
    for i in range(depth):
        rel = _step_rel(lg, i)
        partial = [p + [bb] for p in partial for bb in sorted(rel[p[-1]])]
    return [tuple(p) for p in partial]


# ---------------------------------------------------------------------------
# sphere quotients of rooted graphs


def sphere_quotient(g: RootedGraph, radii=None, *, bound: int | None = None,
                    recurrences: int = 5,
                    budget: int = DEFAULT_BUDGET) -> LayeredGraph:
    """Layered graph on equal-size spheres of a rooted graph.

    Layer t is the sphere of radius ``radii[t]``; an edge joins x to x'
    exactly when d(x, x') equals the radius gap, which happens exactly when
    some path of that length joins them.  When ``radii`` is omitted, the
    spheres are located from a census up to ``bound``: the layer size is the
    smallest sphere size occurring at least ``recurrences`` times, and the
    selected radii are all of its occurrences.  The sphere radii are kept in
    ``layer_tags``.
    """
    if radii is None:
        if bound is None:
            raise ValueError("need either radii or a census bound")
        ld = layer_decomposition(g, bound, budget)
        sizes = ld.sphere_sizes
        counts: dict[int, int] = {}
        for r in range(1, bound + 1):
            counts[sizes[r]] = counts.get(sizes[r], 0) + 1
        recurring = [s for s, c in counts.items() if c >= recurrences]
        if not recurring:
            raise NoConstantSubsequence(
                f"no sphere size recurs {recurrences} times up to radius {bound} "
                "(superlinear growth, or the bound is too small)")
        k = min(recurring)
        radii = tuple(r for r in range(1, bound + 1) if sizes[r] == k)
    else:
        radii = tuple(radii)
        if not radii or any(r2 <= r1 for r1, r2 in zip(radii, radii[1:])) or radii[0] < 1:
            raise MalformedSubsequence("radii must be strictly increasing and >= 1")
        ld = layer_decomposition(g, radii[-1], budget)
        lens = {len(ld.layers[r]) for r in radii}
        if len(lens) != 1:
            raise UnequalLayers(f"selected spheres have sizes {sorted(lens)}")

    layers = [ld.layers[r] for r in radii]
    steps = []
    for t in range(len(radii) - 1):
        gap = radii[t + 1] - radii[t]
        pairs = []
        for x in layers[t]:
            if g.exact_distance is not None:
                pairs.extend((x, y) for y in layers[t + 1]
                             if g.exact_distance(x, y) == gap)
            else:
                depth = _bfs_depths(g, x, radius=gap, budget=budget)
                pairs.extend((x, y) for y in layers[t + 1] if depth.get(y) == gap)
        steps.append(pairs)
    return LayeredGraph.truncation(layers, steps, tags=radii)


def ray_to_monotone(g: RootedGraph, lg: LayeredGraph,
                    ray: GeodesicRay, budget: int = DEFAULT_BUDGET) -> MonotonePath:
    """The monotone path through exactly the ray's sphere intersections.

    ``lg`` must come from :func:`sphere_quotient` on the same graph (its
    layer tags carry the sphere radii).  A geodesic ray from o meets the
    sphere of radius m exactly at its vertex number m.
    """
    if lg.layer_tags is None:
        raise ValueError("layered graph carries no sphere radii; "
                         "build it with sphere_quotient")
    if not ray.starts_at(g):
        raise ValueError("ray must start at the basepoint")
    radii = lg.layer_tags
    if ray.length < radii[-1]:
        try:
            ray = extend_ray(g, ray, radii[-1], budget)
        except Exception as exc:
            raise RayTooShort(
                f"ray of length {ray.length} cannot cross the last sphere "
                f"(radius {radii[-1]})") from exc
    names = []
    for t, m in enumerate(radii):
        v = ray.vertices[m]
        if v not in lg.layer(t):
            raise ValueError(f"ray vertex {v!r} is not in sphere layer {t}; "
                             "was the layered graph built from this graph?")
        names.append(v)
    return MonotonePath(0, tuple(names))


def monotone_to_ray(g: RootedGraph, lg: LayeredGraph, path: MonotonePath,
                    budget: int = DEFAULT_BUDGET) -> GeodesicRay:
    """Companion lift: realize a monotone path of a sphere quotient as a
    geodesic ray from o, choosing canonical geodesic segments."""
    if lg.layer_tags is None:
        raise ValueError("layered graph carries no sphere radii")
    if path.infinite or path.start != 0 or len(path.head) != len(lg.layer_tags):
        raise ValueError("need a finite path through every sphere layer")
    radii = lg.layer_tags
    vertices = list(canonical_geodesic(g, g.basepoint, path.head[0], budget))
    if len(vertices) - 1 != radii[0]:
        raise ValueError("first vertex does not sit on its sphere")
    for t in range(len(radii) - 1):
        seg = canonical_geodesic(g, path.head[t], path.head[t + 1], budget)
        if len(seg) - 1 != radii[t + 1] - radii[t]:
            raise ValueError(f"no distance-realizing segment at step {t}")
        vertices.extend(seg[1:])
    return GeodesicRay(tuple(vertices))
