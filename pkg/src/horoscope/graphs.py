"""Rooted locally finite graphs and their metric structure.

The central object is :class:`RootedGraph`: a basepoint plus a neighbor
oracle returning canonically sorted finite neighbor lists, so graphs may be
infinite and are explored lazily by BFS.  On top of it live sphere
decompositions, Busemann tables b_z(y) = d(z,y) - d(z,o), geodesic rays
(finite prefixes plus an extension policy), stabilized horofunction
restrictions, and ray rerooting.

All operations are pure; graphs are immutable apart from internal BFS memo
tables, and results are independent of call history, so shared instances are
safe to use concurrently.  Every BFS takes a vertex-exploration cap and
raises :class:`~horoscope.errors.BudgetExhausted` rather than silently
truncating.
"""

from __future__ import annotations

from bisect import bisect_left
from collections import deque
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from typing import Any

from .errors import (
    BudgetExhausted,
    EmptySphere,
    MalformedSpec,
    NotGeodesic,
    PrefixTooShort,
    RayNotExtendable,
)

Vertex = Any  # canonical token; any sortable, hashable value (per-graph homogeneous)

DEFAULT_BUDGET = 1_000_000


class RootedGraph:
    """A locally finite graph with basepoint, given by a neighbor oracle.

    Parameters
    ----------
    neighbor_fn:
        Maps a vertex token to a finite iterable of neighbor tokens.  Must be
        deterministic; the result is sorted and memoized, so the canonical
        neighbor order is the sort order of the tokens.
    basepoint:
        The root vertex o.
    degree_bound:
        Optional declared bound on vertex degrees, checked on every query.
    exact_distance:
        Optional exact metric d(x, y).  When present it is used instead of
        BFS for distance queries; tests cross-check it against BFS.
    """

    def __init__(self, neighbor_fn: Callable[[Vertex], Iterable[Vertex]],
                 basepoint: Vertex, *, degree_bound: int | None = None,
                 name: str = "graph",
                 exact_distance: Callable[[Vertex, Vertex], int] | None = None):
        self._neighbor_fn = neighbor_fn
        self.basepoint = basepoint
        self.degree_bound = degree_bound
        self.name = name
        self.exact_distance = exact_distance
        self._nbrs: dict[Vertex, tuple[Vertex, ...]] = {}
        # BFS-from-basepoint cache: complete layers only
        self._layers: list[list[Vertex]] = [[basepoint]]
        self._depth: dict[Vertex, int] = {basepoint: 0}
        self._ld_cache: dict[int, "LayerDecomposition"] = {}

    def __repr__(self):
        return f"RootedGraph({self.name!r}, o={self.basepoint!r})"

    def neighbors(self, v: Vertex) -> tuple[Vertex, ...]:
        out = self._nbrs.get(v)
        if out is None:
            out = tuple(sorted(self._neighbor_fn(v)))
            if self.degree_bound is not None and len(out) > self.degree_bound:
                raise MalformedSpec(
                    f"vertex {v!r} has degree {len(out)} > bound {self.degree_bound}")
            self._nbrs[v] = out
        return out

    def distance0(self, v: Vertex, budget: int = DEFAULT_BUDGET) -> int:
        """d(o, v)."""
        return distance(self, self.basepoint, v, budget=budget)

    # -- internal BFS-from-o cache ------------------------------------------

    def _ensure_layers(self, radius: int, budget: int) -> None:
        # the budget caps |B_radius| for this call, independent of how much
        # deeper the memoized exploration already reaches
        size = sum(len(l) for l in self._layers[: radius + 1])
        if size > budget:
            raise BudgetExhausted(f"|B_{radius}| = {size} exceeds budget {budget}")
        while len(self._layers) <= radius:
            frontier = self._layers[-1]
            r = len(self._layers)
            nxt = []
            for v in frontier:
                for u in self.neighbors(v):
                    if u not in self._depth:
                        self._depth[u] = r
                        nxt.append(u)
            self._layers.append(sorted(nxt))
            size += len(nxt)
            if size > budget:
                raise BudgetExhausted(
                    f"exploring B_{radius} exceeded budget {budget} at radius {r}")


def _bfs_depths(g: RootedGraph, source: Vertex, *, radius: int | None = None,
                targets: set | None = None, budget: int = DEFAULT_BUDGET) -> dict:
    """BFS depth map from ``source``, stopping at ``radius`` or once all
    ``targets`` have been found.  Raises BudgetExhausted on cap overrun or if
    the reachable component is exhausted with targets missing."""
    depth = {source: 0}
    missing = set(targets) - {source} if targets is not None else None
    q = deque([source])
    while q:
        v = q.popleft()
        r = depth[v]
        if radius is not None and r >= radius:
            continue
        for u in g.neighbors(v):
            if u not in depth:
                depth[u] = r + 1
                if len(depth) > budget:
                    raise BudgetExhausted(
                        f"BFS from {source!r} exceeded budget {budget}")
                if missing is not None:
                    missing.discard(u)
                q.append(u)
        if missing is not None and not missing:
            return depth
    if missing:
        raise BudgetExhausted(
            f"BFS from {source!r} exhausted its component; "
            f"{len(missing)} target(s) unreachable (disconnected or cap too small)")
    return depth


# ---------------------------------------------------------------------------
# value maps


@dataclass(frozen=True, order=True)
class ValueMap:
    """Integer-valued map on a finite vertex set, stored canonically sorted.

    ``domain`` is the sorted token tuple and ``values`` the parallel value
    tuple; the split lets large maps share one domain object.  Hashable and
    totally ordered (domain, then values, lexicographically), which gives
    exact set semantics and a deterministic "least map" tie-break.
    ``radius`` records the ball the map was computed over; it does not take
    part in comparisons.
    """

    domain: tuple[Vertex, ...]
    values: tuple[int, ...]
    radius: int | None = field(default=None, compare=False)

    @classmethod
    def from_dict(cls, values: dict, radius: int | None = None) -> "ValueMap":
        toks = tuple(sorted(values))
        return cls(toks, tuple(values[t] for t in toks), radius)

    @property
    def items(self) -> tuple[tuple[Vertex, int], ...]:
        return tuple(zip(self.domain, self.values))

    def as_dict(self) -> dict:
        memo = self.__dict__.get("_dict")
        if memo is None:
            memo = dict(zip(self.domain, self.values))
            object.__setattr__(self, "_dict", memo)
        return memo

    def value(self, v: Vertex) -> int:
        i = bisect_left(self.domain, v)
        if i == len(self.domain) or self.domain[i] != v:
            raise KeyError(v)
        return self.values[i]

    def restrict(self, tokens, radius: int | None = None) -> "ValueMap":
        keep = set(tokens)
        pairs = [(t, x) for t, x in zip(self.domain, self.values) if t in keep]
        return ValueMap(tuple(t for t, _ in pairs), tuple(x for _, x in pairs),
                        radius)

    def to_jsonable(self):
        return [[_token_jsonable(tok), val]
                for tok, val in zip(self.domain, self.values)]


def _token_jsonable(tok):
    if isinstance(tok, tuple):
        return [_token_jsonable(t) for t in tok]
    return tok


# ---------------------------------------------------------------------------
# sphere decomposition


class LayerDecomposition:
    """Spheres S_0..S_R about the basepoint: S_r = B_r minus B_{r-1}.

    The depth map may be shared with the graph's (monotonically growing)
    BFS cache; lookups are guarded by the decomposition's own radius.
    """

    def __init__(self, radius: int, layers: tuple[tuple[Vertex, ...], ...],
                 depth_map: dict):
        self.radius = radius
        self.layers = layers
        self._depth = depth_map
        self._balls: dict[int, tuple] = {}

    @property
    def sphere_sizes(self) -> list[int]:
        return [len(layer) for layer in self.layers]

    def ball(self, r: int | None = None) -> tuple[Vertex, ...]:
        """All vertices with d(o, v) <= r, canonically sorted."""
        if r is None:
            r = self.radius
        cached = self._balls.get(r)
        if cached is None:
            cached = tuple(sorted(
                v for layer in self.layers[: r + 1] for v in layer))
            self._balls[r] = cached
        return cached

    def depth_of(self, v: Vertex) -> int:
        d = self._depth.get(v)
        if d is None or d > self.radius:
            raise KeyError(v)
        return d

    def __contains__(self, v: Vertex) -> bool:
        d = self._depth.get(v)
        return d is not None and d <= self.radius


def layer_decomposition(g: RootedGraph, radius: int,
                        budget: int = DEFAULT_BUDGET) -> LayerDecomposition:
    """BFS sphere decomposition of B_radius about the basepoint."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    g._ensure_layers(radius, budget)
    ld = g._ld_cache.get(radius)
    if ld is None:
        ld = LayerDecomposition(
            radius, tuple(tuple(layer) for layer in g._layers[: radius + 1]),
            g._depth)
        g._ld_cache[radius] = ld
    return ld


def distance(g: RootedGraph, x: Vertex, y: Vertex,
             budget: int = DEFAULT_BUDGET) -> int:
    """Graph distance d(x, y) (exact metric when the graph carries one,
    otherwise BFS under the exploration budget)."""
    if x == y:
        return 0
    if g.exact_distance is not None:
        return g.exact_distance(x, y)
    return _bfs_depths(g, x, targets={y}, budget=budget)[y]


def _distances_from(g: RootedGraph, z: Vertex, targets: Sequence[Vertex],
                    budget: int) -> dict:
    """d(z, y) for every y in targets."""
    if g.exact_distance is not None:
        return {y: g.exact_distance(z, y) for y in targets}
    tset = set(targets)
    depth = _bfs_depths(g, z, targets=tset, budget=budget)
    return {y: d for y, d in depth.items() if y in tset}


# ---------------------------------------------------------------------------
# Busemann tables


@dataclass(frozen=True)
class BusemannTable:
    """The normalized distance profile y -> d(z,y) - d(z,o) over a ball."""

    source: Vertex
    radius: int
    values: ValueMap


def busemann(g: RootedGraph, z: Vertex, r: int,
             budget: int = DEFAULT_BUDGET) -> BusemannTable:
    """Busemann table of z over B_r.  values(o) = 0 by construction."""
    if r < 0:
        raise ValueError("r must be >= 0")
    ld = layer_decomposition(g, r, budget)
    ball = ld.ball()
    if g.exact_distance is not None:
        ed = g.exact_distance
        base = ed(z, g.basepoint)
        vm = ValueMap(ball, tuple(ed(z, y) - base for y in ball), radius=r)
    else:
        dist = _distances_from(g, z, list(ball) + [g.basepoint], budget)
        base = dist[g.basepoint]
        vm = ValueMap(ball, tuple(dist[y] - base for y in ball), radius=r)
    return BusemannTable(source=z, radius=r, values=vm)


# ---------------------------------------------------------------------------
# geodesic rays


@dataclass(frozen=True)
class GeodesicRay:
    """A geodesic prefix (x_0, ..., x_L) plus an optional extension policy.

    The policy, when given, is a callable (graph, prefix_tuple) -> vertex
    proposing the next vertex; it must increase the distance from x_0 by one.
    Without a policy, extension picks the canonically least neighbor that
    does so.
    """

    vertices: tuple[Vertex, ...]
    extension: Callable | None = field(default=None, compare=False)

    @property
    def length(self) -> int:
        return len(self.vertices) - 1

    def starts_at(self, g: RootedGraph) -> bool:
        return self.vertices[0] == g.basepoint


def validate_ray(g: RootedGraph, ray: GeodesicRay,
                 budget: int = DEFAULT_BUDGET) -> None:
    """Raise NotGeodesic unless consecutive vertices are adjacent and
    d(x_0, x_n) = n for every prefix position."""
    vs = ray.vertices
    if not vs:
        raise NotGeodesic("empty vertex sequence")
    for a, b in zip(vs, vs[1:]):
        if b not in g.neighbors(a):
            raise NotGeodesic(f"{a!r} and {b!r} are not adjacent")
    if g.exact_distance is not None:
        for n, v in enumerate(vs):
            if g.exact_distance(vs[0], v) != n:
                raise NotGeodesic(f"d(x_0, x_{n}) != {n}")
    else:
        depth = _bfs_depths(g, vs[0], radius=len(vs) - 1, budget=budget)
        for n, v in enumerate(vs):
            if depth.get(v) != n:
                raise NotGeodesic(f"d(x_0, x_{n}) != {n}")


def extend_ray(g: RootedGraph, ray: GeodesicRay, length: int,
               budget: int = DEFAULT_BUDGET) -> GeodesicRay:
    """Extend the prefix to the requested length.

    Uses the ray's own extension policy when present, else the canonical
    one (least neighbor increasing the distance from x_0).  Raises
    RayNotExtendable when no neighbor qualifies.
    """
    vs = list(ray.vertices)
    if len(vs) - 1 >= length:
        return ray
    x0 = vs[0]
    depth = None
    if g.exact_distance is None:
        depth = _bfs_depths(g, x0, radius=length, budget=budget)

    def dist_from_start(u):
        return g.exact_distance(x0, u) if depth is None else depth.get(u, -1)

    while len(vs) - 1 < length:
        tip = vs[-1]
        want = len(vs)  # required distance from x_0 for the next vertex
        if ray.extension is not None:
            nxt = ray.extension(g, tuple(vs))
            if nxt is None:
                raise RayNotExtendable(f"policy gave up at length {len(vs) - 1}")
            if nxt not in g.neighbors(tip) or dist_from_start(nxt) != want:
                raise NotGeodesic(
                    f"extension policy proposed {nxt!r}, which does not extend "
                    "the geodesic")
        else:
            cands = [u for u in g.neighbors(tip) if dist_from_start(u) == want]
            if not cands:
                raise RayNotExtendable(
                    f"no distance-increasing neighbor at {tip!r} "
                    f"(length {len(vs) - 1})")
            nxt = min(cands)
        vs.append(nxt)
    return GeodesicRay(tuple(vs), ray.extension)


def canonical_ray(g: RootedGraph, length: int,
                  budget: int = DEFAULT_BUDGET) -> GeodesicRay:
    """The canonical geodesic ray from the basepoint (least-vertex policy)."""
    return extend_ray(g, GeodesicRay((g.basepoint,)), length, budget)


def canonical_geodesic(g: RootedGraph, a: Vertex, b: Vertex,
                       budget: int = DEFAULT_BUDGET) -> tuple[Vertex, ...]:
    """The canonical geodesic a -> b: walk from a, at every position taking
    the least neighbor strictly closer to b."""
    if a == b:
        return (a,)
    if g.exact_distance is not None:
        dist_b = lambda u: g.exact_distance(u, b)
        d0 = dist_b(a)
    else:
        depth = _bfs_depths(g, b, targets={a}, budget=budget)
        # depth may not cover every neighbor on the way; extend to radius d(a,b)
        depth = _bfs_depths(g, b, radius=depth[a], budget=budget)
        dist_b = lambda u: depth.get(u, -1)
        d0 = depth[a]
    path = [a]
    cur = a
    for step in range(d0, 0, -1):
        cands = [u for u in g.neighbors(cur) if dist_b(u) == step - 1]
        cur = min(cands)
        path.append(cur)
    return tuple(path)


# ---------------------------------------------------------------------------
# horofunction approximation


@dataclass(frozen=True)
class HorofunctionApprox:
    """Stabilized restriction of lim_n b_{z_n} to a ball B_r.

    ``status`` is "stabilized" only when every value sits at its rigorous
    floor -d(o, y), where the non-increasing integer sequence b_{z_n}(y)
    cannot decrease further; otherwise "heuristic", certified only by
    ``window`` consecutive constant observations beyond ``stabilization_depth``.
    """

    ray: GeodesicRay
    radius: int
    values: ValueMap
    stabilization_depth: int
    window: int
    status: str
    floor_certified: int


def horofunction_approx(g: RootedGraph, ray: GeodesicRay, r: int, window: int,
                        budget: int = DEFAULT_BUDGET,
                        max_depth: int | None = None) -> HorofunctionApprox:
    """Follow b_{z_n} along the ray until every value in B_r has been
    constant for ``window`` consecutive steps.

    The ray must start at the basepoint (reroot first otherwise); it is
    extended on demand through its policy.  Along a geodesic from o the
    sequence n -> b_{z_n}(y) is non-increasing and bounded below by
    -d(o, y), so it is eventually constant and the loop terminates.
    """
    if not ray.starts_at(g):
        raise NotGeodesic("ray must start at the basepoint; use reroot_ray first")
    if r < 0 or window < 1:
        raise ValueError("need r >= 0 and window >= 1")
    ld = layer_decomposition(g, r, budget)
    ball = ld.ball()
    if max_depth is None:
        max_depth = 50 * (r + 1) + 10 * window

    current = {y: ld.depth_of(y) for y in ball}  # b_o(y) = d(o, y)
    run_start = {y: 0 for y in ball}
    n = 0
    while True:
        if n - max(run_start.values()) >= window:
            break
        n += 1
        if n > max_depth:
            raise BudgetExhausted(
                f"no stabilization of all {len(ball)} values within depth {max_depth}")
        ray = extend_ray(g, ray, n, budget)
        z = ray.vertices[n]
        dist = _distances_from(g, z, list(ball) + [g.basepoint], budget)
        base = dist[g.basepoint]
        if base != n:
            raise NotGeodesic(f"ray vertex {n} is at distance {base} from o")
        for y in ball:
            val = dist[y] - base
            if val > current[y]:
                raise NotGeodesic(
                    f"b_(z_n)({y!r}) increased at n={n}: ray is not geodesic from o")
            if val < current[y]:
                current[y] = val
                run_start[y] = n

    floors = sum(1 for y in ball if current[y] == -ld.depth_of(y))
    status = "stabilized" if floors == len(ball) else "heuristic"
    return HorofunctionApprox(
        ray=ray, radius=r, values=ValueMap.from_dict(current, radius=r),
        stabilization_depth=max(run_start.values()), window=window,
        status=status, floor_certified=floors)


def enumerate_horofunction_restrictions(
        g: RootedGraph, r: int, depth: int, window: int,
        budget: int = DEFAULT_BUDGET) -> tuple[ValueMap, ...]:
    """Distinct Busemann restrictions to B_r that persist across a window of
    sphere depths.

    For every N in [max(2r + 1, depth - window), depth], collect the set
    of restrictions of b_z to B_r over z in S_N, and intersect the sets.
    The lower clamp keeps the window away from spheres closer than 2r,
    where profiles of true limits have not stabilized yet; with
    depth > 2r + window (the recommended regime) it never engages.  The
    result converges to the true limit set for the built-in families as
    depth grows, and every returned map is 1-Lipschitz with value 0 at o.
    """
    if r < 1:
        raise ValueError("r must be >= 1")
    if depth < 2 * r + 1:
        raise ValueError(f"depth must be >= 2r + 1 = {2 * r + 1}")
    lo = max(2 * r + 1, depth - window)
    ld = layer_decomposition(g, depth, budget)
    ball = ld.ball(r)
    result: set[ValueMap] | None = None
    for n in range(lo, depth + 1):
        sphere = ld.layers[n]
        if not sphere:
            raise EmptySphere(
                f"S_{n} is empty: graph is finite, no horofunctions exist")
        seen = set()
        for z in sphere:
            dist = _distances_from(g, z, list(ball) + [g.basepoint], budget)
            base = dist[g.basepoint]
            seen.add(ValueMap(ball, tuple(dist[y] - base for y in ball), radius=r))
        result = seen if result is None else (result & seen)
    return tuple(sorted(result))


# ---------------------------------------------------------------------------
# rerooting


def reroot_ray(g: RootedGraph, ray: GeodesicRay,
               budget: int = DEFAULT_BUDGET) -> tuple[int, GeodesicRay]:
    """Turn a geodesic prefix from an arbitrary start into one from o.

    The sequence c_n = d(x_n, o) - d(x_n, x_0) is non-increasing and bounded
    below, hence eventually constant, say from index N on; from there the
    distances d(x_n, o) grow by one per step, so a canonical geodesic
    o -> x_N followed by (x_{N+1}, ...) is geodesic from o.  Returns
    (N, rerooted ray).  Raises PrefixTooShort until constancy has been
    witnessed for at least one step beyond its last change.
    """
    vs = ray.vertices
    length = len(vs) - 1
    if g.exact_distance is not None:
        d_o = [g.exact_distance(g.basepoint, v) for v in vs]
    else:
        depth = _bfs_depths(g, g.basepoint, targets=set(vs), budget=budget)
        d_o = [depth[v] for v in vs]
    c = [d_o[n] - n for n in range(len(vs))]
    for a, b in zip(c, c[1:]):
        if b > a:
            raise NotGeodesic("d(x_n, o) - n increased along the prefix")
    last_change = 0
    for n in range(1, len(c)):
        if c[n] != c[n - 1]:
            last_change = n
    if length < last_change + 1:
        raise PrefixTooShort(
            f"constancy from index {last_change} not yet witnessed one step "
            "beyond; extend the ray and retry")
    n0 = last_change
    head = canonical_geodesic(g, g.basepoint, vs[n0], budget)
    # constancy of c from n0 on gives d(o, x_j) = d(o, x_{n0}) + (j - n0),
    # so the splice is geodesic from o position by position
    return n0, GeodesicRay(head + vs[n0 + 1:], ray.extension)


# ---------------------------------------------------------------------------
# explicit finite graphs (test fixtures)


def explicit_graph(vertices: Sequence[Vertex], edges: Sequence[Sequence[Vertex]],
                   basepoint: Vertex, name: str = "explicit") -> RootedGraph:
    """Finite graph from a vertex list and undirected edge pairs."""
    vset = set(vertices)
    if len(vset) != len(list(vertices)):
        raise MalformedSpec("duplicate vertices")
    if basepoint not in vset:
        raise MalformedSpec(f"basepoint {basepoint!r} not among vertices")
    adj: dict[Vertex, set] = {v: set() for v in vertices}
    for e in edges:
        if len(e) != 2:
            raise MalformedSpec(f"edge {e!r} is not a pair")
        u, v = e
        if u not in vset or v not in vset:
            raise MalformedSpec(f"edge {e!r} references unknown vertex")
        if u == v:
            raise MalformedSpec(f"self-loop {e!r} not allowed")
        adj[u].add(v)
        adj[v].add(u)
    frozen = {v: tuple(sorted(s)) for v, s in adj.items()}
    return RootedGraph(lambda v: frozen[v], basepoint, name=name)


def verify_symmetric(g: RootedGraph, vertices: Iterable[Vertex]) -> None:
    """Check the neighbor-oracle symmetry invariant on a finite vertex set."""
    for v in vertices:
        for u in g.neighbors(v):
            if v not in g.neighbors(u):
                raise MalformedSpec(
                    f"asymmetric adjacency: {u!r} in N({v!r}) but not conversely")
