"""Built-in group families as rooted Cayley graphs, the shift action on
value maps, finite-orbit analysis and homomorphism extraction.

Families and their normal forms:

    integers             int n
    integers-times-cyclic(m)   (n, t) with t in 0..m-1
    infinite-dihedral    (k, s): the isometry x -> (-1)^s x + k of the integers
    integer-lattice-2d   (a, b)
    free-2               reduced word over a, A, b, B (A = a inverse)

The group acts on value maps vanishing at the identity by
x.f(y) = f(x^-1 y) - f(x^-1); for Busemann tables this is x.b_z = b_{xz}.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from math import gcd
from typing import Any

from .errors import (
    AdditivityViolation,
    DomainTooSmall,
    GeneratorsDoNotGenerate,
    MalformedSpec,
    NotInvariant,
    TrivialImage,
)
from .graphs import (
    DEFAULT_BUDGET,
    RootedGraph,
    ValueMap,
    distance,
    layer_decomposition,
)

FAMILIES = (
    "integers",
    "integers-times-cyclic",
    "infinite-dihedral",
    "integer-lattice-2d",
    "free-2",
)


# ---------------------------------------------------------------------------
# family arithmetic


class Integers:
    name = "integers"
    identity = 0

    @staticmethod
    def mul(x, y):
        return x + y

    @staticmethod
    def inv(x):
        return -x

    @staticmethod
    def default_generators():
        return (-1, 1)

    @staticmethod
    def norm(x):
        return abs(x)

    @staticmethod
    def token(obj):
        if not isinstance(obj, int) or isinstance(obj, bool):
            raise MalformedSpec(f"integers element must be an int, got {obj!r}")
        return obj


class IntegersTimesCyclic:
    def __init__(self, modulus: int):
        if not isinstance(modulus, int) or modulus < 2:
            raise MalformedSpec("modulus must be an integer >= 2")
        self.modulus = modulus
        self.name = f"integers-times-cyclic({modulus})"
        self.identity = (0, 0)

    def mul(self, x, y):
        return (x[0] + y[0], (x[1] + y[1]) % self.modulus)

    def inv(self, x):
        return (-x[0], (-x[1]) % self.modulus)

    def default_generators(self):
        gens = {(1, 0), (-1, 0), (0, 1), (0, self.modulus - 1)}
        return tuple(sorted(gens))

    def norm(self, x):
        t = x[1]
        return abs(x[0]) + min(t, self.modulus - t)

    def token(self, obj):
        try:
            n, t = obj
        except (TypeError, ValueError):
            raise MalformedSpec(f"element must be a pair [n, t], got {obj!r}")
        if not isinstance(n, int) or not isinstance(t, int) or not 0 <= t < self.modulus:
            raise MalformedSpec(f"bad pair {obj!r} for modulus {self.modulus}")
        return (n, t)


class InfiniteDihedral:
    """Isometries of the integers; (k, s) is x -> (-1)^s x + k."""

    name = "infinite-dihedral"
    identity = (0, 0)

    @staticmethod
    def mul(x, y):
        (k1, s1), (k2, s2) = x, y
        e1 = -1 if s1 else 1
        return (k1 + e1 * k2, s1 ^ s2)

    @staticmethod
    def inv(x):
        (k, s) = x
        e = -1 if s else 1
        return (-e * k, s)

    @staticmethod
    def default_generators():
        # the two standard involutive reflections
        return ((0, 1), (1, 1))

    @staticmethod
    def norm(x):
        (k, s) = x
        return abs(2 * k - 1) if s else 2 * abs(k)

    @staticmethod
    def token(obj):
        try:
            k, s = obj
        except (TypeError, ValueError):
            raise MalformedSpec(f"element must be a pair [k, s], got {obj!r}")
        if not isinstance(k, int) or s not in (0, 1):
            raise MalformedSpec(f"bad dihedral pair {obj!r}")
        return (k, s)


class IntegerLattice2D:
    name = "integer-lattice-2d"
    identity = (0, 0)

    @staticmethod
    def mul(x, y):
        return (x[0] + y[0], x[1] + y[1])

    @staticmethod
    def inv(x):
        return (-x[0], -x[1])

    @staticmethod
    def default_generators():
        return ((-1, 0), (0, -1), (0, 1), (1, 0))

    @staticmethod
    def norm(x):
        return abs(x[0]) + abs(x[1])

    @staticmethod
    def token(obj):
        try:
            a, b = obj
        except (TypeError, ValueError):
            raise MalformedSpec(f"element must be a pair [a, b], got {obj!r}")
        if not isinstance(a, int) or not isinstance(b, int):
            raise MalformedSpec(f"bad lattice pair {obj!r}")
        return (a, b)


_FREE_INVERSE = {"a": "A", "A": "a", "b": "B", "B": "b"}


class Free2:
    name = "free-2"
    identity = ""

    @staticmethod
    def mul(x, y):
        # both inputs reduced: cancellation happens only at the joint
        i, j = len(x), 0
        while i > 0 and j < len(y) and x[i - 1] == _FREE_INVERSE[y[j]]:
            i -= 1
            j += 1
        return x[:i] + y[j:]

    @staticmethod
    def inv(x):
        return "".join(_FREE_INVERSE[c] for c in reversed(x))

    @staticmethod
    def default_generators():
        return ("A", "B", "a", "b")

    @staticmethod
    def norm(x):
        return len(x)

    @staticmethod
    def distance(x, y):
        # tree metric: cancel the longest common prefix
        i = 0
        m = min(len(x), len(y))
        while i < m and x[i] == y[i]:
            i += 1
        return len(x) + len(y) - 2 * i

    @staticmethod
    def token(obj):
        if not isinstance(obj, str):
            raise MalformedSpec(f"free-2 element must be a string, got {obj!r}")
        for c in obj:
            if c not in _FREE_INVERSE:
                raise MalformedSpec(f"bad letter {c!r} in word {obj!r}")
        for p, q in zip(obj, obj[1:]):
            if q == _FREE_INVERSE[p]:
                raise MalformedSpec(f"word {obj!r} is not reduced")
        return obj


@dataclass(frozen=True)
class GroupSpec:
    """A built-in family plus a finite symmetric generating set."""

    family: str
    generators: tuple | None = None
    modulus: int | None = None

    def resolve(self):
        if self.family == "integers":
            return Integers()
        if self.family == "integers-times-cyclic":
            return IntegersTimesCyclic(self.modulus or 0)
        if self.family == "infinite-dihedral":
            return InfiniteDihedral()
        if self.family == "integer-lattice-2d":
            return IntegerLattice2D()
        if self.family == "free-2":
            return Free2()
        raise MalformedSpec(
            f"unknown family {self.family!r}; expected one of {FAMILIES}")


class CayleyGraph(RootedGraph):
    """Cayley graph rooted at the identity; neighbors of x are x*s."""

    def __init__(self, group, generators):
        self.group = group
        self.generators = tuple(sorted(generators))
        use_exact = self.generators == tuple(sorted(group.default_generators()))
        exact = None
        if use_exact:
            exact = getattr(group, "distance", None)
            if exact is None:
                exact = lambda x, y: group.norm(group.mul(group.inv(x), y))
        super().__init__(
            lambda x: [group.mul(x, s) for s in self.generators],
            group.identity, degree_bound=len(self.generators),
            name=group.name, exact_distance=exact)


def _default_ball(group, radius):
    seen = {group.identity}
    frontier = [group.identity]
    for _ in range(radius):
        nxt = []
        for v in frontier:
            for s in group.default_generators():
                u = group.mul(v, s)
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        frontier = nxt
    return seen


def cayley_graph(spec: GroupSpec, budget: int = DEFAULT_BUDGET) -> CayleyGraph:
    """Build the rooted Cayley graph for a group spec.

    Generators must be closed under inversion and must generate: when a
    custom generating set is supplied, every element of the default-metric
    ball of radius 2 must show up in the custom ball of radius 12
    (GeneratorsDoNotGenerate otherwise).
    """
    group = spec.resolve()
    gens = spec.generators
    if gens is None:
        gens = group.default_generators()
    gens = tuple(sorted({group.token(s) for s in gens}))
    if not gens:
        raise MalformedSpec("empty generating set")
    if group.identity in gens:
        raise MalformedSpec("identity cannot be a generator")
    if {group.inv(s) for s in gens} != set(gens):
        raise MalformedSpec("generating set is not closed under inversion")
    g = CayleyGraph(group, gens)
    if g.generators != tuple(sorted(group.default_generators())):
        small = _default_ball(group, 2)
        ld = layer_decomposition(g, 12, budget)
        missing = [v for v in sorted(small) if v not in ld]
        if missing:
            raise GeneratorsDoNotGenerate(
                f"{len(missing)} small element(s) missing from B_12, "
                f"e.g. {missing[0]!r}")
    return g


# ---------------------------------------------------------------------------
# the action


def act(x, f: ValueMap, g: CayleyGraph, budget: int = DEFAULT_BUDGET) -> ValueMap:
    """x.f(y) = f(x^-1 y) - f(x^-1), restricted to the ball of radius
    f.radius - |x| so every lookup stays inside f's domain."""
    if not isinstance(g, CayleyGraph):
        raise TypeError("act requires a Cayley graph")
    if f.radius is None:
        raise ValueError("value map must carry its domain radius")
    group = g.group
    word_len = distance(g, g.basepoint, x, budget=budget)
    if word_len > f.radius:
        raise DomainTooSmall(
            f"|x| = {word_len} exceeds the map's domain radius {f.radius}")
    out_r = f.radius - word_len
    ball = layer_decomposition(g, out_r, budget).ball()
    fd = f.as_dict()
    xinv = group.inv(x)
    if xinv not in fd:
        raise DomainTooSmall(f"f is not defined at x^-1 = {xinv!r}")
    fx = fd[xinv]
    out = []
    for y in ball:
        key = group.mul(xinv, y)
        if key not in fd:
            raise DomainTooSmall(f"f is not defined at {key!r}")
        out.append(fd[key] - fx)
    return ValueMap(ball, tuple(out), radius=out_r)


# ---------------------------------------------------------------------------
# orbits and homomorphisms


@dataclass(frozen=True)
class OrbitResult:
    """A finite invariant set of restrictions, the generator action on it,
    and sampled stabilizer/coset data for the chosen least element."""

    members: tuple[ValueMap, ...]
    generators: tuple
    action_table: tuple[tuple[Any, tuple[int, ...]], ...]  # (generator, row)
    fixed: ValueMap
    orbit: tuple[ValueMap, ...]
    stabilizer_sample: tuple
    index_estimate: int
    radius: int
    images: tuple[tuple[Any, int], ...] = field(repr=False)  # x -> member index of x.fixed

    def image_of(self, x) -> int:
        return dict(self.images)[x]


def orbit_analysis(g: CayleyGraph, horos, R: int,
                   budget: int = DEFAULT_BUDGET) -> OrbitResult:
    """Action table of the generators on a finite set of restrictions, plus
    stabilizer and coset census of the least member over the ball B_R.

    The set must be closed under the generator action up to restriction
    (produced by enumerate_horofunction_restrictions with radius > R);
    NotInvariant is raised when a generator image matches no member, matches
    ambiguously, or fails to permute the set.
    """
    members = tuple(sorted(set(horos)))
    if not members:
        raise ValueError("empty set of restrictions")
    radii = {f.radius for f in members}
    if len(radii) != 1 or None in radii:
        raise ValueError("members must share one domain radius")
    r = radii.pop()
    if r < max(R, 1):
        raise ValueError(f"member radius {r} too small for ball R={R}")

    inner = layer_decomposition(g, r - 1, budget).ball()
    fingerprint = {}
    for i, f in enumerate(members):
        fp = f.restrict(inner)
        if fp in fingerprint:
            raise NotInvariant(
                "two members agree on the common domain; increase the radius")
        fingerprint[fp] = i

    rows = []
    for s in g.generators:
        row = []
        for f in members:
            image = act(s, f, g, budget)
            idx = fingerprint.get(image)
            if idx is None:
                raise NotInvariant(
                    f"generator {s!r} maps a member outside the set "
                    "(radius too small or set incomplete)")
            row.append(idx)
        if len(set(row)) != len(members):
            raise NotInvariant(f"generator {s!r} does not permute the set")
        rows.append((s, tuple(row)))
    table = dict(rows)

    # walk B_R through the action table: (p*s).f = p.(s.f)
    ld = layer_decomposition(g, R, budget)
    perms: dict[Any, tuple[int, ...]] = {g.basepoint: tuple(range(len(members)))}
    for depth in range(1, R + 1):
        for v in ld.layers[depth]:
            prev = min(u for u in g.neighbors(v) if u in ld and ld.depth_of(u) == depth - 1)
            s = g.group.mul(g.group.inv(prev), v)
            ps, pp = table[s], perms[prev]
            perms[v] = tuple(pp[ps[i]] for i in range(len(members)))

    i0 = members.index(min(members))
    images = {x: perm[i0] for x, perm in perms.items()}
    stab = tuple(sorted(x for x, i in images.items() if i == i0))
    orbit_idx = sorted(set(images.values()))
    return OrbitResult(
        members=members, generators=g.generators, action_table=tuple(rows),
        fixed=members[i0], orbit=tuple(members[i] for i in orbit_idx),
        stabilizer_sample=stab, index_estimate=len(orbit_idx), radius=R,
        images=tuple(sorted(images.items())))


@dataclass(frozen=True)
class HomomorphismWitness:
    """Sampled evidence that the fixed restriction is a homomorphism to the
    integers on its stabilizer, with nontrivial image of gcd d."""

    base: ValueMap
    sampled_values: tuple[tuple[Any, int], ...]
    image_gcd: int
    coset_shifts: tuple[tuple[Any, int], ...]
    kernel_sample: tuple


def extract_homomorphism(orb: OrbitResult, g: CayleyGraph,
                         budget: int = DEFAULT_BUDGET) -> HomomorphismWitness:
    """Verify additivity f(hx) = f(h) + f(x) for every sampled stabilizer
    element h and every x in B_R with hx inside f's domain, compute the gcd
    of the sampled stabilizer values, and emit the per-coset shift table."""
    f = orb.fixed
    fd = f.as_dict()
    group = g.group
    ball = layer_decomposition(g, orb.radius, budget).ball()
    for h in orb.stabilizer_sample:
        fh = fd[h]
        for x in ball:
            p = group.mul(h, x)
            if p in fd and fd[p] != fh + fd[x]:
                raise AdditivityViolation(
                    f"f({h!r}*{x!r}) = {fd[p]} but f(h)+f(x) = {fh + fd[x]}; "
                    "the fixed map is not truly fixed (upstream approximation)")
    values = {h: fd[h] for h in orb.stabilizer_sample}
    d = 0
    for v in values.values():
        d = gcd(d, abs(v))
    if d == 0:
        raise TrivialImage(
            "all sampled stabilizer values are zero (radius or ball too small)")

    img = dict(orb.images)
    classes: dict[int, list] = {}
    for x in ball:
        classes.setdefault(img[group.inv(x)], []).append(x)
    shifts = {min(xs): fd[min(xs)] for xs in classes.values()}
    kernel = tuple(h for h, v in sorted(values.items()) if v == 0)
    return HomomorphismWitness(
        base=f, sampled_values=tuple(sorted(values.items())), image_gcd=d,
        coset_shifts=tuple(sorted(shifts.items())), kernel_sample=kernel)
