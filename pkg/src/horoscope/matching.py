"""Bipartite maximum matching with Hall violator certificates.

Deterministic augmenting-path (Kuhn) matching over canonically sorted
vertices: identical inputs give identical matchings, which the regression
tests rely on.  When no perfect matching exists, a Hall certificate is
extracted: a left subset Y whose neighborhood is strictly smaller than Y.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


@dataclass(frozen=True)
class Matching:
    """A perfect matching, stored left -> right."""

    pairs: tuple[tuple[Any, Any], ...]

    def as_dict(self):
        return dict(self.pairs)


@dataclass(frozen=True)
class HallViolator:
    """Left subset Y with |N(Y)| < |Y|, certifying no perfect matching."""

    subset: tuple[Any, ...]
    neighborhood: tuple[Any, ...]


def maximum_matching(left, adjacency) -> dict:
    """Maximum matching via augmenting paths; returns left -> right pairs."""
    match_left: dict = {}
    match_right: dict = {}

    def augment(u, seen):
        for v in adjacency.get(u, ()):
            if v in seen:
                continue
            seen.add(v)
            if v not in match_right or augment(match_right[v], seen):
                match_left[u] = v
                match_right[v] = u
                return True
        return False

    for u in sorted(left):
        augment(u, set())
    return match_left


def matching_or_violator(left, right, adjacency):
    """Perfect matching between equal-size sides, or a Hall certificate.

    ``adjacency`` maps left vertices to iterables of right vertices.  Returns
    either a :class:`Matching` or a :class:`HallViolator` whose subset is the
    set of left vertices reachable by alternating paths from the least
    unmatched one (so |N(Y)| = |Y| - 1).
    """
    left = sorted(left)
    right = sorted(right)
    assert len(left) == len(right), "sides must have equal cardinality"
    adj = {u: tuple(sorted(set(adjacency.get(u, ())))) for u in left}
    match_left = maximum_matching(left, adj)
    if len(match_left) == len(left):
        return Matching(tuple(sorted(match_left.items())))
    match_right = {v: u for u, v in match_left.items()}
    start = min(u for u in left if u not in match_left)
    ys = {start}
    nbhd: set = set()
    frontier = [start]
    while frontier:
        u = frontier.pop()
        for v in adj[u]:
            if v in nbhd:
                continue
            nbhd.add(v)
            w = match_right.get(v)
            if w is not None and w not in ys:
                ys.add(w)
                frontier.append(w)
    assert len(nbhd) < len(ys)
    return HallViolator(tuple(sorted(ys)), tuple(sorted(nbhd)))
