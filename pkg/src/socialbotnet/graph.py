"""Core graph types: users, roles, botnets and weighted action graphs."""
from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping


class UserRole(enum.Enum):
    BOT = "bot"
    LEGIT = "legit"
    SEED = "seed"

    @property
    def is_legit(self) -> bool:
        # seeds are trusted legitimate users
        return self is not UserRole.BOT


class ActionGraphError(ValueError):
    """Raised when interaction records cannot form a valid action graph.

    ``errors`` holds one human-readable message per offending record.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid interaction records:\n  " + "\n  ".join(self.errors))


@dataclass(frozen=True)
class BotnetInstance:
    """A set of bots and their non-bot follower sets.

    Parameters
    ----------
    bots : tuple of int
        Bot ids, in ascending order.
    followers : mapping
        ``bot -> frozenset`` of non-bot follower ids.
    follower_union : frozenset, optional
        Union of all follower sets. Computed when omitted, checked otherwise.
    """

    bots: tuple
    followers: Mapping[int, frozenset]
    follower_union: frozenset = None

    def __post_init__(self):
        bots = tuple(sorted(self.bots))
        if len(set(bots)) != len(bots):
            raise ValueError("duplicate bot ids")
        followers = {b: frozenset(self.followers.get(b, ())) for b in bots}
        extra = set(self.followers) - set(bots)
        if extra:
            raise ValueError(f"follower sets given for non-bots: {sorted(extra)[:5]}")
        union = frozenset().union(*followers.values()) if followers else frozenset()
        botset = set(bots)
        if union & botset:
            raise ValueError("follower sets must not contain bot ids")
        if self.follower_union is not None and frozenset(self.follower_union) != union:
            raise ValueError("follower_union does not match the union of follower sets")
        object.__setattr__(self, "bots", bots)
        object.__setattr__(self, "followers", followers)
        object.__setattr__(self, "follower_union", union)

    @property
    def n(self) -> int:
        return len(self.bots)

    def follower_count(self, bot: int) -> int:
        return len(self.followers[bot])

    def restrict(self, bots: Iterable[int]) -> "BotnetInstance":
        """Sub-instance over a subset of the bots (e.g. the ones still alive)."""
        keep = sorted(bots)
        return BotnetInstance(tuple(keep), {b: self.followers[b] for b in keep})


@dataclass(frozen=True)
class ActionGraph:
    """Weighted directed graph of retweet/reply/mention counts.

    ``arcs`` maps ``(src, dst)`` to a positive integer weight. Vertices may be
    isolated. Instances are treated as immutable once built.
    """

    vertices: frozenset
    arcs: Mapping[tuple, int]
    _out: dict = field(default=None, repr=False, compare=False)
    _in: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        out = defaultdict(dict)
        inc = defaultdict(dict)
        for (s, d), w in self.arcs.items():
            out[s][d] = w
            inc[d][s] = w
        object.__setattr__(self, "_out", dict(out))
        object.__setattr__(self, "_in", dict(inc))

    @property
    def num_arcs(self) -> int:
        return len(self.arcs)

    @property
    def total_weight(self) -> int:
        return sum(self.arcs.values())

    def successors(self, v: int) -> dict:
        """``dst -> weight`` for the outgoing arcs of ``v``."""
        self._check(v)
        return self._out.get(v, {})

    def predecessors(self, v: int) -> dict:
        """``src -> weight`` for the incoming arcs of ``v``."""
        self._check(v)
        return self._in.get(v, {})

    def out_weight(self, v: int) -> int:
        """Total weight of the outgoing arcs of ``v``; 0 for sinks."""
        return sum(self.successors(v).values())

    def in_weight(self, v: int) -> int:
        return sum(self.predecessors(v).values())

    def weight(self, src: int, dst: int) -> int:
        return self.arcs.get((src, dst), 0)

    def _check(self, v):
        if v not in self.vertices:
            raise KeyError(f"unknown vertex {v!r}")

    def with_arcs(self, extra_arcs: Mapping[tuple, int], extra_vertices=()) -> "ActionGraph":
        """New graph with additional arcs (weights added) and vertices."""
        arcs = dict(self.arcs)
        for key, w in extra_arcs.items():
            arcs[key] = arcs.get(key, 0) + w
        verts = set(self.vertices).union(extra_vertices)
        for s, d in extra_arcs:
            verts.add(s)
            verts.add(d)
        return ActionGraph(frozenset(verts), arcs)


def build_action_graph(records, isolated=()) -> ActionGraph:
    """Aggregate ``(src, dst, count)`` interaction records into an ActionGraph.

    Duplicate ``(src, dst)`` records are summed. ``isolated`` registers users
    with no recorded actions. Self-loops and non-positive counts are rejected;
    every bad record is reported, not just the first.
    """
    arcs: dict = {}
    verts = set(isolated)
    errors = []
    for i, rec in enumerate(records):
        try:
            src, dst, count = rec
        except (TypeError, ValueError):
            errors.append(f"record {i}: expected (src, dst, count), got {rec!r}")
            continue
        if src == dst:
            errors.append(f"record {i}: self-loop {src}->{dst}")
            continue
        if int(count) != count or count < 1:
            errors.append(f"record {i}: count must be a positive integer, got {count!r}")
            continue
        arcs[(src, dst)] = arcs.get((src, dst), 0) + int(count)
        verts.add(src)
        verts.add(dst)
    if errors:
        raise ActionGraphError(errors)
    return ActionGraph(frozenset(verts), arcs)
