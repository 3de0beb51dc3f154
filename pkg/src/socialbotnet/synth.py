"""Synthetic botnets, legitimate action graphs and ground-truth attack networks.

Id layout: legitimate users occupy ``0 .. pool-1`` and bots follow directly
after them, so bot ids always exceed every legitimate id.
"""
from __future__ import annotations

import enum
import json
import math
import warnings
from collections import deque
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path

import numpy as np

from .graph import ActionGraph, BotnetInstance, UserRole
from .io import write_edge_list, write_roles


@dataclass(frozen=True)
class SynthFollowerConfig:
    n: int = 400
    follower_pool: int = 6000
    mu: float = 32.0
    sigma2: float = 5.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.follower_pool < 1:
            raise ValueError("need n >= 1 and follower_pool >= 1")
        if self.mu <= 0 or self.sigma2 < 0:
            raise ValueError("need mu > 0 and sigma2 >= 0")

    @property
    def legit_users(self) -> range:
        return range(self.follower_pool)


def gen_follower_sets(cfg: SynthFollowerConfig) -> BotnetInstance:
    """Gaussian follower counts, members drawn uniformly without replacement from the pool."""
    rng = np.random.default_rng(cfg.rng_seed)
    draws = rng.normal(cfg.mu, math.sqrt(cfg.sigma2), size=cfg.n)
    sizes = np.clip(np.floor(draws + 0.5), 0, cfg.follower_pool).astype(int)
    followers = {}
    for i, size in enumerate(sizes):
        members = rng.choice(cfg.follower_pool, size=int(size), replace=False)
        followers[cfg.follower_pool + i] = frozenset(int(x) for x in members)
    return BotnetInstance(tuple(followers), followers)


def gen_legit_graph(
    n_users, mean_out_degree=14.6, mean_weight=3.2, popularity_shape=1.2, activity_exponent=1.0, rng_seed=0
):
    """Random legitimate interaction graph with heavy-tailed popularity.

    Every user gets a Pareto fitness. Targets of interactions are drawn in
    proportion to fitness and a user's expected number of interactions
    scales with ``fitness ** activity_exponent`` (popular accounts are also
    the active ones), normalised to ``mean_out_degree``. Repeated targets
    merge into one heavier arc; arc weights are geometric with mean
    ``mean_weight``. Ids are independent of fitness.

    Defaults match the densest city-scale crawl: about 14.6 arcs per user
    and 3.2 actions per arc.
    """
    rng = np.random.default_rng(rng_seed)
    fitness = rng.pareto(popularity_shape, size=n_users) + 1.0
    popularity = fitness / fitness.sum()
    activity = fitness**activity_exponent
    activity *= mean_out_degree / activity.mean()
    degree = rng.poisson(activity)
    src = np.repeat(np.arange(n_users), degree)
    dst = rng.choice(n_users, size=src.size, p=popularity)
    weight = rng.geometric(1.0 / mean_weight, size=src.size)
    keep = src != dst
    arcs = {}
    for s, d, w in zip(src[keep].tolist(), dst[keep].tolist(), weight[keep].tolist()):
        arcs[(s, d)] = arcs.get((s, d), 0) + w
    return ActionGraph(frozenset(range(n_users)), arcs)


def pick_seeds(graph: ActionGraph, count: int, rng_seed=0) -> frozenset:
    """Uniformly random trusted seeds among users with at least one outgoing arc."""
    active = sorted(v for v in graph.vertices if graph.successors(v))
    if count > len(active):
        raise ValueError(f"cannot pick {count} seeds from {len(active)} active users")
    rng = np.random.default_rng(rng_seed)
    return frozenset(int(x) for x in rng.choice(active, size=count, replace=False))


class AttackKind(enum.Enum):
    RANDOM = "random"
    SEED_TARGETING = "seed_targeting"


@dataclass(frozen=True)
class AttackConfig:
    omega: float
    g: int = None
    attack_kind: AttackKind = AttackKind.RANDOM
    candidate_pool_factor: int = 100

    def __post_init__(self):
        if isinstance(self.attack_kind, str):
            object.__setattr__(self, "attack_kind", AttackKind(self.attack_kind))
        if self.omega < 0:
            raise ValueError("omega must be non-negative")
        if self.candidate_pool_factor < 1:
            raise ValueError("candidate_pool_factor must be >= 1")

    def edge_count(self, g: int) -> int:
        """round(omega * g), halves rounded up."""
        return int((Decimal(repr(self.omega)) * g).quantize(Decimal(1), rounding=ROUND_HALF_UP))


@dataclass
class GroundTruthNetwork:
    """Legitimate action graph joined to a botnet through attack edges.

    The botnet is completely connected internally; those arcs are implied
    (``botnet_complete``) rather than stored in ``action_graph``.
    """

    action_graph: ActionGraph
    roles: dict
    attack_edges: list
    bots: tuple
    botnet_complete: bool = True
    pool_shortfall: bool = False
    meta: dict = field(default_factory=dict)

    @property
    def legit_users(self):
        return sorted(u for u, r in self.roles.items() if r.is_legit)

    def sidecar(self) -> dict:
        return {
            **self.meta,
            "bots": [self.bots[0], self.bots[-1]] if self.bots else [],
            "bot_count": len(self.bots),
            "botnet_complete": self.botnet_complete,
            "pool_shortfall": self.pool_shortfall,
            "attack_edges": [list(e) for e in self.attack_edges],
        }

    def write(self, out_dir, stem="ground_truth"):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_edge_list(self.action_graph, out / f"{stem}.edges.tsv")
        write_roles(self.roles, out / f"{stem}.roles.tsv")
        (out / f"{stem}.json").write_text(json.dumps(self.sidecar(), sort_keys=True, indent=1) + "\n")


def hop_distances(graph: ActionGraph, sources) -> dict:
    """Unweighted BFS distances along outgoing arcs from a set of sources."""
    dist = {s: 0 for s in sources}
    queue = deque(sorted(sources))
    while queue:
        u = queue.popleft()
        for v in graph.successors(u):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def gen_ground_truth(legit: ActionGraph, bot_count: int, atk: AttackConfig, seeds, rng_seed=0) -> GroundTruthNetwork:
    """Attach a completely connected botnet to ``legit`` through attack edges.

    Attack edges are unit-weight arcs legit -> bot. Sources are drawn without
    replacement: uniformly from all legitimate users (random attack), or from
    the ``candidate_pool_factor * m`` non-seed users nearest the seeds
    (seed-targeting attack, ties by ascending id). Targets are uniform bots.
    Calls that share ``rng_seed`` share their randomness across ``omega``.
    """
    if bot_count < 1:
        raise ValueError("bot_count must be >= 1")
    seeds = frozenset(seeds)
    if not seeds <= legit.vertices:
        raise ValueError("seeds must be legitimate vertices")
    rng = np.random.default_rng(rng_seed)
    g = legit.num_arcs if atk.g is None else atk.g
    m = atk.edge_count(g)
    first_bot = max(legit.vertices) + 1 if legit.vertices else 0
    bots = tuple(range(first_bot, first_bot + bot_count))
    shortfall = False

    if atk.attack_kind is AttackKind.RANDOM:
        pool = sorted(legit.vertices)
    else:
        dist = hop_distances(legit, seeds)
        ranked = sorted((d, u) for u, d in dist.items() if u not in seeds)
        want = atk.candidate_pool_factor * m
        if len(ranked) < want:
            shortfall = True
            warnings.warn(f"seed-targeting pool has {len(ranked)} reachable users, wanted {want}", RuntimeWarning)
        pool = sorted(u for _, u in ranked[:want])
    if m > len(pool):
        shortfall = True
        warnings.warn(f"only {len(pool)} candidate sources for {m} attack edges", RuntimeWarning)
        m = len(pool)

    # Every legit user carries a uniform key and a pre-drawn target bot; the
    # m pool members with the smallest keys become sources. This is a uniform
    # m-subset of the pool, and with a fixed rng_seed the random-attack edge
    # sets are nested as omega grows.
    users = sorted(legit.vertices)
    keys = dict(zip(users, rng.random(len(users)).tolist()))
    aim = dict(zip(users, rng.integers(0, bot_count, size=len(users)).tolist()))
    sources = sorted(pool, key=lambda u: (keys[u], u))[:m]
    edges = sorted((u, bots[aim[u]]) for u in sources)
    graph = legit.with_arcs({e: 1 for e in edges}, extra_vertices=bots)

    roles = {u: UserRole.SEED if u in seeds else UserRole.LEGIT for u in legit.vertices}
    roles.update({b: UserRole.BOT for b in bots})
    meta = {
        "attack": {**asdict(atk), "attack_kind": atk.attack_kind.value, "g": g},
        "rng_seed": int(rng_seed),
        "seeds": sorted(seeds),
    }
    return GroundTruthNetwork(graph, roles, edges, bots, True, shortfall, meta)
