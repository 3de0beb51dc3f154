"""Manipulation-resistant influence scoring.

Trusted seeds receive credits that flow level by level along outgoing
action arcs. Every user ending up with a credit is credible, and a user's
influence is the capped sum of the actions it received from credible users.
"""
from __future__ import annotations

import heapq
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .graph import ActionGraph, UserRole
from .synth import AttackConfig, gen_ground_truth, hop_distances


LEVEL_RULES = ("nearest", "deepest")


@dataclass(frozen=True)
class CreditParams:
    seeds: frozenset
    c_total: Optional[int] = None
    c_total_multiplier: float = 1.0
    level_rule: str = "nearest"

    def __post_init__(self):
        object.__setattr__(self, "seeds", frozenset(self.seeds))
        if not self.seeds:
            raise ValueError("seed set must be non-empty")
        if self.level_rule not in LEVEL_RULES:
            raise ValueError(f"level_rule must be one of {LEVEL_RULES}")

    def total(self, n_vertices: int) -> int:
        if self.c_total is not None:
            return int(self.c_total)
        return math.floor(self.c_total_multiplier * math.sqrt(n_vertices))


@dataclass(frozen=True)
class InfluenceParams:
    lam: float = 1.0

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lambda must be positive")


@dataclass
class CreditState:
    level_of: dict
    credits_held: dict
    received: dict
    residual: dict
    c_total: int
    notes: list = field(default_factory=list)

    @property
    def credible(self) -> frozenset:
        return frozenset(v for v, c in self.credits_held.items() if c >= 1)

    @property
    def residual_total(self) -> int:
        return sum(self.residual.values())

    @property
    def held_total(self) -> int:
        return sum(self.credits_held.values())


def largest_remainder(total: int, weights: dict) -> dict:
    """Split ``total`` integer units proportionally to ``weights``.

    Floors first, then hands the leftover units to the largest fractional
    parts (ties by ascending key). The result always sums to ``total``.
    """
    if total == 0 or not weights:
        return {k: 0 for k in weights}
    if not all(isinstance(w, int) for w in weights.values()):
        weights = {k: Fraction(w) for k, w in weights.items()}
    W = sum(weights.values())
    if W <= 0:
        raise ValueError("weights must have a positive sum")
    share, rema = {}, {}
    for k, w in weights.items():
        # exact: remainders share the denominator W
        q, r = divmod(w * total, W)
        share[k] = int(q)
        rema[k] = r
    left = total - sum(share.values())
    if left:
        for k in heapq.nsmallest(left, weights, key=lambda k: (-rema[k], k)):
            share[k] += 1
    return share


def partition_levels(g: ActionGraph, seeds, rule: str = "nearest") -> dict:
    """Level of every user reachable from the seeds; unreachable users are omitted.

    ``nearest`` (default): ``1 + shortest hop distance``, so a user whose
    in-neighbours sit on several levels joins the one closest to the seeds.
    ``deepest``: seeds stay on level 1 and every other user sits one level
    below its deepest reachable in-neighbour, measured by nearest levels
    (longest paths are undefined once the graph has cycles).
    """
    seeds = frozenset(seeds)
    if not seeds:
        raise ValueError("seed set must be non-empty")
    missing = seeds - g.vertices
    if missing:
        raise KeyError(f"seeds not in graph: {sorted(missing)[:5]}")
    near = {v: d + 1 for v, d in hop_distances(g, seeds).items()}
    if rule == "nearest":
        return near
    if rule != "deepest":
        raise ValueError(f"unknown level rule {rule!r}")
    return {
        v: 1 if v in seeds else 1 + max(near[u] for u in g.predecessors(v) if u in near)
        for v in near
    }


def distribute_credits(g: ActionGraph, params: CreditParams, level_of: Optional[dict] = None) -> CreditState:
    """Level-synchronous credit distribution from the seeds.

    Seeds get shares of the total proportional to their out-weight. A user
    holding ``c >= 1`` credits keeps one and forwards ``c - 1`` to its
    next-level out-neighbours in proportion to arc weight. Credits with no
    next-level arc to follow are stranded as residual. Integer splits use
    largest-remainder rounding, so
    ``sum(held) + sum(residual) == C_total``.
    """
    if level_of is None:
        level_of = partition_levels(g, params.seeds, params.level_rule)
    c_total = params.total(len(g.vertices))
    notes = []
    if c_total < len(params.seeds):
        notes.append(f"C_total={c_total} is below the seed count {len(params.seeds)}")
        warnings.warn(notes[-1], RuntimeWarning)

    seed_w = {s: g.out_weight(s) for s in params.seeds}
    if sum(seed_w.values()) == 0:
        seed_w = {s: 1 for s in params.seeds}
        notes.append("all seeds are sinks; initial credits split evenly")
    received = {v: 0 for v in level_of}
    for s, c in largest_remainder(c_total, seed_w).items():
        received[s] += c

    by_level = {}
    for v, lv in level_of.items():
        by_level.setdefault(lv, []).append(v)

    held, residual = {}, {}
    for lv in sorted(by_level):
        for v in sorted(by_level[lv]):
            c = received[v]
            if c < 1:
                continue
            held[v] = 1
            extra = c - 1
            if not extra:
                continue
            targets = {u: w for u, w in g.successors(v).items() if level_of.get(u) == lv + 1}
            if not targets:
                residual[v] = extra
                continue
            for u, share in largest_remainder(extra, targets).items():
                received[u] += share
    return CreditState(dict(level_of), held, received, residual, c_total, notes)


def action_score(a, lam: float = 1.0) -> float:
    """Capped per-source contribution: ``a`` for a <= 1, else ``1 + lam * exp(-1/a)``.

    Counts are integers in practice; fractional ``a`` in [0, 1] maps to
    itself so the function stays monotone on the whole half-line.
    ``a = math.inf`` gives the cap ``1 + lam``.
    """
    if a < 0:
        raise ValueError("action count must be non-negative")
    if a <= 1:
        return float(a)
    return 1.0 + lam * math.exp(-1.0 / a)


def influence_score(v, g: ActionGraph, credible, params: InfluenceParams = InfluenceParams()) -> float:
    return sum(action_score(w, params.lam) for j, w in sorted(g.predecessors(v).items()) if j in credible)


def influence_scores(g: ActionGraph, credible, params: InfluenceParams = InfluenceParams()) -> dict:
    """Scores for every vertex of ``g`` (arcs from non-credible users are ignored)."""
    scores = {v: 0.0 for v in g.vertices}
    for j in sorted(credible):
        if j not in g.vertices:
            continue
        for v, w in g.successors(j).items():
            scores[v] += action_score(w, params.lam)
    return scores


def naive_score(v, g: ActionGraph) -> int:
    """Total incoming interaction count."""
    return g.in_weight(v)


def rank(scores: dict, users=None) -> list:
    """Users ordered by descending score, ties by ascending id."""
    users = scores.keys() if users is None else users
    return sorted(users, key=lambda u: (-scores[u], u))


def top_k_size(n: int, k_percent: float) -> int:
    return math.ceil(Fraction(str(k_percent)) * n / 100)


def top_k_accuracy(u1: list, u2: list, k_percent: float) -> float:
    """Overlap of the top-K-percent slices of two rankings, relative to ``u1``'s slice."""
    if set(u1) != set(u2) or len(u1) != len(u2):
        raise ValueError("rankings must cover the same users")
    k = top_k_size(len(u1), k_percent)
    if k == 0:
        return 1.0
    return len(set(u1[:k]) & set(u2[:k])) / k


def bot_influence_ranking(scores: dict, u1: list, roles: dict) -> float:
    """Percentile position of the highest-scoring bot among the users of ``u1``.

    Counts users of ``u1`` whose score is at least the bot's (the bot is
    placed after any ties), so 0 means the bot outranks everyone and 100
    means it ranks last.
    """
    bots = [u for u, r in roles.items() if r is UserRole.BOT]
    if not bots:
        raise ValueError("no bots in roles")
    best = min(bots, key=lambda b: (-scores.get(b, 0.0), b))
    s = scores.get(best, 0.0)
    return 100.0 * sum(1 for u in u1 if scores[u] >= s) / len(u1)


@dataclass
class InfluenceEval:
    omega: float
    attack_kind: str
    k_percent: float
    accuracy: list
    bot_percentile: list
    bot_credits: list

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.accuracy))

    @property
    def mean_bot_percentile(self) -> float:
        return float(np.mean(self.bot_percentile))


def score_ground_truth(gt, credit: CreditParams, params: InfluenceParams = InfluenceParams()):
    """Credit distribution plus scores on a ground-truth network.

    The botnet pools every credit that reached any bot and hands them out
    one per bot, keeping its best-placed bot uncredited so it can collect
    the capped contribution ``1 + lam`` from each credible peer (internal
    bot actions are unbounded). Returns ``(state, scores, bot_credits)``.
    """
    g = gt.action_graph
    state = distribute_credits(g, credit)
    bots = gt.bots
    c_bots = sum(state.received.get(b, 0) for b in bots)
    legit_credible = frozenset(u for u in state.credible if gt.roles[u].is_legit)
    scores = influence_scores(g, legit_credible, params)
    target = min(bots, key=lambda b: (-scores[b], b))
    credible_bots = [b for b in bots if b != target][:c_bots]
    if c_bots > len(credible_bots):
        credible_bots = list(bots)[:c_bots]
    cap = action_score(math.inf, params.lam)
    cb = set(credible_bots)
    n_cb = len(cb)
    for b in bots:
        scores[b] += cap * (n_cb - (1 if b in cb else 0))
    return state, scores, c_bots


def evaluate_under_attack(
    legit: ActionGraph,
    atk: AttackConfig,
    seeds,
    bot_count: Optional[int] = None,
    trials: int = 1,
    k_percent: float = 10.0,
    credit_multiplier: float = 1.0,
    params: InfluenceParams = InfluenceParams(),
    rng_seeds=None,
    level_rule: str = "nearest",
) -> InfluenceEval:
    """Top-K accuracy and bot ranking over repeated ground-truth networks.

    ``U1`` ranks legitimate users by total incoming interactions, ``U2`` by the
    credible-user score on the attacked network. ``bot_count`` defaults to the
    number of legitimate users.
    """
    bot_count = len(legit.vertices) if bot_count is None else bot_count
    seeds = frozenset(seeds)
    rng_seeds = list(range(trials)) if rng_seeds is None else list(rng_seeds)
    legit_users = sorted(legit.vertices)
    naive = {u: legit.in_weight(u) for u in legit_users}
    u1 = rank(naive, legit_users)
    acc, pct, cb = [], [], []
    for seed in rng_seeds[:trials]:
        gt = gen_ground_truth(legit, bot_count, atk, seeds, seed)
        credit = CreditParams(seeds, c_total_multiplier=credit_multiplier, level_rule=level_rule)
        _, scores, c_bots = score_ground_truth(gt, credit, params)
        u2 = rank(scores, legit_users)
        acc.append(top_k_accuracy(u1, u2, k_percent))
        pct.append(bot_influence_ranking(scores, u1, gt.roles))
        cb.append(c_bots)
    return InfluenceEval(atk.omega, atk.attack_kind.value, k_percent, acc, pct, cb)
