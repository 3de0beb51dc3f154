"""Retweet forests for botnet spam distribution.

A forest places bots on levels ``1..K``. Level-1 bots originate the spam,
every other bot retweets its parent one level up. Bots within the first
``M`` levels are suspended. The attacker trades lost followers (followers
reachable only through suspended bots) against delivery delay::

    f = alpha * beta * |lost| / |C| + (1 - alpha) * tau

Levels are 1-based in the public API (``forest.levels[0]`` is level 1).
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .cover import encode, max_cover_masks, min_cover_masks
from .graph import BotnetInstance


class InfeasibleBudgetError(ValueError):
    pass


class UndefinedDelayError(ValueError):
    pass


class ForestValidationError(ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


def default_lags(K: int = 10) -> tuple:
    """Per-hop retweet lags in hours: ``t_1 = 0`` and ``t_i = 0.5 i`` afterwards."""
    return (0.0,) + tuple(0.5 * i for i in range(2, K + 1))


@dataclass(frozen=True)
class SpamParams:
    alpha: float = 0.5
    beta_scale: float = 1.0
    r: float = 0.2
    M: int = 3
    K: int = 10
    c: int = 10
    lags: Optional[tuple] = None

    def __post_init__(self):
        if self.lags is None:
            object.__setattr__(self, "lags", default_lags(self.K))
        object.__setattr__(self, "lags", tuple(float(t) for t in self.lags))
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not (self.K >= self.M >= 1):
            raise ValueError(f"need K >= M >= 1, got K={self.K}, M={self.M}")
        if self.c < self.M:
            raise InfeasibleBudgetError(f"suspension budget c={self.c} is below M={self.M}")
        if not 0.0 < self.r < 1.0:
            raise ValueError(f"retweet ratio r must lie in (0, 1), got {self.r}")
        if len(self.lags) != self.K:
            raise ValueError(f"expected {self.K} lags, got {len(self.lags)}")
        if self.lags[0] != 0.0 or any(t < 0 for t in self.lags):
            raise ValueError("lags must be non-negative with t_1 = 0")

    @property
    def cumulative_lags(self) -> tuple:
        return tuple(itertools.accumulate(self.lags))


def retweet_quota(n_followers: int, r: float) -> int:
    """Max bot children of a bot with ``n_followers`` non-bot followers: ceil(r F / (1 - r))."""
    fr = Fraction(r).limit_denominator(10**9)
    return math.ceil(fr * n_followers / (1 - fr))


@dataclass(frozen=True)
class RetweetForest:
    levels: tuple
    parent: dict
    main_root: Optional[int] = None
    flags: tuple = ()

    def __post_init__(self):
        levels = [tuple(sorted(v)) for v in self.levels]
        while levels and not levels[-1]:
            levels.pop()
        object.__setattr__(self, "levels", tuple(levels))
        object.__setattr__(self, "parent", dict(self.parent))

    @property
    def depth(self) -> int:
        return len(self.levels)

    @property
    def placed(self) -> frozenset:
        return frozenset(b for lv in self.levels for b in lv)

    def level_of(self) -> dict:
        return {b: k for k, lv in enumerate(self.levels, 1) for b in lv}

    @property
    def roots(self) -> tuple:
        return self.levels[0] if self.levels else ()

    def to_json(self) -> str:
        return json.dumps(
            {
                "levels": [list(v) for v in self.levels],
                "parent": {str(k): v for k, v in sorted(self.parent.items())},
                "main_root": self.main_root,
                "flags": list(self.flags),
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "RetweetForest":
        d = json.loads(text)
        return cls(
            tuple(tuple(v) for v in d["levels"]),
            {int(k): v for k, v in d["parent"].items()},
            d.get("main_root"),
            tuple(d.get("flags", ())),
        )


@dataclass(frozen=True)
class Violation:
    constraint: str
    message: str
    level: Optional[int] = None

    def __str__(self):
        return f"[{self.constraint}] {self.message}"


@dataclass
class DistributionMetrics:
    coverage: frozenset
    coverage_ratio: float
    phi: list
    tau: float
    suspended: frozenset
    lost_followers: frozenset
    objective_f: float

    def csv_row(self, params: SpamParams, n: int) -> dict:
        return {
            "alpha": params.alpha,
            "c": params.c,
            "n": n,
            "coverage_ratio": self.coverage_ratio,
            "tau_hours": self.tau,
            "lost_followers": len(self.lost_followers),
            "objective_f": self.objective_f,
        }


METRICS_CSV_FIELDS = ["alpha", "c", "n", "coverage_ratio", "tau_hours", "lost_followers", "objective_f"]


def compute_phi(forest: RetweetForest, botnet: BotnetInstance) -> list:
    """First-reach follower sets, one per level."""
    phi, seen = [], set()
    for lv in forest.levels:
        reached = set().union(*(botnet.followers[b] for b in lv)) if lv else set()
        new = reached - seen
        phi.append(frozenset(new))
        seen |= new
    return phi


def _delay_from_sizes(sizes, cum_lags, total):
    return sum(cum_lags[k] * s for k, s in enumerate(sizes)) / total


def _f(alpha, beta, lost, covered, tau):
    return alpha * beta * (lost / covered) + (1 - alpha) * tau


def compute_delay(phi, lags) -> float:
    """Average hours to first exposure over the covered followers."""
    sizes = [len(p) for p in phi]
    total = sum(sizes)
    if total == 0:
        raise UndefinedDelayError("delay is undefined for an empty coverage set")
    if len(sizes) > len(lags):
        raise ValueError(f"{len(sizes)} levels but only {len(lags)} lags")
    cum = list(itertools.accumulate(float(t) for t in lags))
    return _delay_from_sizes(sizes, cum, total)


def validate(forest: RetweetForest, botnet: BotnetInstance, params: SpamParams) -> list:
    """Check a forest against the design constraints; returns all violations (empty if ok)."""
    out = []
    M, K = params.M, params.K
    known = set(botnet.bots)
    seen = {}
    for k, lv in enumerate(forest.levels, 1):
        if k > K and lv:
            out.append(Violation("height", f"level {k} is non-empty but K={K}", k))
        for b in lv:
            if b not in known:
                out.append(Violation("membership", f"bot {b} at level {k} is not in the botnet", k))
            if b in seen:
                out.append(Violation("disjointness", f"bot {b} appears at levels {seen[b]} and {k}", k))
            else:
                seen[b] = k

    first_m = set().union(*forest.levels[:M]) if forest.levels else set()
    if len(first_m) > params.c:
        out.append(Violation("budget", f"{len(first_m)} bots in the first {M} levels exceed budget c={params.c}"))

    quota = {b: retweet_quota(botnet.follower_count(b), params.r) for b in seen if b in known}
    for k in range(M, min(forest.depth, K)):
        cap = sum(quota.get(b, 0) for b in forest.levels[k - 1])
        nxt = len(forest.levels[k])
        if nxt > cap:
            out.append(Violation("capacity", f"level {k + 1} holds {nxt} bots but level {k} capacity is {cap}", k + 1))

    children = {}
    for b, p in forest.parent.items():
        if b not in seen:
            out.append(Violation("parent", f"parent given for unplaced bot {b}"))
            continue
        children.setdefault(p, []).append(b)
    for b, k in seen.items():
        p = forest.parent.get(b)
        if k == 1:
            if p is not None:
                out.append(Violation("parent", f"root bot {b} has a parent {p}", 1))
        elif p is None:
            out.append(Violation("parent", f"bot {b} at level {k} has no parent", k))
        elif seen.get(p) != k - 1:
            out.append(Violation("parent", f"bot {b} at level {k} has parent {p} at level {seen.get(p)}", k))
    for p, kids in children.items():
        k = seen.get(p)
        if k is not None and k >= M and p in quota and len(kids) > quota[p]:
            out.append(
                Violation("capacity", f"bot {p} at level {k} has {len(kids)} children, quota {quota[p]}", k)
            )
    return out


def objective(forest: RetweetForest, botnet: BotnetInstance, params: SpamParams) -> DistributionMetrics:
    violations = validate(forest, botnet, params)
    if violations:
        raise ForestValidationError(violations)
    phi = compute_phi(forest, botnet)
    coverage = frozenset().union(*phi) if phi else frozenset()
    tau = compute_delay(phi, params.lags)
    M = params.M
    suspended = frozenset(b for lv in forest.levels[:M] for b in lv)
    late = set().union(*(botnet.followers[b] for lv in forest.levels[M:] for b in lv))
    lost = coverage - late
    f = _f(params.alpha, params.beta_scale, len(lost), len(coverage), tau)
    ratio = len(coverage) / len(botnet.follower_union) if botnet.follower_union else 0.0
    return DistributionMetrics(coverage, ratio, phi, tau, suspended, frozenset(lost), f)


def independent_objective(params: SpamParams) -> float:
    """Objective of the independent method: every bot tweets, all are suspended, no delay."""
    return params.alpha * params.beta_scale


def independent_forest(botnet: BotnetInstance) -> RetweetForest:
    return RetweetForest((botnet.bots,), {}, None, ("independent",))


def _assign_parents(levels, fcount, quota, M, main_root):
    order = lambda b: (-fcount[b], b)  # noqa: E731
    parent = {}
    for k in range(1, len(levels)):
        kids = sorted(levels[k], key=order)
        if k < M:
            # no per-bot retweet quota inside the suspended prefix
            pool = [main_root] if k == 1 else sorted(levels[k - 1], key=order)
            for i, b in enumerate(kids):
                parent[b] = pool[i % len(pool)]
            continue
        pool = sorted(levels[k - 1], key=order)
        left = {p: quota[p] for p in pool}
        i = 0
        for b in kids:
            for _ in range(len(pool)):
                p = pool[i % len(pool)]
                i += 1
                if left[p] > 0:
                    left[p] -= 1
                    parent[b] = p
                    break
            else:
                raise ValueError(f"level {k} has no parent capacity left for bot {b}")
    return parent


def build_forest(botnet: BotnetInstance, params: SpamParams) -> RetweetForest:
    """Greedy retweet-forest construction.

    1. MinCover picks the ``c`` bots losing the fewest followers (the suspended prefix).
    2. MaxCover picks ``c - M + 1`` of them for level ``M``; the other ``M - 1`` form a
       straight line above it, largest follower count at level 1.
    3. Each deeper level is filled by MaxCover over unplaced bots, up to the parent
       level's retweet capacity.
    4. If all bots are placed and level ``M + 1`` is under capacity, surplus level-``M``
       bots move to level 1 as independent roots.
    """
    M, K, c = params.M, params.K, params.c
    if c < M:
        raise InfeasibleBudgetError(f"suspension budget c={c} is below M={M}")
    if botnet.n < c:
        raise ValueError(f"budget c={c} exceeds bot count n={botnet.n}")
    masks = encode(botnet.followers)
    fcount = {b: botnet.follower_count(b) for b in botnet.bots}
    quota = {b: retweet_quota(fcount[b], params.r) for b in botnet.bots}

    prefix = min_cover_masks(masks, c)
    level_m = max_cover_masks({b: masks[b] for b in prefix}, c - M + 1)
    line = sorted(set(prefix) - set(level_m), key=lambda b: (-fcount[b], b))
    levels = [[b] for b in line] + [list(level_m)]
    main_root = line[0] if line else min(level_m, key=lambda b: (-fcount[b], b))

    taken = set(prefix)
    unplaced = {b: masks[b] for b in botnet.bots if b not in taken}
    while len(levels) < K and unplaced:
        cap = sum(quota[b] for b in levels[-1])
        take = min(cap, len(unplaced))
        if take == 0:
            break
        nxt = max_cover_masks(unplaced, take)
        for b in nxt:
            del unplaced[b]
        levels.append(nxt)

    flags = []
    if M > 1 and not unplaced and len(levels[M - 1]) > 1:
        occupancy = len(levels[M]) if len(levels) > M else 0
        cap = sum(quota[b] for b in levels[M - 1])
        if occupancy < cap:
            keep = list(levels[M - 1])
            for b in sorted(keep, key=lambda b: (quota[b], fcount[b], b)):
                if len(keep) == 1:
                    break
                if cap - quota[b] >= occupancy:
                    cap -= quota[b]
                    keep.remove(b)
                    levels[0].append(b)
            moved = len(levels[M - 1]) - len(keep)
            if moved:
                levels[M - 1] = keep
                flags.append(f"moved_level_{M}_to_roots:{moved}")

    parent = _assign_parents(levels, fcount, quota, M, main_root)
    return RetweetForest(tuple(tuple(lv) for lv in levels), parent, main_root, tuple(flags))


BRUTE_FORCE_MAX_BOTS = 8
BRUTE_FORCE_MAX_K = 4


def brute_force_optimum(botnet: BotnetInstance, params: SpamParams):
    """Exhaustive minimum of the objective over all feasible level assignments.

    Only for tiny instances (``n <= 8``, ``K <= 4``). Ties keep the first
    assignment in lexicographic order of the per-bot level tuple (0 = unplaced).
    Returns ``(forest, f)``.
    """
    n, K, M = botnet.n, params.K, params.M
    if n > BRUTE_FORCE_MAX_BOTS or K > BRUTE_FORCE_MAX_K:
        raise ValueError(f"instance too large for exhaustive search (n={n}, K={K})")
    bots = botnet.bots
    masks = encode(botnet.followers)
    fcount = {b: botnet.follower_count(b) for b in bots}
    quota = {b: retweet_quota(fcount[b], params.r) for b in bots}
    cum = params.cumulative_lags
    best, best_f = None, math.inf
    for assign in itertools.product(range(K + 1), repeat=n):
        counts = [0] * (K + 1)
        caps = [0] * (K + 1)
        lvmask = [0] * (K + 1)
        for b, lv in zip(bots, assign):
            counts[lv] += 1
            caps[lv] += quota[b]
            lvmask[lv] |= masks[b]
        if sum(counts[1 : M + 1]) > params.c:
            continue
        if any(counts[k + 1] and not counts[k] for k in range(1, K)):
            continue
        if any(counts[k + 1] > caps[k] for k in range(M, K)):
            continue
        seen, sizes = 0, []
        for k in range(1, K + 1):
            new = lvmask[k] & ~seen
            sizes.append(new.bit_count())
            seen |= new
        covered = seen.bit_count()
        if covered == 0:
            continue
        late = 0
        for k in range(M + 1, K + 1):
            late |= lvmask[k]
        lost = (seen & ~late).bit_count()
        tau = _delay_from_sizes(sizes, cum, covered)
        f = _f(params.alpha, params.beta_scale, lost, covered, tau)
        if f < best_f:
            best, best_f = assign, f
    if best is None:
        raise ValueError("no feasible forest covers any follower")
    levels = [[b for b, lv in zip(bots, best) if lv == k] for k in range(1, K + 1)]
    while levels and not levels[-1]:
        levels.pop()
    main_root = min(levels[0], key=lambda b: (-fcount[b], b))
    parent = _assign_parents(levels, fcount, quota, M, main_root)
    return RetweetForest(tuple(tuple(lv) for lv in levels), parent, main_root), best_f
