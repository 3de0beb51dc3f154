"""Round-based spam campaigns against suspension defenses.

Each round one alive bot is picked as the spam source, the attacker rebuilds
its retweet forest over the alive bots with that bot as the main root, and
every placed bot (re)tweets the spam. Legitimate followers retweet it with
probability ``beta_retweet``. At the end of the round the defense updates
spam scores and suspends users.

Hop distance ``d`` is 0 for originators, ``level - 1`` for bots, and one more
than the nearest followed bot for legitimate retweeters.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .forest import SpamParams, build_forest
from .graph import BotnetInstance, UserRole
from .synth import SynthFollowerConfig, gen_follower_sets


class DefenseKind(enum.Enum):
    DEPTH_M = "I"
    COUNT_THRESHOLD = "II"
    POPULARITY_WEIGHTED = "III"
    ATTENUATED_SCORE = "IV"


@dataclass(frozen=True)
class DefensePolicy:
    """Suspension rule.

    I   suspend every participant within the first ``M`` levels (hop < M)
    II  +1 per spam (re)tweet, suspend at ``delta``
    III +1/ln(1 + n_t) per spam (re)tweet within the first ``M`` levels, suspend at ``delta``
    IV  +gamma**d per spam (re)tweet, suspend at ``threshold``
    """

    kind: DefenseKind
    M: int = 3
    delta: float = 1.0
    gamma: float = 0.7
    threshold: float = 1.0

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if self.delta < 1:
            raise ValueError("delta must be >= 1")
        if not 0 < self.gamma <= 1:
            raise ValueError("gamma must lie in (0, 1]")
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")

    @classmethod
    def depth_m(cls, M=3):
        return cls(DefenseKind.DEPTH_M, M=M)

    @classmethod
    def count_threshold(cls, delta=1.0):
        return cls(DefenseKind.COUNT_THRESHOLD, delta=delta)

    @classmethod
    def popularity_weighted(cls, delta=1.0, M=3):
        return cls(DefenseKind.POPULARITY_WEIGHTED, M=M, delta=delta)

    @classmethod
    def attenuated(cls, gamma=0.7, threshold=1.0):
        return cls(DefenseKind.ATTENUATED_SCORE, gamma=gamma, threshold=threshold)

    @property
    def label(self) -> str:
        return self.kind.value

    @property
    def parameter(self) -> float:
        """The gamma (IV), delta (II, III) or M (I) the policy runs with."""
        k = self.kind
        if k is DefenseKind.ATTENUATED_SCORE:
            return self.gamma
        if k is DefenseKind.DEPTH_M:
            return self.M
        return self.delta


@dataclass(frozen=True)
class CampaignConfig:
    rounds: int = 10
    beta_retweet: float = 0.0
    rng_seed: int = 0
    penalties: tuple = (10, 100, 1000, 10000)

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if not 0 <= self.beta_retweet <= 1:
            raise ValueError("beta_retweet must lie in [0, 1]")


def update_score_attenuated(s: float, d: int, gamma: float) -> float:
    if d < 0 or int(d) != d:
        raise ValueError("hop distance must be a non-negative integer")
    return s + gamma**d


def update_score_popularity(s: float, n_t: float, within_m: bool) -> float:
    """Defense III increment ``1 / ln(1 + n_t)``, applied only within the first M levels."""
    if not within_m:
        return s
    if n_t <= 0:
        raise ValueError("n_t must be positive (log(1 + 0) = 0)")
    return s + 1.0 / math.log1p(n_t)


@dataclass
class ClassificationReport:
    round: int
    tpr: float
    fpr: float
    precision: float
    overall: dict

    def as_row(self) -> dict:
        row = {"round": self.round, "TPR": self.tpr, "FPR": self.fpr, "precision": self.precision}
        for p, v in self.overall.items():
            row[f"overall_P{p}"] = v
        return row


@dataclass
class CampaignState:
    spam_score: dict = field(default_factory=dict)
    suspended: set = field(default_factory=set)
    round_log: list = field(default_factory=list)
    suspended_by_round: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {
                "spam_score": {str(k): v for k, v in sorted(self.spam_score.items())},
                "suspended_by_round": [sorted(s) for s in self.suspended_by_round],
                "rounds": self.round_log,
            },
            sort_keys=True,
        )


def classify(state: CampaignState, roles: dict, penalties=(10, 100, 1000, 10000), round_no: int = 0):
    n_bots = sum(1 for r in roles.values() if r is UserRole.BOT)
    n_legit = len(roles) - n_bots
    s_bots = sum(1 for u in state.suspended if roles[u] is UserRole.BOT)
    s_legit = len(state.suspended) - s_bots
    tpr = s_bots / n_bots if n_bots else 0.0
    fpr = s_legit / n_legit if n_legit else 0.0
    precision = s_bots / (s_bots + s_legit) if s_bots + s_legit else 0.0
    return ClassificationReport(round_no, tpr, fpr, precision, {p: tpr - p * fpr for p in penalties})


def _hops_with_source(forest, source):
    hop = {b: k - 1 for k, lv in enumerate(forest.levels, 1) for b in lv}
    root = forest.main_root if forest.main_root is not None else min(forest.roots)
    if root != source:
        old = hop.pop(source, None)
        hop[source] = 0
        if old is None:
            del hop[root]
        else:
            hop[root] = old
    return hop


def _adapt(params: SpamParams, n_alive: int) -> SpamParams:
    c = min(params.c, n_alive)
    M = min(params.M, c)
    if (c, M) == (params.c, params.M):
        return params
    return SpamParams(params.alpha, params.beta_scale, params.r, M, params.K, c, params.lags)


def run_campaign(
    botnet: BotnetInstance,
    legit_users,
    defense: DefensePolicy,
    cfg: CampaignConfig,
    spam_params: SpamParams = SpamParams(alpha=0.2, c=10),
    forest_builder=build_forest,
):
    """Simulate a campaign; returns ``(state, reports)`` with one report per round played.

    The campaign stops early once every bot is suspended. When fewer alive
    bots remain than the attacker's budget ``c`` (or depth ``M``), both shrink
    to the alive count.
    """
    rng = np.random.default_rng(cfg.rng_seed)
    legit_users = sorted(legit_users)
    roles = {u: UserRole.LEGIT for u in legit_users}
    roles.update({b: UserRole.BOT for b in botnet.bots})
    state = CampaignState(spam_score={u: 0.0 for u in roles})
    reports = []
    forests = {}

    for rnd in range(1, cfg.rounds + 1):
        alive = [b for b in botnet.bots if b not in state.suspended]
        if not alive:
            break
        source = int(alive[rng.integers(len(alive))])
        key = frozenset(alive)
        if key not in forests:
            forests = {key: forest_builder(botnet.restrict(alive), _adapt(spam_params, len(alive)))}
        hop = _hops_with_source(forests[key], source)

        exposure = {}
        for b, d in hop.items():
            for f in botnet.followers[b]:
                if f not in state.suspended and (f not in exposure or d < exposure[f]):
                    exposure[f] = d
        exposed = sorted(exposure)
        draws = rng.random(len(exposed))
        participants = dict(hop)
        for f, x in zip(exposed, draws):
            if x < cfg.beta_retweet:
                participants[f] = exposure[f] + 1
        n_t = len(participants)

        newly = _apply_defense(defense, state.spam_score, participants, n_t)
        state.suspended |= newly
        state.suspended_by_round.append(set(newly))
        state.round_log.append(
            {
                "round": rnd,
                "tweet_id": rnd,
                "source": source,
                "n_t": n_t,
                "participants": [[u, d] for u, d in sorted(participants.items())],
            }
        )
        reports.append(classify(state, roles, cfg.penalties, rnd))
    return state, reports


def _apply_defense(defense: DefensePolicy, score: dict, participants: dict, n_t: int) -> set:
    kind = defense.kind
    newly = set()
    for u, d in participants.items():
        if kind is DefenseKind.DEPTH_M:
            if d < defense.M:
                newly.add(u)
            continue
        if kind is DefenseKind.COUNT_THRESHOLD:
            score[u] += 1.0
            limit = defense.delta
        elif kind is DefenseKind.POPULARITY_WEIGHTED:
            score[u] = update_score_popularity(score[u], n_t, d < defense.M)
            limit = defense.delta
        else:
            score[u] = update_score_attenuated(score[u], d, defense.gamma)
            limit = defense.threshold
        if score[u] >= limit:
            newly.add(u)
    return newly


def pad_reports(reports: list, rounds: int) -> list:
    """Carry the last report forward so every campaign has ``rounds`` entries."""
    out = list(reports)
    while out and len(out) < rounds:
        last = out[-1]
        out.append(ClassificationReport(len(out) + 1, last.tpr, last.fpr, last.precision, dict(last.overall)))
    return out


def reference_network(n_bots=400, n_legit=6000, mu=32.0, sigma2=5.0, rng_seed=0):
    """Bots with Gaussian follower sets over ``n_legit`` legitimate users."""
    botnet = gen_follower_sets(SynthFollowerConfig(n_bots, n_legit, mu, sigma2, rng_seed))
    return botnet, range(n_legit)
