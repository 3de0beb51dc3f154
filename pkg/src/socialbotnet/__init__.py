"""Social botnet spam distribution, suspension defenses and credible-user influence scoring."""

__version__ = "0.1.0"

from .graph import ActionGraph, BotnetInstance, UserRole, build_action_graph  # noqa: E402
from .forest import (  # noqa: E402
    RetweetForest,
    SpamParams,
    brute_force_optimum,
    build_forest,
    independent_objective,
    objective,
    validate,
)
from .cover import max_cover_greedy, min_cover_greedy  # noqa: E402
from .influence import (  # noqa: E402
    CreditParams,
    InfluenceParams,
    action_score,
    distribute_credits,
    influence_score,
    partition_levels,
    top_k_accuracy,
)
from .spam import CampaignConfig, DefensePolicy, run_campaign  # noqa: E402
from .synth import AttackConfig, SynthFollowerConfig, gen_follower_sets, gen_ground_truth  # noqa: E402
