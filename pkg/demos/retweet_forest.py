"""
Retweet forests versus independent spamming
===========================================

A botmaster with n bots wants one spam tweet to reach as many distinct
followers as possible, quickly, while losing few bots to suspension. The
defense suspends every account within the first M hops of a spam
cascade. Two options:

* independent: every bot tweets the spam itself. Nothing is delayed but
  every bot sits at hop 0 and is lost.
* botnet: bots retweet each other along a forest. Only the bots in the
  first M levels are lost; deeper bots reach their followers later.
"""

from socialbotnet import SpamParams, build_forest, objective
from socialbotnet.forest import brute_force_optimum, independent_objective
from socialbotnet.graph import BotnetInstance
from socialbotnet.synth import SynthFollowerConfig, gen_follower_sets

# 400 bots, Gaussian follower counts (mean 32) drawn from 6000 users
botnet = gen_follower_sets(SynthFollowerConfig(n=400, rng_seed=1))
print("bots:", botnet.n, " distinct followers:", len(botnet.follower_union))

# the heuristic forest for a suspension budget of c = 10 bots
params = SpamParams(alpha=0.9, M=3, K=10, c=10, r=0.2)
forest = build_forest(botnet, params)
print("level sizes:", [len(lv) for lv in forest.levels])
print("flags:", forest.flags or "none")

m = objective(forest, botnet, params)
print(f"coverage {len(m.coverage)}  lost {len(m.lost_followers)}  delay {m.tau:.2f} h")

# how the trade-off moves with alpha (weight on lost followers vs delay)
for alpha in (0.4, 0.65, 0.9):
    p = SpamParams(alpha=alpha, M=3, K=10, c=10)
    f = objective(forest, botnet, p).objective_f
    print(f"alpha={alpha}: botnet f={f:.3f}  independent f={independent_objective(p):.3f}")

# On a toy instance the exhaustive optimum is available for comparison.
toy = BotnetInstance(
    (1, 2, 3, 4, 5),
    {i: {100 * i + j for j in range(i)} for i in range(1, 6)},
)
tp = SpamParams(alpha=0.5, M=3, K=4, c=3, r=0.5)
heur = objective(build_forest(toy, tp), toy, tp).objective_f
best_forest, best = brute_force_optimum(toy, tp)
print(f"toy: heuristic f={heur:.4f}  optimum f={best:.4f}  levels {best_forest.levels}")
