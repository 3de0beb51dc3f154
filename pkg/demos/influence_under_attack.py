"""
Credible-user influence scoring under botnet attack
===================================================

Naive influence metrics count incoming interactions, so a botnet that
retweets one of its members endlessly makes that bot look important.
The scheme here first spreads a small budget of credits from trusted
seeds, level by level along interaction arcs. Anyone holding a credit is
credible, and only credible users contribute to influence scores, each
with a capped amount.

We attach a completely connected botnet to a synthetic city-sized graph
through a handful of attack edges and check two things: does the
ranking of legitimate users survive, and where does the best bot land?
"""

from socialbotnet import AttackConfig, CreditParams, distribute_credits
from socialbotnet.influence import evaluate_under_attack
from socialbotnet.synth import gen_legit_graph, pick_seeds

graph = gen_legit_graph(5000, rng_seed=2)
seeds = pick_seeds(graph, 10, rng_seed=2)
print(f"users {len(graph.vertices)}  arcs {graph.num_arcs}  actions {graph.total_weight}")

# credit distribution on the clean graph
state = distribute_credits(graph, CreditParams(seeds))
print(f"C_total {state.c_total}  credible {len(state.credible)}  stranded {state.residual_total}")

# Attack strength omega is the number of attack edges per legitimate arc.
print("\nattack          omega   top-10% accuracy   best bot percentile")
for kind in ("random", "seed_targeting"):
    for omega in (1e-4, 2.5e-4, 5e-4):
        ev = evaluate_under_attack(graph, AttackConfig(omega, attack_kind=kind), seeds, trials=10)
        print(f"{kind:<15} {omega:<7g} {ev.mean_accuracy:>10.3f} {ev.mean_bot_percentile:>18.1f}")

# A percentile of 100 means the bot ranks below every legitimate user.
