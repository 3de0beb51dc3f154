"""
Synthetic inputs and file formats
=================================

All inputs are tab-separated text. Follower sets list one
``bot<TAB>follower`` pair per line, action graphs one
``src<TAB>dst<TAB>count`` arc per line, and role files one
``user<TAB>role`` pair per line. Lines starting with ``#`` are ignored.
"""

import tempfile
from pathlib import Path

from socialbotnet.io import read_edge_list, read_follower_sets, write_follower_sets
from socialbotnet.synth import (
    AttackConfig,
    SynthFollowerConfig,
    gen_follower_sets,
    gen_ground_truth,
    gen_legit_graph,
    pick_seeds,
)

out = Path(tempfile.mkdtemp())

# a small botnet: 20 bots over 500 users
botnet = gen_follower_sets(SynthFollowerConfig(n=20, follower_pool=500, rng_seed=4))
write_follower_sets(botnet, out / "followers.tsv")
print((out / "followers.tsv").read_text().splitlines()[:3])
assert read_follower_sets(out / "followers.tsv", bots=botnet.bots) == botnet

# a legitimate graph plus a seed-targeting attack
legit = gen_legit_graph(2000, rng_seed=4)
seeds = pick_seeds(legit, 5, rng_seed=4)
gt = gen_ground_truth(legit, 2000, AttackConfig(5e-4, attack_kind="seed_targeting"), seeds, rng_seed=4)
gt.write(out, "city")
print("attack edges:", gt.attack_edges)
print("files:", sorted(p.name for p in out.iterdir()))

# bots never act towards legitimate users; their internal arcs are implied
g = read_edge_list(out / "city.edges.tsv")
print("arcs on disk:", g.num_arcs, "=", legit.num_arcs, "+", len(gt.attack_edges))
