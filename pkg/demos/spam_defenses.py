"""
Suspension defenses against a retweeting botnet
===============================================

Every round a random surviving bot posts spam and the rest of the botnet
retweets it along a fresh forest. Legitimate followers occasionally
retweet too (probability beta). Four suspension rules are compared:

I    suspend everyone within the first M hops of the source
II   suspend anyone who has (re)tweeted delta spams
III  like II but each tweet counts 1/ln(1 + n_t) and only within M hops
IV   each (re)tweet at hop d adds gamma**d; suspend at score 1
"""

from socialbotnet import CampaignConfig, DefensePolicy, SpamParams, run_campaign
from socialbotnet.spam import pad_reports, reference_network

# 6000 legitimate users, 400 bots
botnet, legit = reference_network(rng_seed=3)
attacker = SpamParams(alpha=0.2, M=3, K=10, c=10)

policies = [
    DefensePolicy.depth_m(3),
    DefensePolicy.count_threshold(1.0),
    DefensePolicy.popularity_weighted(1.0),
    DefensePolicy.attenuated(0.7),
]

for beta in (0.001, 0.01):
    print(f"\nbeta = {beta}")
    print("defense  round:TPR/FPR ...")
    for policy in policies:
        state, reports = run_campaign(botnet, legit, policy, CampaignConfig(rounds=10, beta_retweet=beta, rng_seed=7), attacker)
        reports = pad_reports(reports, 10)
        trail = "  ".join(f"{r.round}:{r.tpr:.2f}/{r.fpr:.4f}" for r in reports[::3])
        last = reports[-1]
        print(f"{policy.label:>4}     {trail}   overall(P=10^4)={last.overall[10000]:.3f}")

# Attenuation strength decides how fast IV converges.
print("\nDefense IV, TPR per round for several gamma")
for gamma in (0.5, 0.7, 0.9):
    _, reports = run_campaign(botnet, legit, DefensePolicy.attenuated(gamma), CampaignConfig(rounds=8, rng_seed=1), attacker)
    print(f"gamma={gamma}:", " ".join(f"{r.tpr:.2f}" for r in pad_reports(reports, 8)))
