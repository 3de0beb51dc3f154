"""Experiment runner: parameter grids, seeded trials, CSV and manifest output.

Every output is a pure function of ``(config, base_seed)``: trial seeds are
derived from the base seed, a cell id and the trial index, and nothing
time-dependent is written.
"""
from __future__ import annotations

import csv
import dataclasses
import hashlib
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .forest import SpamParams, build_forest, independent_objective, objective
from .graph import UserRole
from .influence import (
    LEVEL_RULES,
    CreditParams,
    InfluenceParams,
    evaluate_under_attack,
    score_ground_truth,
)
from .io import read_edge_list, write_edge_list, write_follower_sets, write_roles
from .spam import CampaignConfig, DefensePolicy, pad_reports, reference_network, run_campaign
from .synth import (
    AttackConfig,
    SynthFollowerConfig,
    gen_follower_sets,
    gen_ground_truth,
    gen_legit_graph,
    pick_seeds,
)

log = logging.getLogger(__name__)

EXPERIMENTS = ("tree_sweep", "defense_compare", "influence_eval", "synth")


class ConfigError(ValueError):
    def __init__(self, field_name, message):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


@dataclass
class ExperimentConfig:
    experiment: str = "tree_sweep"
    trials: int = 1
    base_seed: int = 0
    out_dir: str = "out"
    threads: int = 1
    # follower-set botnets (tree sweep, spam campaigns, synth)
    follower_pool: int = 6000
    mu: float = 32.0
    sigma2: float = 5.0
    r: float = 0.2
    M: int = 3
    K: int = 10
    # tree sweep
    alpha: list = field(default_factory=lambda: [0.4, 0.65, 0.9])
    c: list = field(default_factory=lambda: [3, 5, 10, 20, 30, 40, 50])
    n: list = field(default_factory=lambda: [100, 200, 300, 400])
    # defense comparison
    defenses: list = field(default_factory=lambda: ["I", "II", "III", "IV"])
    gamma: list = field(default_factory=lambda: [0.7])
    delta: float = 1.0
    beta_retweet: list = field(default_factory=lambda: [0.001, 0.01])
    rounds: int = 10
    n_bots: int = 400
    spam_alpha: float = 0.2
    spam_c: int = 10
    # influence evaluation
    omega: list = field(default_factory=lambda: [1e-5, 2.5e-5, 5e-5, 7.5e-5, 1e-4])
    attack_kinds: list = field(default_factory=lambda: ["random", "seed_targeting"])
    K_percent: list = field(default_factory=lambda: [10])
    n_users: int = 10000
    n_seeds: int = 10
    credit_multiplier: float = 1.0
    lam: float = 1.0
    level_rule: str = "nearest"
    dataset: str = "synthetic"
    edges: Optional[str] = None
    seeds_file: Optional[str] = None

    GRIDS = ("alpha", "c", "n", "defenses", "gamma", "beta_retweet", "omega", "attack_kinds", "K_percent")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        names = {f.name for f in dataclasses.fields(cls)}
        for k in d:
            if k not in names:
                raise ConfigError(k, "unknown configuration field")
        cfg = cls(**d)
        cfg.check()
        return cfg

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        return cls.from_dict(json.loads(path.read_text()))

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def check(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"must be one of {EXPERIMENTS}")
        if self.trials < 1:
            raise ConfigError("trials", "must be >= 1")
        for g in self.GRIDS:
            if not getattr(self, g):
                raise ConfigError(g, "grid must be non-empty")
        for a in self.alpha:
            if not 0 <= a <= 1:
                raise ConfigError("alpha", f"{a} is outside [0, 1]")
        for b in self.beta_retweet:
            if not 0 <= b <= 1:
                raise ConfigError("beta_retweet", f"{b} is outside [0, 1]")
        for gm in self.gamma:
            if not 0 < gm <= 1:
                raise ConfigError("gamma", f"{gm} is outside (0, 1]")
        for d in self.defenses:
            if d not in ("I", "II", "III", "IV"):
                raise ConfigError("defenses", f"unknown defense {d!r}")
        for k in self.attack_kinds:
            if k not in ("random", "seed_targeting"):
                raise ConfigError("attack_kinds", f"unknown attack kind {k!r}")
        if self.level_rule not in LEVEL_RULES:
            raise ConfigError("level_rule", f"must be one of {LEVEL_RULES}")
        for w in self.omega:
            if w < 0:
                raise ConfigError("omega", f"{w} is negative")
        for c in self.c:
            if c < self.M:
                raise ConfigError("c", f"budget {c} is below M={self.M}")
        for path_field in ("edges", "seeds_file"):
            p = getattr(self, path_field)
            if p is not None and not Path(p).exists():
                raise FileNotFoundError(f"{path_field}: input file not found: {p}")

    def digest(self) -> str:
        d = self.to_dict()
        d.pop("out_dir")
        d.pop("threads")
        return hashlib.sha256(json.dumps(d, sort_keys=True).encode()).hexdigest()


def trial_seed(base_seed: int, cell_id: str, trial: int) -> int:
    """64-bit seed for one trial of one grid cell."""
    cell = int.from_bytes(hashlib.sha256(cell_id.encode()).digest()[:8], "little")
    return int(np.random.SeedSequence([base_seed, cell, trial]).generate_state(1, np.uint64)[0])


def _write_csv(path: Path, fields, rows):
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(row[k]) for k in fields})


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


def _mean_std(values):
    a = np.asarray(values, dtype=float)
    return float(a.mean()), float(a.std())


def _summarise(prefix_row, samples: dict, trials: int) -> dict:
    row = dict(prefix_row)
    row["trials"] = trials
    for name, vals in samples.items():
        row[name], row[f"{name}_std"] = _mean_std(vals)
    return row


def _map(fn, jobs, threads):
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, jobs))
    return [fn(j) for j in jobs]


# ---------------------------------------------------------------- tree sweep

TREE_METRICS = ("coverage_ratio", "tau_hours", "lost_followers", "objective_f")


def _tree_cell(job):
    cfg, n, c, seeds = job
    per_alpha = {a: {m: [] for m in TREE_METRICS} for a in cfg.alpha}
    for seed in seeds:
        botnet = gen_follower_sets(SynthFollowerConfig(n, cfg.follower_pool, cfg.mu, cfg.sigma2, seed))
        base = SpamParams(alpha=cfg.alpha[0], r=cfg.r, M=cfg.M, K=cfg.K, c=c)
        forest = build_forest(botnet, base)
        for a in cfg.alpha:
            params = dataclasses.replace(base, alpha=a)
            row = objective(forest, botnet, params).csv_row(params, n)
            for m in TREE_METRICS:
                per_alpha[a][m].append(row[m])
    return per_alpha


def run_tree_sweep(cfg: ExperimentConfig, out: Path) -> dict:
    cells = [(n, c) for n in cfg.n for c in cfg.c if c <= n]
    jobs, seeds_used = [], {}
    for n, c in cells:
        cid = f"tree:n={n}:c={c}"
        seeds = [trial_seed(cfg.base_seed, cid, t) for t in range(cfg.trials)]
        seeds_used[cid] = seeds
        jobs.append((cfg, n, c, seeds))
    results = _map(_tree_cell, jobs, cfg.threads)
    rows = []
    for (n, c), per_alpha in zip(cells, results):
        for a in cfg.alpha:
            row = _summarise({"alpha": a, "c": c, "n": n}, per_alpha[a], cfg.trials)
            row["independent_f"] = independent_objective(SpamParams(alpha=a, M=cfg.M, K=cfg.K, c=max(c, cfg.M)))
            rows.append(row)
    rows.sort(key=lambda r: (r["alpha"], r["n"], r["c"]))
    fields = ["alpha", "c", "n", "trials"]
    for m in TREE_METRICS:
        fields += [m, f"{m}_std"]
    fields.append("independent_f")
    path = out / "tree_sweep.csv"
    _write_csv(path, fields, rows)
    return {"files": [path.name], "seeds": seeds_used}


# ----------------------------------------------------------- defense compare

SPAM_METRICS = ("TPR", "FPR", "precision", "overall_P10", "overall_P100", "overall_P1000", "overall_P10000")


def make_policy(label: str, param: float, M: int = 3) -> DefensePolicy:
    if label == "I":
        return DefensePolicy.depth_m(M)
    if label == "II":
        return DefensePolicy.count_threshold(param)
    if label == "III":
        return DefensePolicy.popularity_weighted(param, M)
    return DefensePolicy.attenuated(param)


def _spam_cell(job):
    cfg, label, param, beta, seeds = job
    policy = make_policy(label, param, cfg.M)
    per_round = [{m: [] for m in SPAM_METRICS} for _ in range(cfg.rounds)]
    sp = SpamParams(alpha=cfg.spam_alpha, r=cfg.r, M=cfg.M, K=cfg.K, c=cfg.spam_c)
    for seed in seeds:
        botnet, legit = reference_network(cfg.n_bots, cfg.follower_pool, cfg.mu, cfg.sigma2, seed)
        ccfg = CampaignConfig(cfg.rounds, beta, seed)
        _, reports = run_campaign(botnet, legit, policy, ccfg, sp)
        for i, rep in enumerate(pad_reports(reports, cfg.rounds)):
            row = rep.as_row()
            for m in SPAM_METRICS:
                per_round[i][m].append(row[m])
    return per_round


def defense_cells(cfg: ExperimentConfig):
    cells = []
    for label in cfg.defenses:
        params = cfg.gamma if label == "IV" else ([cfg.M] if label == "I" else [cfg.delta])
        for p in params:
            for beta in cfg.beta_retweet:
                cells.append((label, p, beta))
    return cells


def run_defense_compare(cfg: ExperimentConfig, out: Path) -> dict:
    cells = defense_cells(cfg)
    jobs, seeds_used = [], {}
    for label, p, beta in cells:
        cid = f"spam:{label}:{p!r}:{beta!r}"
        seeds = [trial_seed(cfg.base_seed, cid, t) for t in range(cfg.trials)]
        seeds_used[cid] = seeds
        jobs.append((cfg, label, p, beta, seeds))
    results = _map(_spam_cell, jobs, cfg.threads)
    rows = []
    for (label, p, beta), per_round in zip(cells, results):
        for i, samples in enumerate(per_round, 1):
            rows.append(
                _summarise({"round": i, "defense": label, "gamma_or_delta": p, "beta_retweet": beta}, samples, cfg.trials)
            )
    fields = ["round", "defense", "gamma_or_delta", "beta_retweet", "trials"]
    for m in SPAM_METRICS:
        fields += [m, f"{m}_std"]
    path = out / "spam_rounds.csv"
    _write_csv(path, fields, rows)
    return {"files": [path.name], "seeds": seeds_used, "log_base": "e"}


# ------------------------------------------------------------ influence eval


def _read_seed_list(path) -> frozenset:
    ids = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            ids.add(int(line.split("\t")[0]))
    return frozenset(ids)


def load_legit_graph(cfg: ExperimentConfig):
    """Legit graph and seeds: loaded from files when configured, synthetic otherwise."""
    if cfg.edges:
        g = read_edge_list(cfg.edges)
    else:
        g = gen_legit_graph(cfg.n_users, rng_seed=trial_seed(cfg.base_seed, "influence:graph", 0))
    if cfg.seeds_file:
        seeds = _read_seed_list(cfg.seeds_file)
    else:
        seeds = pick_seeds(g, cfg.n_seeds, trial_seed(cfg.base_seed, "influence:seeds", 0))
    return g, seeds


def _influence_cell(job):
    cfg, g, seeds, kind, omega, k_percent, seeds_list = job
    ev = evaluate_under_attack(
        g,
        AttackConfig(omega, attack_kind=kind),
        seeds,
        trials=len(seeds_list),
        k_percent=k_percent,
        credit_multiplier=cfg.credit_multiplier,
        params=InfluenceParams(cfg.lam),
        rng_seeds=seeds_list,
        level_rule=cfg.level_rule,
    )
    return ev


def write_scores_csv(path: Path, gt, credit: CreditParams, params: InfluenceParams):
    state, scores, _ = score_ground_truth(gt, credit, params)
    g = gt.action_graph
    credible = state.credible
    rows = [
        {
            "user_id": u,
            "role": gt.roles[u].value,
            "naive_score": g.in_weight(u) if gt.roles[u] is not UserRole.BOT else "inf",
            "proposed_score": scores[u],
            "credible": u in credible,
        }
        for u in sorted(g.vertices)
    ]
    _write_csv(path, ["user_id", "role", "naive_score", "proposed_score", "credible"], rows)


def run_influence_eval(cfg: ExperimentConfig, out: Path) -> dict:
    g, seeds = load_legit_graph(cfg)
    cells = [(kind, w, k) for kind in cfg.attack_kinds for w in cfg.omega for k in cfg.K_percent]
    jobs, seeds_used = [], {}
    for kind, w, k in cells:
        # trials share seeds across omega so the attack-strength trend is paired
        cid = f"influence:{kind}"
        s = [trial_seed(cfg.base_seed, cid, t) for t in range(cfg.trials)]
        seeds_used[cid] = s
        jobs.append((cfg, g, seeds, kind, w, k, s))
    results = _map(_influence_cell, jobs, cfg.threads)
    trial_rows, summary = [], []
    for (kind, w, k), ev in zip(cells, results):
        for t, (acc, pct) in enumerate(zip(ev.accuracy, ev.bot_percentile)):
            trial_rows.append(
                {
                    "dataset": cfg.dataset,
                    "omega": w,
                    "attack_kind": kind,
                    "K_percent": k,
                    "trial": t,
                    "topK_accuracy": acc,
                    "bot_percentile": pct,
                    "bot_credits": ev.bot_credits[t],
                }
            )
        summary.append(
            _summarise(
                {"dataset": cfg.dataset, "omega": w, "attack_kind": kind, "K_percent": k},
                {"topK_accuracy": ev.accuracy, "bot_percentile": ev.bot_percentile},
                cfg.trials,
            )
        )
    _write_csv(
        out / "influence_eval.csv",
        ["dataset", "omega", "attack_kind", "K_percent", "trial", "topK_accuracy", "bot_percentile", "bot_credits"],
        trial_rows,
    )
    _write_csv(
        out / "influence_summary.csv",
        ["dataset", "omega", "attack_kind", "K_percent", "trials", "topK_accuracy", "topK_accuracy_std",
         "bot_percentile", "bot_percentile_std"],
        summary,
    )
    kind, w, _ = cells[0]
    gt = gen_ground_truth(g, len(g.vertices), AttackConfig(w, attack_kind=kind), seeds, seeds_used[f"influence:{kind}"][0])
    write_scores_csv(
        out / "influence_scores.csv",
        gt,
        CreditParams(seeds, c_total_multiplier=cfg.credit_multiplier, level_rule=cfg.level_rule),
        InfluenceParams(cfg.lam),
    )
    files = ["influence_eval.csv", "influence_summary.csv", "influence_scores.csv"]
    return {"files": files, "seeds": seeds_used, "graph": {"vertices": len(g.vertices), "arcs": g.num_arcs},
            "trust_seeds": sorted(seeds), "rounding": "largest_remainder", "level_rule": cfg.level_rule}


# --------------------------------------------------------------------- synth


def run_synth(cfg: ExperimentConfig, out: Path) -> dict:
    files, seeds_used = [], {}
    for n in cfg.n:
        cid = f"synth:followers:n={n}"
        seed = trial_seed(cfg.base_seed, cid, 0)
        seeds_used[cid] = [seed]
        botnet = gen_follower_sets(SynthFollowerConfig(n, cfg.follower_pool, cfg.mu, cfg.sigma2, seed))
        name = f"followers_n{n}.tsv"
        write_follower_sets(botnet, out / name)
        roles = {u: UserRole.LEGIT for u in range(cfg.follower_pool)}
        roles.update({b: UserRole.BOT for b in botnet.bots})
        write_roles(roles, out / f"roles_n{n}.tsv")
        files += [name, f"roles_n{n}.tsv"]
    g, seeds = load_legit_graph(cfg)
    write_edge_list(g, out / "legit.edges.tsv")
    files.append("legit.edges.tsv")
    for kind in cfg.attack_kinds:
        for w in cfg.omega:
            cid = f"synth:gt:{kind}:{w!r}"
            seed = trial_seed(cfg.base_seed, cid, 0)
            seeds_used[cid] = [seed]
            gt = gen_ground_truth(g, len(g.vertices), AttackConfig(w, attack_kind=kind), seeds, seed)
            stem = f"gt_{kind}_{w!r}"
            gt.write(out, stem)
            files += [f"{stem}.edges.tsv", f"{stem}.roles.tsv", f"{stem}.json"]
    return {"files": files, "seeds": seeds_used}


RUNNERS = {
    "tree_sweep": run_tree_sweep,
    "defense_compare": run_defense_compare,
    "influence_eval": run_influence_eval,
    "synth": run_synth,
}


def run_experiment(cfg: ExperimentConfig) -> list:
    """Run one configured experiment and return the paths written (manifest last)."""
    cfg.check()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    log.info("running %s with base seed %d into %s", cfg.experiment, cfg.base_seed, out)
    info = RUNNERS[cfg.experiment](cfg, out)
    manifest = {
        "experiment": cfg.experiment,
        "config": {k: v for k, v in cfg.to_dict().items() if k not in ("out_dir", "threads")},
        "config_hash": cfg.digest(),
        "base_seed": cfg.base_seed,
        "code_version": __version__,
        **{k: v for k, v in info.items() if k != "files"},
        "files": info["files"],
    }
    (out / "manifest.json").write_text(json.dumps(manifest, sort_keys=True, indent=1) + "\n")
    return [out / f for f in info["files"]] + [out / "manifest.json"]
