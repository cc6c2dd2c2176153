"""Quick look at a handful of games: final mosaic regret per game, normalized to [0, 1]."""

import argparse

from phireg.bruns import BrunsGameId, build_game
from phireg.dynamics import IntegratorConfig
from phireg.experiments import ExperimentConfig, run_fig6

ap = argparse.ArgumentParser()
ap.add_argument("games", nargs="*", default=["BaxAs", "ChxPd", "CoxCo"])
ap.add_argument("--trials", type=int, default=5)
ap.add_argument("--T", type=float, default=200.0)
ap.add_argument("--seed", type=int, default=0)
args = ap.parse_args()

games = [(BrunsGameId.parse(s), build_game(BrunsGameId.parse(s))) for s in args.games]
cfg = ExperimentConfig(trials=args.trials, seed=args.seed, integrator=IntegratorConfig(T=args.T))
res = run_fig6(cfg, games)
for gid, v in res.final_by_game().items():
    print(f"{gid:8s} mean {v.mean():.4e}  sd {v.std(ddof=1) if len(v) > 1 else 0.0:.2e}")
print(f"pooled  {res.pooled.mean[-1]:.4e} +- {res.pooled.half_width[-1]:.1e}")
