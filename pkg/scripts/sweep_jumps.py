"""MSE and jump error against the number of jumps of a piecewise-constant signal (50 dB)."""

import argparse
from dataclasses import dataclass, field
from pathlib import Path

from pwdfinite import experiments as X


@dataclass
class JumpSweepConfig:
    n_jumps: list[int] = field(default_factory=lambda: list(range(1, 11)))
    snr_db: float = 50.0
    trials: int = 20
    n_grid: int = 4096
    seed: int = 0
    jobs: int = 1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/jumps"))
    args = ap.parse_args()
    cfg = JumpSweepConfig(trials=args.trials, jobs=args.jobs)
    rows = X.sweep("n_jumps", cfg.n_jumps, cfg.trials, cfg.seed, cfg.n_grid, cfg.snr_db, jobs=cfg.jobs)
    args.out.mkdir(parents=True, exist_ok=True)
    X.write_sweep_csv(args.out / "sweep.csv", rows)
    summary = X.summarize(rows)
    X.write_summary_csv(args.out / "summary.csv", summary)
    for s in summary:
        print(f"p={int(s['axis']):>2}  ok {s['successes']:>2}/{s['trials']}  median MSE {s['median_mse']:.3e}  "
              f"jump {s['median_jump_relerr']:.3e}")


if __name__ == "__main__":
    main()
