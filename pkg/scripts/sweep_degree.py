"""MSE against the denominator degree of a rational signal (40 dB)."""

import argparse
from dataclasses import dataclass, field
from pathlib import Path

from pwdfinite import experiments as X


@dataclass
class DegreeSweepConfig:
    degrees: list[int] = field(default_factory=lambda: [1, 2, 3, 4, 5, 6])
    snr_db: float = 40.0
    trials: int = 20
    n_grid: int = 4096
    seed: int = 0
    jobs: int = 1


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=20)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results/degree"))
    args = ap.parse_args()
    cfg = DegreeSweepConfig(trials=args.trials, jobs=args.jobs)
    rows = X.sweep("degree", cfg.degrees, cfg.trials, cfg.seed, cfg.n_grid, cfg.snr_db, jobs=cfg.jobs)
    args.out.mkdir(parents=True, exist_ok=True)
    X.write_sweep_csv(args.out / "sweep.csv", rows)
    summary = X.summarize(rows)
    X.write_summary_csv(args.out / "summary.csv", summary)
    for s in summary:
        print(f"deg q={int(s['axis'])}  ok {s['successes']:>2}/{s['trials']}  median MSE {s['median_mse']:.3e}")


if __name__ == "__main__":
    main()
