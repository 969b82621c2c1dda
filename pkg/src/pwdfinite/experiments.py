"""Simulate-then-reconstruct trials and parameter sweeps."""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .inversion import Model, reconstruct
from .polynomial import Poly
from .signals import (
    PiecewiseSignal,
    SampledSignal,
    add_noise,
    moments_quadrature,
    mse,
    piecewise_constant,
    rational_signal,
    sample,
)

SWEEP_FIELDS = ["axis", "trial", "seed", "mse", "jump_relerr", "freq_relerr", "success"]
AXES = ("snr", "n_jumps", "degree")


def infer_model(sig: PiecewiseSignal) -> Model:
    """Guess the reconstruction model from the ground-truth pieces."""
    kinds = {p.kind for p in sig.pieces}
    p = sig.n_jumps
    if kinds == {"polynomial"}:
        d = max(max(piece.poly.degree(), 0) for piece in sig.pieces)
        return Model("piecewise_polynomial", p, degree=d)
    if kinds == {"sinusoid"}:
        return Model("sinusoid", p)
    if kinds == {"exponential"}:
        return Model("exponential", p)
    if kinds == {"rational"} and p == 0:
        piece = sig.pieces[0]
        return Model("rational", 0, num_degree=Poly(piece.numerator).degree(),
                     den_degree=Poly(piece.denominator).degree())
    raise ValueError(f"cannot infer a reconstruction model for pieces {sorted(kinds)}; give one explicitly")


def model_from_doc(doc: dict, sig: PiecewiseSignal | None) -> Model:
    if "model" in doc:
        return Model.from_dict(doc["model"])
    if sig is None:
        raise ValueError("model document has neither a 'model' section nor pieces")
    return infer_model(sig)


def trial_seed(base: int, axis_index: int, trial: int) -> int:
    return int(np.random.SeedSequence([base, axis_index, trial]).generate_state(1)[0])


def pc_family(n_jumps: int, interval=(0.0, 1.0)) -> PiecewiseSignal:
    """Piecewise-constant test signal with ``n_jumps`` evenly spread jumps."""
    a, b = interval
    jumps = a + (b - a) * (np.arange(1, n_jumps + 1) - 0.1) / (n_jumps + 0.8)
    levels = [1.0, 2.0, 0.5, 1.5, -0.5, 2.5, 0.0, 1.2, -1.0, 0.8, 1.8]
    values = [levels[i % len(levels)] for i in range(n_jumps + 1)]
    return piecewise_constant(jumps, values, interval)


def rational_family(den_degree: int, num_degree: int = 0) -> PiecewiseSignal:
    """``p/q`` on ``[0, 1]`` with ``deg q = den_degree``.

    Poles come in conjugate pairs ``c +- 0.4i`` spread over the interval (plus
    one real pole at ``-0.6`` for odd degree), so ``q`` has no real roots near
    ``[0, 1]``. Numerator roots sit at ``1.8, 2.3, ...``.
    """
    poles: list[complex] = []
    pairs = den_degree // 2
    for i in range(pairs):
        c = (i + 0.5) / pairs
        poles += [complex(c, 0.4), complex(c, -0.4)]
    if den_degree % 2:
        poles.append(-0.6)
    q = Poly(np.real(np.poly(poles))[::-1]) if poles else Poly.const(1.0)
    p = Poly.from_roots([1.8 + 0.5 * i for i in range(num_degree)]) if num_degree else Poly.const(1.0)
    return rational_signal((p / p(0.5)).coeffs, (q / q(0.5)).coeffs)


@dataclass
class TrialResult:
    axis: float
    trial: int
    seed: int
    mse: float
    jump_relerr: float
    freq_relerr: float
    success: bool


def jump_relative_error(true: Sequence[float], est: Sequence[float]) -> float:
    if not true:
        return math.nan
    t, e = np.sort(true), np.sort(est)
    return float(np.max(np.abs(t - e) / np.abs(t)))


def run_trial(sig: PiecewiseSignal, model: Model, n_grid: int, snr_db: float, seed: int,
              axis: float = math.nan, trial: int = 0) -> TrialResult:
    """Sample, add noise, take trapezoid moments, reconstruct and score."""
    clean = sample(sig, n_grid)
    noisy = add_noise(clean, snr_db, seed)
    m = moments_quadrature(noisy, model.required_K())
    res = reconstruct(model, m)
    if not res.success:
        # inf marks "failed", nan marks "not applicable to this model"
        return TrialResult(axis, trial, seed, math.inf, math.inf if sig.jumps else math.nan,
                           math.inf if model.kind == "sinusoid" else math.nan, False)
    err = mse(clean, SampledSignal(clean.grid, res(clean.grid)))
    jre = jump_relative_error(sig.jumps, res.jumps) if sig.jumps else math.nan
    fre = math.nan
    if model.kind == "sinusoid":
        w = sig.pieces[0].omega
        fre = abs(res.omega - w) / abs(w)
    return TrialResult(axis, trial, seed, err, jre, fre, True)


def _run(job):
    return run_trial(*job)


def build_jobs(axis: str, values: Sequence[float], trials: int, base_seed: int, n_grid: int,
               snr_db: float, sig: PiecewiseSignal | None, model: Model | None) -> list[tuple]:
    if axis not in AXES:
        raise ValueError(f"axis must be one of {AXES}")
    jobs = []
    for ai, v in enumerate(values):
        if axis == "snr":
            s, mdl, snr = sig, model, float(v)
        elif axis == "n_jumps":
            s = pc_family(int(v))
            mdl, snr = infer_model(s), snr_db
        else:
            s = rational_family(int(v))
            mdl, snr = infer_model(s), snr_db
        for t in range(trials):
            jobs.append((s, mdl, n_grid, snr, trial_seed(base_seed, ai, t), float(v), t))
    return jobs


def sweep(axis: str, values: Sequence[float], trials: int, base_seed: int = 0, n_grid: int = 4096,
          snr_db: float = 50.0, sig: PiecewiseSignal | None = None, model: Model | None = None,
          jobs: int = 1) -> list[TrialResult]:
    """Rows ordered by (axis value, trial) whatever the execution order."""
    work = build_jobs(axis, values, trials, base_seed, n_grid, snr_db, sig, model)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            return list(ex.map(_run, work, chunksize=4))
    return [_run(w) for w in work]


def summarize(rows: Sequence[TrialResult]) -> list[dict]:
    """Per axis value: success count and medians.

    Failed trials carry ``inf`` and so count as worse than any success;
    metrics that do not apply to the model (``nan``) are skipped.
    """
    out = []
    for v in sorted({r.axis for r in rows}):
        sel = [r for r in rows if r.axis == v]

        def med(attr):
            vals = [getattr(r, attr) for r in sel]
            vals = [x for x in vals if not math.isnan(x)]
            return float(np.median(vals)) if vals else math.nan

        out.append({
            "axis": v,
            "trials": len(sel),
            "successes": sum(r.success for r in sel),
            "median_mse": med("mse"),
            "median_jump_relerr": med("jump_relerr"),
            "median_freq_relerr": med("freq_relerr"),
        })
    return out


def write_sweep_csv(path: str | Path, rows: Sequence[TrialResult]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_FIELDS)
        for r in rows:
            d = asdict(r)
            w.writerow([repr(d["axis"]), d["trial"], d["seed"], repr(d["mse"]), repr(d["jump_relerr"]),
                        repr(d["freq_relerr"]), int(d["success"])])


def write_summary_csv(path: str | Path, summary: Sequence[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        keys = ["axis", "trials", "successes", "median_mse", "median_jump_relerr", "median_freq_relerr"]
        w.writerow(keys)
        for s in summary:
            w.writerow([repr(s[k]) if isinstance(s[k], float) else s[k] for k in keys])
