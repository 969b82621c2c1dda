"""Command-line front end: ``simulate``, ``reconstruct``, ``sweep``, ``verify``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import experiments, signals, verify
from .inversion import InsufficientMoments, reconstruct


class ConfigError(ValueError):
    pass


def _load(path: str):
    try:
        sig, doc = signals.load_signal(path)
    except (OSError, KeyError, ValueError) as e:
        raise ConfigError(f"cannot read model file {path}: {e}") from None
    return sig, doc


def _check_common(args) -> None:
    if getattr(args, "grid", 2) < 2:
        raise ConfigError("--grid must be at least 2")
    if getattr(args, "trials", 1) < 1:
        raise ConfigError("--trials must be at least 1")


def _dump_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n")


def _clean(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def cmd_simulate(args) -> int:
    _check_common(args)
    sig, doc = _load(args.model)
    if args.moments is None:
        try:
            K = experiments.model_from_doc(doc, sig).required_K()
        except ValueError:
            K = 20
    else:
        K = args.moments
        try:
            mdl = experiments.model_from_doc(doc, sig)
            if K < mdl.required_K():
                raise ConfigError(f"--moments {K} is too small for the {mdl.kind} model: K >= {mdl.required_K()} required")
        except ValueError as e:
            if isinstance(e, ConfigError):
                raise
    if K < 0:
        raise ConfigError("--moments must be nonnegative")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    clean = signals.sample(sig, args.grid)
    noisy = clean
    if args.snr is not None:
        noisy = signals.add_noise(clean, args.snr, args.seed)
    m = signals.moments_quadrature(noisy, K)
    signals.write_samples_csv(out / "samples.csv", noisy)
    signals.write_moments_csv(out / "moments.csv", m)
    meta = {
        "model_file": str(args.model),
        "interval": list(sig.interval),
        "grid": args.grid,
        "K": K,
        "snr_db": args.snr,
        "seed": args.seed,
        "empirical_snr_db": signals.empirical_snr_db(clean, noisy) if args.snr is not None else None,
        "noise": "numpy PCG64 + ziggurat standard normal, added to samples before trapezoid moments",
    }
    _dump_json(out / "meta.json", {k: _clean(v) for k, v in meta.items()})
    print(f"wrote {out / 'samples.csv'}, {out / 'moments.csv'}, {out / 'meta.json'}")
    return 0


def cmd_reconstruct(args) -> int:
    _check_common(args)
    doc = json.loads(Path(args.model).read_text())
    sig = None
    if "pieces" in doc:
        sig, _ = _load(args.model)
    model = experiments.model_from_doc(doc, sig)
    interval = tuple(map(float, doc["interval"]))
    m = signals.read_moments_csv(args.moments, interval)
    if m.K < model.required_K():
        raise ConfigError(f"moments m_0..m_{m.K} are too few for the {model.kind} model: "
                          f"K >= {model.required_K()} required")
    res = reconstruct(model, m, imag_tol=args.tol_roots, rtol=args.rtol, atol=args.atol)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    payload = res.to_dict()
    if res.success:
        x = signals.uniform_grid(*interval, args.grid)
        rec = signals.SampledSignal(x, res(x))
        signals.write_samples_csv(out / "reconstruction.csv", rec)
        if sig is not None:
            truth = signals.sample(sig, args.grid)
            payload["truth"] = {
                "mse": signals.mse(truth, rec),
                "jump_errors": [abs(a - b) for a, b in zip(sig.jumps, res.jumps)],
            }
    _dump_json(out / "result.json", payload)
    status = "success" if res.success else f"failed: {res.diagnostics['failure_reason']}"
    print(f"reconstruction {status}; wrote {out / 'result.json'}")
    return 0 if res.success else 1


def cmd_sweep(args) -> int:
    _check_common(args)
    values = [float(v) for v in args.values.split(",")]
    sig = model = None
    if args.axis == "snr":
        if args.model is None:
            raise ConfigError("--model is required for the snr axis")
        sig, doc = _load(args.model)
        model = experiments.model_from_doc(doc, sig)
    snr = args.snr if args.snr is not None else (40.0 if args.axis == "degree" else 50.0)
    rows = experiments.sweep(args.axis, values, args.trials, args.seed, args.grid, snr, sig, model, args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    experiments.write_sweep_csv(out / "sweep.csv", rows)
    summary = experiments.summarize(rows)
    experiments.write_summary_csv(out / "summary.csv", summary)
    for s in summary:
        print(f"{args.axis}={s['axis']:g}: {s['successes']}/{s['trials']} ok, "
              f"median mse {s['median_mse']:.3g}, median jump relerr {s['median_jump_relerr']:.3g}")
    return 0


def cmd_verify(args) -> int:
    checks = verify.run_checks(n_random=args.trials)
    print(verify.report(checks))
    return 0 if all(c.passed for c in checks) else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pwdfinite", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="sample a model signal, add noise, write moments")
    sp.add_argument("--model", required=True, help="signal JSON")
    sp.add_argument("--grid", type=int, default=4096)
    sp.add_argument("--moments", type=int, default=None, help="highest moment index K")
    sp.add_argument("--snr", type=float, default=None, help="SNR in dB (omit for no noise)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_simulate)

    rp = sub.add_parser("reconstruct", help="recover a signal from a moments CSV")
    rp.add_argument("--model", required=True, help="JSON with interval and model (and optionally the true pieces)")
    rp.add_argument("--moments", required=True, help="CSV with header k,m_k")
    rp.add_argument("--grid", type=int, default=4096)
    rp.add_argument("--tol-roots", type=float, default=None, help="largest |imag| accepted for a jump root")
    rp.add_argument("--rtol", type=float, default=1e-10)
    rp.add_argument("--atol", type=float, default=1e-12)
    rp.add_argument("--out", required=True)
    rp.set_defaults(func=cmd_reconstruct)

    wp = sub.add_parser("sweep", help="noise / complexity sweep, CSV output")
    wp.add_argument("--axis", choices=experiments.AXES, required=True)
    wp.add_argument("--values", required=True, help="comma separated axis values")
    wp.add_argument("--model", default=None, help="signal JSON (snr axis)")
    wp.add_argument("--grid", type=int, default=4096)
    wp.add_argument("--snr", type=float, default=None, help="fixed SNR for the n_jumps/degree axes")
    wp.add_argument("--seed", type=int, default=0)
    wp.add_argument("--trials", type=int, default=20)
    wp.add_argument("--jobs", type=int, default=1)
    wp.add_argument("--out", required=True)
    wp.set_defaults(func=cmd_sweep)

    vp = sub.add_parser("verify", help="run the built-in identity suite")
    vp.add_argument("--trials", type=int, default=100, help="random operator pairs for the method check")
    vp.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    np.seterr(all="ignore")
    try:
        return args.func(args)
    except (ConfigError, InsufficientMoments) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
