"""Command-line frontend: signal synthesis, feature extraction, experiments.

Exit codes: 0 success, 1 internal error, 2 usage/config error, 3 verification
failure.  Parameter precedence is CLI flag > config file (--config, JSON) >
SCATTERLAB_SEED environment variable (seed only) > built-in default.  Every
run writes a JSON manifest naming its configuration and outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import experiments, figures, reports
from .baselines import mfcc as baseline_mfcc
from .filterbank import FAMILIES, FilterbankSpec, build_filterbank
from .scattering import renormalize_second_order, scatter
from .synthesis import (
    AdditiveToneSpec,
    HarmonicStackSpec,
    TwoToneSpec,
    additive_tone,
    dataset_generate,
    harmonic_stack,
    two_tone,
)

USAGE_ERROR = 2
INTERNAL_ERROR = 1
VERIFICATION_FAILURE = 3


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    try:
        loaded = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ValueError(f"cannot read config file {path}: {exc}") from exc
    if not isinstance(loaded, dict):
        raise ValueError(f"config file {path} must hold a JSON object")
    return loaded


def _resolve(args: argparse.Namespace, config: dict, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _resolve_seed(args: argparse.Namespace, config: dict, default: int = 0) -> int:
    value = getattr(args, "seed", None)
    if value is not None:
        return int(value)
    if "seed" in config:
        return int(config["seed"])
    env = os.environ.get("SCATTERLAB_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValueError(f"SCATTERLAB_SEED={env!r} is not an integer") from exc
    return default


def _outdir(args: argparse.Namespace, config: dict) -> Path:
    out = Path(_resolve(args, config, "out", "scatterlab-out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_signal(outdir: Path, stem: str, y, fmt: str, meta: dict) -> list[str]:
    if fmt == "csv":
        written = [reports.write_signal_csv(outdir / f"{stem}.csv", y)]
    else:
        written = reports.write_signal_f64(outdir / f"{stem}.f64", y, meta)
    meta_path = outdir / f"{stem}.meta.json"
    meta_path.write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    return [str(p) for p in written + [meta_path]]


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scatterlab", description=__doc__)
    parser.add_argument("--config", help="JSON config file; flags override its values")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="generate test signals")
    synth_sub = synth.add_subparsers(dest="synth_kind", required=True)

    p = synth_sub.add_parser("additive", help="Hann-windowed harmonic tone")
    p.add_argument("--alpha", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--f1", type=int)
    p.add_argument("--n", type=int, help="harmonic count")
    p.add_argument("--length", type=int, help="window length T")

    p = synth_sub.add_parser("twotone", help="two-cosine mixture")
    p.add_argument("--a1", type=float)
    p.add_argument("--a2", type=float)
    p.add_argument("--nu1", type=float)
    p.add_argument("--nu2", type=float)
    p.add_argument("--phi1", type=float)
    p.add_argument("--phi2", type=float)
    p.add_argument("--length", type=int)

    p = synth_sub.add_parser("stack", help="harmonic stack on exact bins")
    p.add_argument("--n", type=int, help="component count")
    p.add_argument("--f1", type=int, help="fundamental, cycles per window")
    p.add_argument("--length", type=int)

    p = synth_sub.add_parser("dataset", help="the 2500-signal additive corpus")
    p.add_argument("--seed", type=int)

    for sp in synth_sub.choices.values():
        sp.add_argument("--out", "-o", help="output directory")
        sp.add_argument("--format", choices=["csv", "f64"], dest="fmt")

    sc = sub.add_parser("scatter", help="extract scattering features from signal files")
    sc.add_argument("inputs", nargs="+", help="signal files (.csv or .f64)")
    sc.add_argument("--family", choices=FAMILIES)
    sc.add_argument("--q", type=int)
    sc.add_argument("--j", type=int)
    sc.add_argument("--t", type=int, help="averaging scale T (default: frame length)")
    sc.add_argument("--lambda-max", type=float, dest="lambda_max")
    sc.add_argument("--max-order", type=int, dest="max_order")
    sc.add_argument("--renormalize", action="store_true", default=None,
                    help="also write the masking table")
    sc.add_argument("--dump-layers", action="store_true", default=None,
                    help="dump raw U tensors")
    sc.add_argument("--dump-filterbank", action="store_true", default=None,
                    help="dump |psi_hat| per filter")
    sc.add_argument("--mfcc", action="store_true", default=None,
                    help="also write MFCC baseline features")
    sc.add_argument("--out", "-o")

    ex = sub.add_parser("experiment", help="run one of the experiment drivers")
    ex_sub = ex.add_subparsers(dest="experiment_kind", required=True)

    p = ex_sub.add_parser("masking-grid", help="two-tone interference heatmap")
    p.add_argument("--nu1", type=float)
    p.add_argument("--grid-steps", type=int, dest="grid_steps")
    p.add_argument("--signal-len", type=int, dest="signal_len")
    p.add_argument("--q", type=int)
    p.add_argument("--j", type=int)

    p = ex_sub.add_parser("depth-decay", help="layer energies of harmonic stacks")
    p.add_argument("--n", type=_int_list, help="comma-separated component counts")
    p.add_argument("--signal-len", type=int, dest="signal_len")
    p.add_argument("--max-order", type=int, dest="max_order")

    p = ex_sub.add_parser("embed", help="Isomap of scattering vs MFCC features")
    p.add_argument("--desk-scale", action="store_true", default=None)
    p.add_argument("--full-scale", action="store_true", default=None)
    p.add_argument("--alpha-steps", type=int, dest="alpha_steps")
    p.add_argument("--r-steps", type=int, dest="r_steps")
    p.add_argument("--k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--zscore", action="store_true", default=None,
                   help="standardize feature columns (exploration only)")

    p = ex_sub.add_parser("verify-theorem", help="depth-bound verification")
    p.add_argument("--n", type=_int_list, help="comma-separated component counts")
    p.add_argument("--tolerance", type=float)

    for sp in ex_sub.choices.values():
        sp.add_argument("--out", "-o")
        sp.add_argument("--jobs", type=int)

    return parser


def _cmd_synth(args: argparse.Namespace, config: dict) -> int:
    outdir = _outdir(args, config)
    fmt = _resolve(args, config, "fmt", "csv")
    started = time.monotonic()
    outputs: list[str] = []
    run_config: dict = {"command": f"synth {args.synth_kind}", "format": fmt}
    seed = None

    if args.synth_kind == "additive":
        spec = AdditiveToneSpec(
            alpha=_resolve(args, config, "alpha", 1.0),
            r=_resolve(args, config, "r", 0.5),
            f1=_resolve(args, config, "f1", 16),
            N=_resolve(args, config, "n", 32),
            T=_resolve(args, config, "length", 1024),
        )
        run_config.update(spec.__dict__)
        outputs += _write_signal(outdir, "additive", additive_tone(spec), fmt, spec.__dict__)
    elif args.synth_kind == "twotone":
        spec = TwoToneSpec(
            a1=_resolve(args, config, "a1", 1.0),
            a2=_resolve(args, config, "a2", 1.0),
            nu1=_resolve(args, config, "nu1", 0.2),
            nu2=_resolve(args, config, "nu2", 0.18),
            phi1=_resolve(args, config, "phi1", 0.0),
            phi2=_resolve(args, config, "phi2", 0.0),
            signal_len=_resolve(args, config, "length", 4096),
        )
        run_config.update(spec.__dict__)
        outputs += _write_signal(outdir, "twotone", two_tone(spec), fmt, spec.__dict__)
    elif args.synth_kind == "stack":
        spec = HarmonicStackSpec(
            N=_resolve(args, config, "n", 8),
            f1=_resolve(args, config, "f1", 4),
            signal_len=_resolve(args, config, "length", 4096),
        )
        run_config.update(spec.__dict__)
        outputs += _write_signal(outdir, "stack", harmonic_stack(spec), fmt, spec.__dict__)
    else:  # dataset
        seed = _resolve_seed(args, config)
        run_config["seed"] = seed
        dataset = dataset_generate(seed)
        for idx, (spec, y) in enumerate(dataset):
            meta = dict(spec.__dict__, seed=seed, index=idx)
            outputs += _write_signal(outdir, f"tone_{idx:04d}", y, fmt, meta)
        print(f"wrote {len(dataset)} signals to {outdir}")

    reports.write_manifest(
        outdir / "manifest.json", run_config, seed, outputs, time.monotonic() - started
    )
    return 0


def _cmd_scatter(args: argparse.Namespace, config: dict) -> int:
    outdir = _outdir(args, config)
    started = time.monotonic()
    signals = []
    for name in args.inputs:
        path = Path(name)
        if not path.exists():
            raise ValueError(f"input file does not exist: {path}")
        signals.append(reports.read_signal(path))
    lengths = {len(y) for y in signals}
    if len(lengths) != 1:
        raise ValueError(f"inputs have mixed lengths {sorted(lengths)}; scatter one frame size at a time")
    n = lengths.pop()

    spec = FilterbankSpec(
        family=_resolve(args, config, "family", "morlet"),
        Q=_resolve(args, config, "q", 1),
        J=_resolve(args, config, "j", 8),
        signal_len=n,
        T=_resolve(args, config, "t", n),
        lambda_max=_resolve(args, config, "lambda_max", 0.25),
    )
    max_order = _resolve(args, config, "max_order", 2)
    fb = build_filterbank(spec)

    outputs: list[str] = []
    features = []
    all_layers = []
    for y in signals:
        feature, layers = scatter(y, fb, max_order=max_order)
        features.append(feature)
        all_layers.append(layers)

    outputs.append(str(reports.write_features_csv(outdir / "features.csv", features, fb)))
    if _resolve(args, config, "renormalize", False):
        for idx, feature in enumerate(features):
            renorm = renormalize_second_order(feature)
            outputs.append(
                str(reports.write_renormalized_csv(outdir / f"renormalized_{idx:03d}.csv", renorm, fb))
            )
    if _resolve(args, config, "dump_layers", False):
        for idx, layers in enumerate(all_layers):
            outputs += [
                str(p) for p in reports.write_layer_dump(outdir / f"layers_{idx:03d}", layers, fb)
            ]
    if _resolve(args, config, "dump_filterbank", False):
        outputs.append(str(reports.write_filterbank_csv(outdir / "filterbank.csv", fb)))
    if _resolve(args, config, "mfcc", False):
        vectors = [baseline_mfcc(y) for y in signals]
        outputs.append(str(reports.write_mfcc_csv(outdir / "mfcc.csv", vectors)))

    run_config = {
        "command": "scatter",
        "inputs": list(args.inputs),
        "max_order": max_order,
        **{k: getattr(spec, k) for k in ("family", "Q", "J", "signal_len", "T", "lambda_max")},
    }
    reports.write_manifest(
        outdir / "manifest.json", run_config, None, outputs, time.monotonic() - started
    )
    print(f"{len(features)} signals -> {features[0].dimension} coefficients each")
    return 0


def _cmd_experiment(args: argparse.Namespace, config: dict) -> int:
    outdir = _outdir(args, config)
    jobs = _resolve(args, config, "jobs", 1)
    started = time.monotonic()
    outputs: list[str] = []
    kind = args.experiment_kind
    seed = None
    exit_code = 0

    if kind == "masking-grid":
        defaults = experiments.MaskingGridConfig
        steps = _resolve(args, config, "grid_steps", defaults.amp_steps)
        cfg = experiments.MaskingGridConfig(
            nu1=_resolve(args, config, "nu1", defaults.nu1),
            amp_steps=steps,
            rel_steps=steps,
            Q=_resolve(args, config, "q", defaults.Q),
            J=_resolve(args, config, "j", defaults.J),
            signal_len=_resolve(args, config, "signal_len", defaults.signal_len),
            jobs=jobs,
        )
        result = experiments.run_masking_grid(cfg)
        outputs.append(str(reports.write_masking_csv(outdir / "masking_grid.csv", result)))
        outputs.append(str(figures.render_masking(result, outdir / "masking_grid.svg")))
        run_config = cfg.__dict__

    elif kind == "depth-decay":
        cfg = experiments.DepthDecayConfig(
            N_list=_resolve(args, config, "n", (1, 2, 4, 8, 16, 32, 64, 128)),
            base_signal_len=_resolve(args, config, "signal_len", 4096),
            max_order=_resolve(args, config, "max_order", 8),
            jobs=jobs,
        )
        result = experiments.run_depth_decay(cfg)
        outputs.append(str(reports.write_decay_csv(outdir / "depth_decay.csv", result)))
        outputs.append(str(figures.render_decay(result, outdir / "depth_decay.svg")))
        for N in result.N_list:
            print(f"N={N}: effective depth {result.effective_depth[N]}")
        run_config = {**cfg.__dict__, "N_list": list(cfg.N_list)}

    elif kind == "embed":
        seed = _resolve_seed(args, config)
        if _resolve(args, config, "full_scale", False):
            cfg = experiments.EmbeddingConfig.full_scale(seed=seed, jobs=jobs)
        else:
            defaults = experiments.EmbeddingConfig
            cfg = experiments.EmbeddingConfig(
                alpha_steps=_resolve(args, config, "alpha_steps", defaults.alpha_steps),
                r_steps=_resolve(args, config, "r_steps", defaults.r_steps),
                K=_resolve(args, config, "k", defaults.K),
                seed=seed,
                zscore=bool(_resolve(args, config, "zscore", False)),
                jobs=jobs,
            )
        report = experiments.run_embedding_experiment(cfg)
        outputs += [str(p) for p in reports.write_embedding_csvs(outdir, report)]
        outputs.append(str(figures.render_embedding(report, outdir / "embedding.svg")))
        for name, assignment in report.assignment.items():
            summary = ", ".join(
                f"{param}->axis{axis} (rho={rho:+.3f})" for param, (axis, rho) in assignment.items()
            )
            print(f"{name}: {summary}")
        run_config = {
            "command": "embed",
            "alpha_steps": cfg.alpha_steps,
            "r_steps": cfg.r_steps,
            "K": cfg.K,
            "f1_random": cfg.f1_random,
            "zscore": cfg.zscore,
            "seed": seed,
        }

    else:  # verify-theorem
        cfg_n = _resolve(args, config, "n", (1, 2, 3, 4, 8, 16))
        tolerance = _resolve(args, config, "tolerance", 1e-8)
        report = experiments.verify_theorem(tuple(cfg_n), tolerance=tolerance)
        outputs.append(str(reports.write_theorem_csv(outdir / "theorem_check.csv", report)))
        for case in report.cases:
            beyond = case.relative[case.bound :]
            worst = float(beyond.max()) if len(beyond) else 0.0
            status = "ok" if case.passed else "VIOLATION"
            print(f"N={case.N}: depth bound {case.bound}, worst residual {worst:.3e} [{status}]")
        if not report.passed:
            for case in report.cases:
                for m, value in case.violations:
                    print(f"  N={case.N} m={m}: relative energy {value:.3e} > {tolerance:g}")
            exit_code = VERIFICATION_FAILURE
        run_config = {"command": "verify-theorem", "N_list": list(cfg_n), "tolerance": tolerance}

    reports.write_manifest(
        outdir / "manifest.json", run_config, seed, outputs, time.monotonic() - started
    )
    return exit_code


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args.config)
        if args.command == "synth":
            return _cmd_synth(args, config)
        if args.command == "scatter":
            return _cmd_scatter(args, config)
        return _cmd_experiment(args, config)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
