"""Delimited output: RFC-4180 CSVs, raw float dumps, and JSON run manifests.

Floats are written with ``repr`` (shortest round-trip form), so identical
results serialize to identical bytes.
"""

from __future__ import annotations

import csv
import json
import time
from pathlib import Path

import numpy as np

from .experiments import (
    PARAM_NAMES,
    DepthDecayResult,
    EmbeddingReport,
    MaskingGridResult,
    TheoremReport,
)
from .filterbank import Filterbank
from .scattering import ScatteringFeature, feature_names, feature_vector


def _cell(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path: Path, header: list[str], rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def write_manifest(path: Path, config: dict, seed, outputs: list[str], elapsed: float) -> Path:
    import scatterlab

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    manifest = {
        "config": config,
        "seed": seed,
        "outputs": outputs,
        "elapsed_seconds": round(elapsed, 3),
        "versions": {"scatterlab": scatterlab.__version__, "numpy": np.__version__},
        "written_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    path.write_text(json.dumps(manifest, indent=2, default=str) + "\n", encoding="utf-8")
    return path


def write_signal_csv(path: Path, y: np.ndarray) -> Path:
    return write_csv(path, ["t", "value"], [(t, v) for t, v in enumerate(y)])


def write_signal_f64(path: Path, y: np.ndarray, meta: dict) -> list[Path]:
    """Little-endian float64 dump plus a JSON sidecar describing it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.asarray(y, dtype="<f8")
    path.write_bytes(data.tobytes())
    sidecar = path.with_suffix(path.suffix + ".json")
    sidecar.write_text(
        json.dumps({"dtype": "<f8", "shape": list(data.shape), **meta}, indent=2) + "\n",
        encoding="utf-8",
    )
    return [path, sidecar]


def read_signal(path: Path) -> np.ndarray:
    """Load a signal written by ``write_signal_csv`` or ``write_signal_f64``."""
    path = Path(path)
    if path.suffix == ".csv":
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        return np.array([float(r[1]) for r in rows[1:]])
    return np.frombuffer(path.read_bytes(), dtype="<f8").copy()


def write_features_csv(
    path: Path, features: list[ScatteringFeature], fb: Filterbank
) -> Path:
    """One row per signal; columns are S0 then every path label."""
    if not features:
        raise ValueError("no features to write")
    names = feature_names(features[0], fb)
    rows = []
    for feat in features:
        if feature_names(feat, fb) != names:
            raise ValueError("features have inconsistent path sets")
        rows.append(feature_vector(feat))
    return write_csv(path, names, rows)


def write_layer_dump(outdir: Path, layers, fb: Filterbank) -> list[Path]:
    """Per-layer little-endian float64 tensors with JSON shape/path sidecars."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    for layer in layers:
        base = outdir / f"U{layer.depth}.f64"
        data = np.ascontiguousarray(layer.data, dtype="<f8")
        base.write_bytes(data.tobytes())
        sidecar = base.with_suffix(".json")
        sidecar.write_text(
            json.dumps(
                {
                    "dtype": "<f8",
                    "shape": list(data.shape),
                    "depth": layer.depth,
                    "paths": [list(p.lambdas(fb)) for p in layer.paths],
                },
                indent=2,
            )
            + "\n",
            encoding="utf-8",
        )
        written += [base, sidecar]
    return written


def write_mfcc_csv(path: Path, vectors: list[np.ndarray]) -> Path:
    """One row per signal, same layout as the scattering feature export."""
    if not vectors:
        raise ValueError("no MFCC vectors to write")
    names = [f"mfcc_{k}" for k in range(len(vectors[0]))]
    return write_csv(path, names, vectors)


def write_renormalized_csv(path: Path, renorm: dict, fb: Filterbank) -> Path:
    rows = [
        (p.lambdas(fb)[0], p.lambdas(fb)[1], value) for p, value in renorm.items()
    ]
    return write_csv(path, ["lambda1", "lambda2", "s2_renormalized"], rows)


def write_filterbank_csv(path: Path, fb: Filterbank) -> Path:
    """Magnitude of every filter on every bin (debug dump)."""
    n = fb.spec.signal_len
    rows = []
    for j in range(fb.n_filters):
        lam = float(fb.grid[j])
        mags = np.abs(fb.filters[j])
        for k in range(n):
            rows.append((j, lam, k, k / n, mags[k]))
    return write_csv(path, ["filter", "lambda", "bin", "nu", "magnitude"], rows)


def write_masking_csv(path: Path, result: MaskingGridResult) -> Path:
    rows = []
    for i_l2, lam2 in enumerate(result.lambda2):
        for i_amp, amp in enumerate(result.amp_ratios):
            for i_rel, rel in enumerate(result.rel_freqs):
                rows.append(
                    (
                        float(lam2),
                        float(amp),
                        float(rel),
                        int(result.valid[i_amp, i_rel]),
                        float(result.values[i_l2, i_amp, i_rel]),
                    )
                )
    return write_csv(
        path, ["lambda2", "amp_ratio", "rel_freq", "valid", "s2_renormalized"], rows
    )


def write_decay_csv(path: Path, result: DepthDecayResult) -> Path:
    rows = []
    for N in result.N_list:
        for m, (energy, rel) in enumerate(zip(result.energies[N], result.relative[N]), start=1):
            rows.append((N, m, float(energy), float(rel), result.effective_depth[N]))
    return write_csv(path, ["N", "m", "energy", "relative_energy", "effective_depth"], rows)


def write_theorem_csv(path: Path, report: TheoremReport) -> Path:
    rows = []
    for case in report.cases:
        for m, rel in enumerate(case.relative, start=1):
            rows.append((case.N, case.bound, m, float(rel), int(m > case.bound and rel > report.tolerance)))
    return write_csv(path, ["N", "depth_bound", "m", "relative_energy", "violation"], rows)


def write_embedding_csvs(outdir: Path, report: EmbeddingReport) -> list[Path]:
    outdir = Path(outdir)
    written = []
    n = len(next(iter(report.labels.values())))
    for name, emb in report.embeddings.items():
        kept = {int(i): k for k, i in enumerate(emb.node_indices)}
        rows = []
        for row_id in range(n):
            coords = ["", "", ""]
            flag = 0
            if row_id in kept:
                flag = 1
                coords = [float(c) for c in emb.coords[kept[row_id]]]
            rows.append(
                (
                    row_id,
                    *coords,
                    float(report.labels["f1"][row_id]),
                    float(report.labels["alpha"][row_id]),
                    float(report.labels["r"][row_id]),
                    flag,
                )
            )
        written.append(
            write_csv(
                outdir / f"embedding_{name}.csv",
                ["row_id", "x", "y", "z", "f1", "alpha", "r", "component_flag"],
                rows,
            )
        )
        written.append(
            write_csv(
                outdir / f"eigenvalues_{name}.csv",
                ["rank", "eigenvalue"],
                [(k, float(v)) for k, v in enumerate(emb.eigenvalues)],
            )
        )
        table = report.spearman[name]
        rows = []
        for i, param in enumerate(PARAM_NAMES):
            axis, rho = report.assignment[name][param]
            for a in range(table.shape[1]):
                rows.append((param, a, float(table[i, a]), int(a == axis)))
        written.append(
            write_csv(
                outdir / f"spearman_{name}.csv",
                ["parameter", "axis", "rho", "assigned"],
                rows,
            )
        )
    return written
