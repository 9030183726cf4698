"""Experiment drivers: masking grid, depth decay, embeddings, depth-bound check.

Each driver takes a frozen config dataclass and returns a result object that
the report writers serialize; grids parallelize over independent cells with
results written into preallocated slots, so output never depends on worker
count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import spearmanr

from .baselines import MfccConfig, mfcc
from .filterbank import GAMMATONE, MORLET, SHANNON, Filterbank, FilterbankSpec, build_filterbank
from .manifold import Embedding, FeatureMatrix, isomap
from .parallel import parallel_map
from .scattering import _smoothed_means, feature_vector, layer_energy, scatter
from .synthesis import AdditiveToneSpec, HarmonicStackSpec, additive_tone, hann_window, harmonic_stack

PARAM_NAMES = ("f1", "alpha", "r")


# ---------------------------------------------------------------------------
# masking grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MaskingGridConfig:
    """Two-tone interference sweep around a probe frequency ``nu1``.

    The frame doubles as the averaging scale T, so the lowest second-layer
    wavelet (about nine octaves below nu1) still has its support within T.
    """

    nu1: float = 0.2
    amp_min: float = 1e-3
    amp_max: float = 1.0
    amp_steps: int = 32
    rel_min: float = 3e-4
    rel_max: float = 1.0
    rel_steps: int = 32
    family: str = GAMMATONE
    Q: int = 4
    J: int = 10
    lambda_max: float = 0.25
    signal_len: int = 32768
    a1: float = 1.0
    windowed: bool = True
    jobs: int = 1

    def amp_ratios(self) -> np.ndarray:
        return np.geomspace(self.amp_min, self.amp_max, self.amp_steps)

    def rel_freqs(self) -> np.ndarray:
        return np.geomspace(self.rel_min, self.rel_max, self.rel_steps)

    def filterbank_spec(self) -> FilterbankSpec:
        return FilterbankSpec(
            family=self.family,
            Q=self.Q,
            J=self.J,
            signal_len=self.signal_len,
            T=self.signal_len,
            lambda_max=self.lambda_max,
        )


@dataclass(frozen=True)
class MaskingGridResult:
    amp_ratios: np.ndarray
    rel_freqs: np.ndarray
    lambda2: np.ndarray
    lambda1: float
    values: np.ndarray  # (n_lambda2, amp_steps, rel_steps), masked cells = 0
    valid: np.ndarray  # (amp_steps, rel_steps) bool
    meta: dict


_GRID_FB: Filterbank | None = None
_GRID_CFG: MaskingGridConfig | None = None


def _grid_init(config: MaskingGridConfig) -> None:
    global _GRID_FB, _GRID_CFG
    _GRID_CFG = config
    _GRID_FB = build_filterbank(config.filterbank_spec())


def masking_coefficients(fb: Filterbank, y: np.ndarray, j1: int) -> np.ndarray:
    """Renormalized second-order coefficients of one band: S2(j1, .)/S1(j1).

    Equivalent to a full order-2 scattering followed by parent
    renormalization, restricted to the single first-order band ``j1``.
    """
    spectrum = np.fft.fft(y)
    row = np.fft.ifft(spectrum * fb.filters[j1])
    u1 = row.real**2 + row.imag**2
    s1 = float(_smoothed_means(u1[None, :], fb)[0])
    children = np.fft.ifft(np.fft.fft(u1)[None, :] * fb.filters[j1 + 1 :], axis=1)
    u2 = children.real**2 + children.imag**2
    s2 = _smoothed_means(u2, fb)
    eps = 1e-12 * s1 if s1 > 0 else 1e-12
    if s1 <= eps:
        return np.zeros_like(s2)
    return s2 / (s1 + eps)


def _grid_column(i_amp: int) -> np.ndarray:
    """One amplitude-ratio column of the masking grid: (rel_steps, n_lambda2)."""
    assert _GRID_FB is not None and _GRID_CFG is not None
    cfg = _GRID_CFG
    fb = _GRID_FB
    j1 = fb.nearest_index(cfg.nu1)
    n_l2 = fb.n_filters - (j1 + 1)
    ratio = float(cfg.amp_ratios()[i_amp])
    window = hann_window(cfg.signal_len) if cfg.windowed else np.ones(cfg.signal_len)
    t = np.arange(cfg.signal_len)
    out = np.zeros((cfg.rel_steps, n_l2))
    for i_rel, rel in enumerate(cfg.rel_freqs()):
        nu2 = cfg.nu1 * (1.0 - float(rel))
        if nu2 <= 0.0 or nu2 >= 0.5:
            continue  # cell masked out
        y = cfg.a1 * (np.cos(2.0 * np.pi * cfg.nu1 * t) + ratio * np.cos(2.0 * np.pi * nu2 * t))
        out[i_rel] = masking_coefficients(fb, y * window, j1)
    return out


def run_masking_grid(config: MaskingGridConfig) -> MaskingGridResult:
    """Evaluate the renormalized interference response over the (a2/a1,
    |nu2-nu1|/nu1) grid, keeping every second-layer band as a slice.
    """
    fb = build_filterbank(config.filterbank_spec())
    j1 = fb.nearest_index(config.nu1)
    lambda2 = fb.grid[j1 + 1 :]
    if len(lambda2) == 0:
        raise ValueError("no second-layer bands below nu1; increase J")

    columns = parallel_map(
        _grid_column,
        range(config.amp_steps),
        jobs=config.jobs,
        initializer=_grid_init,
        initargs=(config,),
    )
    values = np.zeros((len(lambda2), config.amp_steps, config.rel_steps))
    for i_amp, col in enumerate(columns):
        values[:, i_amp, :] = col.T

    nu2 = config.nu1 * (1.0 - config.rel_freqs())
    valid_rel = (nu2 > 0.0) & (nu2 < 0.5)
    valid = np.broadcast_to(valid_rel[None, :], (config.amp_steps, config.rel_steps)).copy()
    meta = {
        "lambda1": float(fb.grid[j1]),
        "lambda1_index": j1,
        "t_condition_rel": config.Q / (config.nu1 * config.signal_len),
        "q_condition_rel": 1.0 / config.Q,
        "windowed": config.windowed,
    }
    return MaskingGridResult(
        amp_ratios=config.amp_ratios(),
        rel_freqs=config.rel_freqs(),
        lambda2=lambda2,
        lambda1=float(fb.grid[j1]),
        values=values,
        valid=valid,
        meta=meta,
    )


# ---------------------------------------------------------------------------
# depth decay / depth bound
# ---------------------------------------------------------------------------

def depth_bound(N: int) -> int:
    """Octave count bounding the effective scattering depth of an N-harmonic
    stack; a single component still lights up one layer, hence the floor at 1.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    return max(1, math.ceil(math.log2(N)))


def stack_analysis_setup(N: int, base_signal_len: int = 4096, lambda_max: float = 0.25):
    """Per-N stack and filterbank placement that makes the depth bound tight.

    The fundamental sits one bin above a dyadic band edge (f1 = 2**h + 1
    bins with h = depth bound), which keeps every dyadic block of harmonics
    inside a single octave band; the frame grows with N so all harmonics
    stay below Nyquist.
    """
    h = depth_bound(N)
    f1 = 2**h + 1
    signal_len = max(base_signal_len, 2 ** (2 * h + 2))
    top_bin = int(round(lambda_max * signal_len))
    J = int(math.log2(top_bin)) - h + 1
    spec = HarmonicStackSpec(N=N, f1=f1, signal_len=signal_len)
    fb_spec = FilterbankSpec(
        family=SHANNON, Q=1, J=J, signal_len=signal_len, T=signal_len, lambda_max=lambda_max
    )
    return spec, fb_spec


@dataclass(frozen=True)
class DepthDecayConfig:
    N_list: tuple[int, ...] = (1, 2, 4, 8, 16, 32, 64, 128)
    base_signal_len: int = 4096
    lambda_max: float = 0.25
    max_order: int = 8
    rel_threshold: float = 1e-8
    jobs: int = 1


@dataclass(frozen=True)
class DepthDecayResult:
    N_list: tuple[int, ...]
    energies: dict[int, np.ndarray]  # N -> absolute layer energies, m = 1..
    relative: dict[int, np.ndarray]  # N -> energies / energy(U_1)
    effective_depth: dict[int, int]  # last m with relative energy > threshold
    meta: dict


def _decay_one(args) -> tuple[int, np.ndarray]:
    N, config = args
    spec, fb_spec = stack_analysis_setup(N, config.base_signal_len, config.lambda_max)
    fb = build_filterbank(fb_spec)
    y = harmonic_stack(spec)
    _, layers = scatter(y, fb, max_order=config.max_order)
    energies = np.zeros(config.max_order)
    for layer in layers:
        energies[layer.depth - 1] = layer_energy(layer)
    return N, energies


def run_depth_decay(config: DepthDecayConfig) -> DepthDecayResult:
    """Layer-energy decay curves for harmonic stacks of increasing bandwidth."""
    results = parallel_map(
        _decay_one, [(N, config) for N in config.N_list], jobs=config.jobs
    )
    energies: dict[int, np.ndarray] = {}
    relative: dict[int, np.ndarray] = {}
    effective: dict[int, int] = {}
    for N, curve in results:
        energies[N] = curve
        rel = curve / curve[0] if curve[0] > 0 else np.zeros_like(curve)
        relative[N] = rel
        above = np.flatnonzero(rel > config.rel_threshold)
        effective[N] = int(above[-1]) + 1 if len(above) else 0
    meta = {
        "rel_threshold": config.rel_threshold,
        "max_order": config.max_order,
        "base_signal_len": config.base_signal_len,
    }
    return DepthDecayResult(
        N_list=tuple(config.N_list),
        energies=energies,
        relative=relative,
        effective_depth=effective,
        meta=meta,
    )


@dataclass(frozen=True)
class TheoremCase:
    N: int
    bound: int
    relative: np.ndarray  # energy(U_m)/energy(U_1), m = 1..
    violations: list[tuple[int, float]]  # (m, value) with m > bound above tolerance

    @property
    def passed(self) -> bool:
        return not self.violations


@dataclass(frozen=True)
class TheoremReport:
    cases: list[TheoremCase]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases)

    @property
    def max_violation(self) -> float:
        worst = 0.0
        for case in self.cases:
            beyond = case.relative[case.bound :]
            if len(beyond):
                worst = max(worst, float(beyond.max()))
        return worst


def verify_theorem(
    N_list=(1, 2, 3, 4, 8, 16),
    tolerance: float = 1e-8,
    base_signal_len: int = 4096,
) -> TheoremReport:
    """Check that layer energy past the bandwidth bound is numerically zero.

    For each N the stack spans ceil(log2 N) octaves (floored at one), and
    every layer beyond that must carry relative energy at or below
    ``tolerance``; brick-wall filters make the residual pure FFT round-off.
    """
    cases: list[TheoremCase] = []
    for N in N_list:
        bound = depth_bound(N)
        spec, fb_spec = stack_analysis_setup(N, base_signal_len)
        fb = build_filterbank(fb_spec)
        _, layers = scatter(harmonic_stack(spec), fb, max_order=bound + 2)
        energies = np.zeros(bound + 2)
        for layer in layers:
            energies[layer.depth - 1] = layer_energy(layer)
        rel = energies / energies[0]
        violations = [
            (m + 1, float(rel[m])) for m in range(bound, len(rel)) if rel[m] > tolerance
        ]
        cases.append(TheoremCase(N=N, bound=bound, relative=rel, violations=violations))
    return TheoremReport(cases=cases, tolerance=tolerance)


# ---------------------------------------------------------------------------
# embedding comparison
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EmbeddingConfig:
    """Additive-tone corpus -> {scattering, MFCC} features -> Isomap.

    Desk scale keeps the (alpha, r) raster small with a deterministic cycle
    of fundamentals so the whole comparison runs in seconds; ``full_scale()``
    matches the 2500-signal corpus with random fundamentals and K = 100.
    The raster step count is kept coprime with the 13-value fundamental
    cycle so no tone parameter aliases another across the corpus.
    """

    alpha_steps: int = 15
    r_steps: int = 15
    f1_random: bool = False  # False: deterministic 12..24 cycle over the raster
    seed: int = 0
    T: int = 1024
    N: int = 32
    K: int = 50
    dim: int = 3
    family: str = MORLET
    Q: int = 1
    J: int = 8
    max_order: int = 2
    mfcc: MfccConfig = field(default_factory=MfccConfig)
    zscore: bool = False  # per-column standardization, exploration only
    jobs: int = 1

    @staticmethod
    def full_scale(seed: int = 0, jobs: int = 1) -> "EmbeddingConfig":
        return EmbeddingConfig(
            alpha_steps=50, r_steps=50, f1_random=True, seed=seed, K=100, jobs=jobs
        )

    def filterbank_spec(self) -> FilterbankSpec:
        return FilterbankSpec(
            family=self.family, Q=self.Q, J=self.J, signal_len=self.T, T=self.T
        )


@dataclass(frozen=True)
class EmbeddingReport:
    embeddings: dict[str, Embedding]  # feature-set name -> embedding
    spearman: dict[str, np.ndarray]  # feature-set name -> (3 params x dim axes)
    assignment: dict[str, dict[str, tuple[int, float]]]  # set -> param -> (axis, rho)
    labels: dict[str, np.ndarray]
    feature_dims: dict[str, int]
    meta: dict


def tone_parameters(config: EmbeddingConfig) -> list[AdditiveToneSpec]:
    """The corpus parameter list, raster order (alpha outer, r inner)."""
    alphas = np.linspace(0.0, 2.0, config.alpha_steps)
    rs = np.linspace(0.0, 1.0, config.r_steps)
    rng = np.random.default_rng(config.seed)
    specs = []
    idx = 0
    for alpha in alphas:
        for r in rs:
            if config.f1_random:
                f1 = int(rng.integers(12, 25))
            else:
                f1 = 12 + idx % 13
            specs.append(
                AdditiveToneSpec(alpha=float(alpha), r=float(r), f1=f1, N=config.N, T=config.T)
            )
            idx += 1
    return specs


_EMB_FB: Filterbank | None = None
_EMB_CFG: EmbeddingConfig | None = None


def _emb_init(config: EmbeddingConfig) -> None:
    global _EMB_FB, _EMB_CFG
    _EMB_CFG = config
    _EMB_FB = build_filterbank(config.filterbank_spec())


def _emb_features(spec: AdditiveToneSpec) -> tuple[np.ndarray, np.ndarray]:
    assert _EMB_FB is not None and _EMB_CFG is not None
    y = additive_tone(spec)
    feature, _ = scatter(y, _EMB_FB, max_order=_EMB_CFG.max_order)
    return feature_vector(feature), mfcc(y, _EMB_CFG.mfcc)


def spearman_table(params: dict[str, np.ndarray], coords: np.ndarray) -> np.ndarray:
    """Rank correlation of each tone parameter against each embedding axis."""
    table = np.zeros((len(PARAM_NAMES), coords.shape[1]))
    for i, name in enumerate(PARAM_NAMES):
        for a in range(coords.shape[1]):
            table[i, a] = spearmanr(params[name], coords[:, a])[0]
    return table


def assign_axes(table: np.ndarray) -> dict[str, tuple[int, float]]:
    """Greedy one-to-one parameter/axis matching on descending |rho|."""
    order = sorted(
        ((i, a) for i in range(table.shape[0]) for a in range(table.shape[1])),
        key=lambda ia: (-abs(table[ia[0], ia[1]]), ia[0], ia[1]),
    )
    used_params: set[int] = set()
    used_axes: set[int] = set()
    out: dict[str, tuple[int, float]] = {}
    for i, a in order:
        if i in used_params or a in used_axes:
            continue
        used_params.add(i)
        used_axes.add(a)
        out[PARAM_NAMES[i]] = (a, float(table[i, a]))
    return out


def run_embedding_experiment(config: EmbeddingConfig) -> EmbeddingReport:
    """Embed scattering and MFCC features of the tone corpus and score how
    each synthesis parameter aligns with an embedding axis.
    """
    specs = tone_parameters(config)
    pairs = parallel_map(
        _emb_features, specs, jobs=config.jobs, initializer=_emb_init, initargs=(config,)
    )
    scat = np.array([p[0] for p in pairs])
    mel = np.array([p[1] for p in pairs])
    labels = {
        "f1": np.array([s.f1 for s in specs], dtype=float),
        "alpha": np.array([s.alpha for s in specs]),
        "r": np.array([s.r for s in specs]),
    }

    report_sets = {"scattering": scat, "mfcc": mel}
    embeddings: dict[str, Embedding] = {}
    tables: dict[str, np.ndarray] = {}
    assignment: dict[str, dict[str, tuple[int, float]]] = {}
    for name, values in report_sets.items():
        if config.zscore:
            spread = values.std(axis=0)
            values = (values - values.mean(axis=0)) / np.where(spread > 0, spread, 1.0)
        X = FeatureMatrix(values=values, labels=labels)
        emb = isomap(X, K=config.K, dim=config.dim)
        kept = emb.node_indices
        table = spearman_table({k: v[kept] for k, v in labels.items()}, emb.coords)
        embeddings[name] = emb
        tables[name] = table
        assignment[name] = assign_axes(table)

    meta = {
        "n_signals": len(specs),
        "K": config.K,
        "dim": config.dim,
        "f1_random": config.f1_random,
        "seed": config.seed,
        "zscore": config.zscore,
        "scattering_dim": scat.shape[1],
        "mfcc_dim": mel.shape[1],
    }
    return EmbeddingReport(
        embeddings=embeddings,
        spearman=tables,
        assignment=assignment,
        labels=labels,
        feature_dims={k: v.shape[1] for k, v in report_sets.items()},
        meta=meta,
    )
