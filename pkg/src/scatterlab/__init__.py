"""Wavelet scattering with squared-modulus activation, plus the analyses
built on it: two-tone masking coefficients, additive-tone embeddings, and
the bandwidth bound on effective scattering depth.
"""

from .baselines import MfccConfig, mel_filterbank, mfcc
from .filterbank import (
    FAMILIES,
    GAMMATONE,
    MORLET,
    SHANNON,
    Filterbank,
    FilterbankSpec,
    build_filterbank,
    build_frequency_grid,
    evaluate_wavelet_hat,
)
from .manifold import (
    DistanceGraph,
    Embedding,
    FeatureMatrix,
    classical_mds,
    geodesic_distances,
    isomap,
    knn_graph,
)
from .scattering import (
    ScatteringFeature,
    ScatteringLayer,
    ScatteringPath,
    feature_names,
    feature_vector,
    layer_energy,
    propagate_layer,
    renormalize_second_order,
    scalogram_power,
    scatter,
)
from .synthesis import (
    AdditiveToneSpec,
    HarmonicStackSpec,
    TwoToneSpec,
    additive_tone,
    dataset_generate,
    harmonic_stack,
    two_tone,
)

__version__ = "0.1.0"

__all__ = [
    "FAMILIES",
    "MORLET",
    "GAMMATONE",
    "SHANNON",
    "FilterbankSpec",
    "Filterbank",
    "build_frequency_grid",
    "evaluate_wavelet_hat",
    "build_filterbank",
    "ScatteringPath",
    "ScatteringLayer",
    "ScatteringFeature",
    "scalogram_power",
    "propagate_layer",
    "scatter",
    "renormalize_second_order",
    "layer_energy",
    "feature_names",
    "feature_vector",
    "TwoToneSpec",
    "AdditiveToneSpec",
    "HarmonicStackSpec",
    "two_tone",
    "additive_tone",
    "harmonic_stack",
    "dataset_generate",
    "FeatureMatrix",
    "DistanceGraph",
    "Embedding",
    "knn_graph",
    "geodesic_distances",
    "classical_mds",
    "isomap",
    "MfccConfig",
    "mel_filterbank",
    "mfcc",
    "__version__",
]
