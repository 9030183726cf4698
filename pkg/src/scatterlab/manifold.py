"""Self-contained Isomap: exact kNN graph, all-pairs shortest paths, classical MDS.

Kept deliberately dependency-light so every stage has a checkable contract:
neighbor search is exact (full distance matrix), geodesics come from a
vectorized Floyd-Warshall sweep, and the embedding is the eigendecomposition
of the double-centered squared-distance matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class FeatureMatrix:
    """n x d feature array with per-row labels (arbitrary keyed columns)."""

    values: np.ndarray
    labels: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError("feature matrix must be 2-D")
        if not np.all(np.isfinite(v)):
            raise ValueError("feature matrix contains non-finite entries")
        for key, col in self.labels.items():
            if len(col) != v.shape[0]:
                raise ValueError(f"label {key!r} length {len(col)} != n rows {v.shape[0]}")
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class DistanceGraph:
    """Dense symmetric adjacency; np.inf marks absent edges, diagonal is 0."""

    weights: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    def connected_components(self) -> list[np.ndarray]:
        """Components as sorted index arrays, largest first (ties: lowest index)."""
        n = self.n
        adj = np.isfinite(self.weights) & ~np.eye(n, dtype=bool)
        seen = np.zeros(n, dtype=bool)
        comps = []
        for start in range(n):
            if seen[start]:
                continue
            stack = [start]
            seen[start] = True
            members = [start]
            while stack:
                node = stack.pop()
                for nb in np.flatnonzero(adj[node]):
                    if not seen[nb]:
                        seen[nb] = True
                        stack.append(int(nb))
                        members.append(int(nb))
            comps.append(np.array(sorted(members)))
        comps.sort(key=lambda c: (-len(c), c[0]))
        return comps


def pairwise_distances(X: np.ndarray) -> np.ndarray:
    """Exact Euclidean distance matrix, symmetric with zero diagonal."""
    X = np.asarray(X, dtype=float)
    sq = np.sum(X**2, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (X @ X.T)
    np.maximum(d2, 0.0, out=d2)
    d = np.sqrt(d2)
    np.fill_diagonal(d, 0.0)
    return np.minimum(d, d.T)


def knn_graph(X: FeatureMatrix, K: int) -> DistanceGraph:
    """Graph with an edge whenever either endpoint is among the other's K
    nearest rows (union symmetrization).  Exact search; ties break toward
    the lower row index, so results are deterministic.
    """
    n = X.n
    if not 1 <= K < n:
        raise ValueError(f"need 1 <= K < n, got K={K}, n={n}")
    dist = pairwise_distances(X.values)
    search = dist.copy()
    np.fill_diagonal(search, np.inf)
    weights = np.full((n, n), np.inf)
    np.fill_diagonal(weights, 0.0)
    for i in range(n):
        # stable sort on distance keeps equal-distance neighbors index-ordered
        neighbors = np.argsort(search[i], kind="stable")[:K]
        weights[i, neighbors] = dist[i, neighbors]
        weights[neighbors, i] = dist[i, neighbors]
    return DistanceGraph(weights=weights)


def geodesic_distances(G: DistanceGraph) -> np.ndarray:
    """All-pairs shortest-path lengths (Floyd-Warshall, row-vectorized).

    Unreachable pairs stay np.inf.  Symmetry of the input is preserved
    exactly at every sweep.
    """
    D = G.weights.copy()
    n = G.n
    buf = np.empty_like(D)
    for k in range(n):
        np.add.outer(D[:, k], D[k, :], out=buf)
        np.minimum(D, buf, out=D)
    return D


@dataclass(frozen=True)
class Embedding:
    """Centered coordinates plus the (descending) MDS eigenvalues.

    ``node_indices`` maps embedding rows back to input rows; rows that were
    not embedded (outside the retained graph component) are the complement.
    """

    coords: np.ndarray
    eigenvalues: np.ndarray
    node_indices: np.ndarray


def classical_mds(D: np.ndarray, dim: int) -> Embedding:
    """Torgerson MDS: eigendecompose B = -1/2 * J * D**2 * J.

    Coordinates are the top-``dim`` eigenvectors scaled by sqrt(eigenvalue);
    negative eigenvalues clip to zero (their axes collapse).
    """
    D = np.asarray(D, dtype=float)
    n = D.shape[0]
    if D.ndim != 2 or D.shape[1] != n:
        raise ValueError("distance matrix must be square")
    if not np.all(np.isfinite(D)):
        raise ValueError("distance matrix has non-finite entries; embed one component at a time")
    if not np.allclose(D, D.T):
        raise ValueError("distance matrix must be symmetric")
    if dim < 1:
        raise ValueError("dim must be >= 1")

    D2 = D**2
    B = -0.5 * (D2 - D2.mean(axis=0)[None, :] - D2.mean(axis=1)[:, None] + D2.mean())
    evals, evecs = np.linalg.eigh(B)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = evecs[:, order]

    top = np.clip(evals[:dim], 0.0, None)
    coords = evecs[:, :dim] * np.sqrt(top)[None, :]
    # fix the sign of each axis (largest-magnitude coordinate positive)
    for a in range(coords.shape[1]):
        col = coords[:, a]
        if col.any():
            pivot = int(np.argmax(np.abs(col)))
            if col[pivot] < 0:
                coords[:, a] = -col
    return Embedding(coords=coords, eigenvalues=evals, node_indices=np.arange(n))


def isomap(X: FeatureMatrix, K: int, dim: int = 3) -> Embedding:
    """kNN graph -> largest connected component -> geodesics -> classical MDS.

    Rows outside the largest component are excluded from the embedding and
    reported through ``node_indices``.
    """
    graph = knn_graph(X, K)
    component = graph.connected_components()[0]
    if len(component) < dim + 1:
        raise ValueError(
            f"largest graph component has {len(component)} points; need at least {dim + 1}"
        )
    sub = DistanceGraph(weights=graph.weights[np.ix_(component, component)])
    D = geodesic_distances(sub)
    emb = classical_mds(D, dim)
    return Embedding(coords=emb.coords, eigenvalues=emb.eigenvalues, node_indices=component)
