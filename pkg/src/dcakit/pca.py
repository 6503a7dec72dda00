"""Covariance PCA built on a cyclic Jacobi eigensolver, variability ranking,
merge-candidate detection and the rank-sum test that backs merge decisions.

The pipeline never projects data onto components; it only consumes the
eigenstructure (to rank attributes by how much of the overall variance they
carry) and the PC1-PC2 geometry (to spot attributes that are linear copies
of each other).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._validation import as_symmetric_matrix
from .errors import ConfigError, DataError, NumericalError
from .preprocessing import NormalisedTable

MAX_SWEEPS = 100
EXACT_RANKSUM_LIMIT = 12  # exhaustive enumeration up to n_a + n_b of this


@dataclass(frozen=True)
class PcaResult:
    """Eigenvalues (descending) and orthonormal loadings of a symmetric matrix.

    ``loadings[i, j]`` is the weight of attribute i in component j.
    """

    eigenvalues: np.ndarray
    loadings: np.ndarray
    attributes: tuple[str, ...]

    @property
    def n_attributes(self) -> int:
        return len(self.attributes)

    @property
    def explained_fraction(self) -> np.ndarray:
        total = self.eigenvalues.sum()
        if total <= 0.0:
            return np.zeros_like(self.eigenvalues)
        return self.eigenvalues / total


@dataclass(frozen=True)
class VariabilityRanking:
    """Attributes ordered by contribution to overall variance, best first."""

    attributes: tuple[str, ...]
    scores: tuple[float, ...]


@dataclass(frozen=True)
class MergeCandidate:
    """A pair of attributes whose PC1-PC2 directions nearly coincide."""

    pair: tuple[str, str]
    similarity: float
    p_value: float


def covariance(table: NormalisedTable, attributes) -> np.ndarray:
    """Sample covariance matrix (n-1 denominator) of the named columns.

    Each pair is computed once and mirrored, so the result is exactly
    symmetric.
    """
    attributes = list(attributes)
    if len(attributes) < 2:
        raise DataError(f"covariance needs >= 2 attributes, got {len(attributes)}")
    missing = [a for a in attributes if a not in table.columns]
    if missing:
        raise DataError(f"unknown column(s): {', '.join(missing)}")
    X = np.column_stack([table.columns[a] for a in attributes])
    n = X.shape[0]
    if n < 2:
        raise DataError(f"covariance needs >= 2 rows, got {n}")
    centred = X - X.mean(axis=0)
    cov = centred.T @ centred / (n - 1)
    upper = np.triu(cov)
    return upper + np.triu(cov, k=1).T


def _off_diagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt((off * off).sum()))


def _jacobi_rotate(a: np.ndarray, v: np.ndarray, k: int, l: int) -> None:
    """One Jacobi rotation annihilating a[k, l], accumulating vectors in v."""
    akl = a[k, l]
    theta = (a[l, l] - a[k, k]) / (2.0 * akl)
    if theta >= 0.0:
        t = 1.0 / (theta + math.sqrt(theta * theta + 1.0))
    else:
        t = -1.0 / (-theta + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    tau = s / (1.0 + c)

    a[k, k] -= t * akl
    a[l, l] += t * akl
    a[k, l] = a[l, k] = 0.0
    n = a.shape[0]
    for i in range(n):
        if i == k or i == l:
            continue
        aik, ail = a[i, k], a[i, l]
        a[i, k] = a[k, i] = aik - s * (ail + tau * aik)
        a[i, l] = a[l, i] = ail + s * (aik - tau * ail)

    vk = v[:, k].copy()
    vl = v[:, l].copy()
    v[:, k] = vk - s * (vl + tau * vk)
    v[:, l] = vl + s * (vk - tau * vl)


def jacobi_eigen(matrix, attributes=None) -> PcaResult:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Sweeps run until the off-diagonal Frobenius norm drops to
    1e-12 * (initial off-diagonal norm + 1), at most MAX_SWEEPS times.
    Eigenpairs come back sorted by eigenvalue descending; equal eigenvalues
    are ordered by the index of their largest-magnitude loading, and each
    eigenvector is flipped so that entry is positive.
    """
    a = as_symmetric_matrix(matrix, "matrix")
    n = a.shape[0]
    if attributes is None:
        attributes = tuple(f"x{i}" for i in range(n))
    else:
        attributes = tuple(attributes)
        if len(attributes) != n:
            raise DataError(f"{len(attributes)} names for order-{n} matrix")

    v = np.eye(n)
    tol = 1e-12 * (_off_diagonal_norm(a) + 1.0)
    for _ in range(MAX_SWEEPS):
        if _off_diagonal_norm(a) <= tol:
            break
        for k in range(n - 1):
            for l in range(k + 1, n):
                if a[k, l] != 0.0:
                    _jacobi_rotate(a, v, k, l)
    else:
        raise NumericalError(
            f"Jacobi sweep limit ({MAX_SWEEPS}) hit; off-diagonal norm "
            f"{_off_diagonal_norm(a):.3e} > {tol:.3e}"
        )

    eigenvalues = np.diag(a).copy()
    anchors = np.abs(v).argmax(axis=0)
    order = sorted(range(n), key=lambda j: (-eigenvalues[j], anchors[j]))
    eigenvalues = eigenvalues[order]
    loadings = v[:, order].copy()
    for j in range(n):
        col = loadings[:, j]
        if col[np.abs(col).argmax()] < 0.0:
            loadings[:, j] = -col
    return PcaResult(eigenvalues=eigenvalues, loadings=loadings, attributes=attributes)


def components_for_fraction(result: PcaResult, target: float = 0.9) -> int:
    """Smallest component count whose cumulative explained fraction >= target."""
    fractions = result.explained_fraction
    cumulative = np.cumsum(fractions)
    reached = np.flatnonzero(cumulative >= target)
    if reached.size == 0:
        return result.n_attributes
    return int(reached[0]) + 1


def variability_scores(
    result: PcaResult, n_components: int | None = None, mode: str = "subspace"
) -> VariabilityRanking:
    """Rank attributes by the variance they carry in the leading subspace.

    ``subspace`` scores attribute i as sum_j lambda_j * loading_ij^2 over the
    first ``n_components`` components (default: enough components to explain
    90% of the variance).  ``pc1`` scores by |loading on the first component|
    instead.  Ties keep the input column order.
    """
    p = result.n_attributes
    if n_components is None:
        n_components = components_for_fraction(result)
    if not 1 <= n_components <= p:
        raise ConfigError(f"n_components must be in [1, {p}], got {n_components}")

    if mode == "subspace":
        lam = result.eigenvalues[:n_components]
        v = result.loadings[:, :n_components]
        scores = (v * v) @ lam
    elif mode == "pc1":
        scores = np.abs(result.loadings[:, 0])
    else:
        raise ConfigError(f"unknown score mode: {mode!r}")

    order = sorted(range(p), key=lambda i: (-scores[i], i))
    return VariabilityRanking(
        attributes=tuple(result.attributes[i] for i in order),
        scores=tuple(float(scores[i]) for i in order),
    )


def biplot_coordinates(result: PcaResult) -> np.ndarray:
    """Attribute arrows on the PC1-PC2 plane: loadings scaled by sqrt(lambda).

    This is the geometry a biplot draws; two attributes that are linear
    copies of each other get parallel arrows here even when a degenerate
    (zero-variance) component sits in the leading pair.
    """
    lam = np.clip(result.eigenvalues[:2], 0.0, None)
    return result.loadings[:, :2] * np.sqrt(lam)


def find_merge_candidates(
    result: PcaResult, table: NormalisedTable, threshold: float = 0.95
) -> list[MergeCandidate]:
    """Attribute pairs whose biplot arrows have cosine similarity >= threshold.

    Each candidate carries the two-sided rank-sum p-value between the two
    columns; the caller decides whether that gates the merge.
    """
    if not 0.0 < threshold <= 1.0:
        raise ConfigError(f"threshold must be in (0, 1], got {threshold}")
    arrows = biplot_coordinates(result)
    norms = np.sqrt((arrows * arrows).sum(axis=1))
    candidates = []
    for i, j in itertools.combinations(range(result.n_attributes), 2):
        if norms[i] == 0.0 or norms[j] == 0.0:
            continue
        similarity = float(arrows[i] @ arrows[j] / (norms[i] * norms[j]))
        if similarity >= threshold:
            a, b = result.attributes[i], result.attributes[j]
            _, p_value = wilcoxon_rank_sum(table.columns[a], table.columns[b])
            candidates.append(
                MergeCandidate(pair=(a, b), similarity=similarity, p_value=p_value)
            )
    candidates.sort(key=lambda c: (-c.similarity, c.pair))
    return candidates


def _midranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n with tied values sharing the mean of their rank range."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def wilcoxon_rank_sum(a, b) -> tuple[float, float]:
    """Two-sample rank-sum test; returns (U statistic of a, two-sided p).

    Ties share mid-ranks.  Small samples (n_a + n_b <= 12) get an exact p by
    enumerating every assignment of ranks to the first sample; larger ones
    use the normal approximation with tie-corrected variance and a 0.5
    continuity correction.  U = R_a - n_a(n_a+1)/2.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    n_a, n_b = len(a), len(b)
    if n_a == 0 or n_b == 0:
        raise DataError("rank-sum test needs two non-empty samples")

    ranks = _midranks(np.concatenate([a, b]))
    offset = n_a * (n_a + 1) / 2.0
    u = float(ranks[:n_a].sum() - offset)
    mu = n_a * n_b / 2.0
    n = n_a + n_b

    if n <= EXACT_RANKSUM_LIMIT:
        observed = abs(u - mu)
        hits = 0
        total = 0
        for subset in itertools.combinations(range(n), n_a):
            u_perm = ranks[list(subset)].sum() - offset
            if abs(u_perm - mu) >= observed:
                hits += 1
            total += 1
        return u, hits / total

    _, tie_counts = np.unique(ranks, return_counts=True)
    tie_term = float((tie_counts**3 - tie_counts).sum())
    variance = n_a * n_b / 12.0 * ((n + 1) - tie_term / (n * (n - 1)))
    if variance <= 0.0:
        return u, 1.0
    z = max(abs(u - mu) - 0.5, 0.0) / math.sqrt(variance)
    p = math.erfc(z / math.sqrt(2.0))
    return u, min(p, 1.0)
