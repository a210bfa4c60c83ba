"""Principal component analysis for feature-space reduction.

Covariance uses the 1/(n-1) normalization. When there are fewer samples
than features the eigenproblem is solved on the n x n Gram matrix instead of
the d x d covariance.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .config import PcaPolicy
from .errors import DataError, FingerprintMismatch

EIG_CLAMP = 1e-10


@dataclass(frozen=True, eq=False)
class PcaModel:
    mean: np.ndarray
    components: np.ndarray  # (retained_dim, input_dim), rows orthonormal
    eigenvalues: np.ndarray  # full admissible spectrum, non-increasing
    fit_fingerprint: str = ""
    degenerate: bool = False

    @property
    def retained_dim(self) -> int:
        return self.components.shape[0]

    @property
    def input_dim(self) -> int:
        return self.mean.shape[0]

    @property
    def config_fingerprint(self) -> str:
        return self.fit_fingerprint.split(":", 1)[0]

    def explained_variance_ratio(self) -> np.ndarray:
        total = self.eigenvalues.sum()
        if total <= 0:
            return np.zeros_like(self.eigenvalues)
        return self.eigenvalues / total


def _sign_fix(components: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of each component made positive
    idx = np.argmax(np.abs(components), axis=1)
    signs = np.sign(components[np.arange(components.shape[0]), idx])
    signs[signs == 0] = 1.0
    return components * signs[:, None]


def _complete_basis(basis: np.ndarray, needed: int, dim: int) -> np.ndarray:
    """Append ``needed`` orthonormal rows orthogonal to ``basis``."""
    proj = np.eye(dim) - basis.T @ basis
    u, s, _ = np.linalg.svd(proj)
    return u[:, :needed].T


def _eigen(centered: np.ndarray):
    """Eigenvalues (descending, length min(n-1, d)) and eigenvector rows."""
    n, d = centered.shape
    keep = min(n - 1, d)
    if n < d:
        gram = centered @ centered.T / (n - 1)
        evals, evecs = np.linalg.eigh(gram)
        order = np.argsort(evals)[::-1][:keep]
        evals = np.clip(evals[order], 0.0, None)
        evals[evals < EIG_CLAMP * max(1.0, evals[0] if evals.size else 0.0)] = 0.0
        good = evals > 0
        comps = np.zeros((keep, d))
        if good.any():
            u = evecs[:, order[good]]
            comps[good] = (centered.T @ u / np.sqrt(evals[good] * (n - 1))).T
        if not good.all():
            comps[~good] = _complete_basis(comps[good], int((~good).sum()), d)
        return evals, comps
    cov = centered.T @ centered / (n - 1)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1][:keep]
    evals = np.clip(evals[order], 0.0, None)
    evals[evals < EIG_CLAMP * max(1.0, evals[0] if evals.size else 0.0)] = 0.0
    return evals, evecs[:, order].T


def _matrix(vectors):
    fingerprints = {getattr(v, "config_fingerprint", None) for v in vectors}
    fingerprints.discard(None)
    if len(fingerprints) > 1:
        raise FingerprintMismatch(f"training vectors come from different configs: {sorted(fingerprints)}")
    rows = [np.asarray(getattr(v, "values", v), dtype=np.float64) for v in vectors]
    lengths = {r.shape for r in rows}
    if len(lengths) > 1:
        raise DataError(f"inconsistent vector lengths: {sorted(lengths)}")
    return np.vstack(rows), (fingerprints.pop() if fingerprints else "")


def fit_pca(vectors, policy: PcaPolicy | None = None, config_fingerprint: str | None = None) -> PcaModel:
    """Fit on the given training vectors (arrays or FeatureVectors)."""
    policy = policy or PcaPolicy()
    if len(vectors) < 2:
        raise DataError(f"PCA needs at least 2 vectors, got {len(vectors)}")
    x, fp = _matrix(vectors)
    if config_fingerprint is not None:
        fp = config_fingerprint
    n, d = x.shape
    max_dim = min(n - 1, d)
    mean = x.mean(axis=0)
    evals, comps = _eigen(x - mean)

    total = evals.sum()
    degenerate = total <= 0
    if policy.kind == "fixed":
        if policy.value > max_dim:
            raise DataError(f"fixed_dim {policy.value} exceeds the admissible maximum {max_dim}")
        dim = policy.value
    elif degenerate:
        dim = 1
    else:
        cum = np.cumsum(evals) / total
        # tolerance so a fraction of exactly 1.0 is reachable despite rounding
        dim = int(np.searchsorted(cum, policy.value - 1e-12) + 1)
        dim = min(dim, max_dim)

    digest = hashlib.sha256(np.ascontiguousarray(x).tobytes()).hexdigest()[:16]
    components = _sign_fix(comps[:dim])
    mean.flags.writeable = False
    components.flags.writeable = False
    evals.flags.writeable = False
    return PcaModel(mean, components, evals, f"{fp}:{digest}", degenerate)


def _check_fingerprint(model: PcaModel, v):
    fp = getattr(v, "config_fingerprint", None)
    if fp is not None and model.config_fingerprint and fp != model.config_fingerprint:
        raise FingerprintMismatch(f"vector config {fp} does not match model config {model.config_fingerprint}")


def project(model: PcaModel, v) -> np.ndarray:
    """Coordinates of ``v`` (one vector or a stack of rows) on the retained components."""
    _check_fingerprint(model, v)
    arr = np.asarray(getattr(v, "values", v), dtype=np.float64)
    if arr.shape[-1] != model.input_dim:
        raise DataError(f"vector length {arr.shape[-1]} does not match model input {model.input_dim}")
    return (arr - model.mean) @ model.components.T


def reconstruct(model: PcaModel, coords) -> np.ndarray:
    return model.mean + np.asarray(coords, dtype=np.float64) @ model.components
