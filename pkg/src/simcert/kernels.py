"""PDS kernels, Gram matrices, and the feature-space radius q.

Three families are supported: linear (x . y), RBF (exp(-gamma ||x - y||^2),
for which K(x, x) = 1 and hence q = 1), and polynomial ((x . y + coef0)^degree).
Positive semidefiniteness is an assumption of the kernel certificates; it is
checked empirically on the sampled Gram matrix via an eigenvalue threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SampleMatrix, ValidationError, _as_matrix, _freeze

__all__ = [
    "KERNEL_FAMILIES",
    "DEFAULT_PSD_TOL",
    "KernelSpec",
    "GramMatrix",
    "PsdCheck",
    "kernel_eval",
    "kernel_columns",
    "gram",
    "psd_check",
    "feature_space_radius",
]

KERNEL_FAMILIES = ("linear", "rbf", "polynomial")

# Relative eigenvalue floor used when a caller does not pick its own.
DEFAULT_PSD_TOL = 1e-8


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus parameters.

    gamma applies to rbf, degree and coef0 to polynomial; unused fields are
    validated anyway so a spec is serializable regardless of family.
    """

    family: str
    gamma: float = 1.0
    degree: int = 2
    coef0: float = 1.0

    def __post_init__(self):
        if self.family not in KERNEL_FAMILIES:
            raise ValidationError(
                f"unknown kernel family {self.family!r}; expected one of {KERNEL_FAMILIES}"
            )
        if not self.gamma > 0.0:
            raise ValidationError("gamma must be positive")
        if int(self.degree) != self.degree or self.degree < 1:
            raise ValidationError("degree must be an integer >= 1")
        if self.coef0 < 0.0:
            raise ValidationError("coef0 must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "gamma": float(self.gamma),
            "degree": int(self.degree),
            "coef0": float(self.coef0),
        }

    @staticmethod
    def from_dict(payload: dict) -> "KernelSpec":
        return KernelSpec(
            family=payload["family"],
            gamma=float(payload.get("gamma", 1.0)),
            degree=int(payload.get("degree", 2)),
            coef0=float(payload.get("coef0", 1.0)),
        )


@dataclass(frozen=True)
class GramMatrix:
    """Symmetric matrix of kernel evaluations on a sample."""

    values: np.ndarray

    def __post_init__(self):
        arr = _as_matrix(self.values, "Gram matrix")
        if arr.shape[0] != arr.shape[1]:
            raise ValidationError(f"Gram matrix must be square, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("Gram matrix contains non-finite entries")
        if not np.array_equal(arr, arr.T):
            raise ValidationError("Gram matrix is not symmetric")
        if np.any(np.diag(arr) < 0.0):
            raise ValidationError("Gram matrix has a negative diagonal entry")
        object.__setattr__(self, "values", _freeze(arr))

    @property
    def size(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class PsdCheck:
    """Outcome of the empirical positive-semidefiniteness check."""

    passed: bool
    min_eigenvalue: float
    threshold: float


def kernel_eval(spec: KernelSpec, x, y) -> float:
    """Evaluate the kernel on a single pair of feature vectors."""
    xv = np.asarray(x, dtype=float).ravel()
    yv = np.asarray(y, dtype=float).ravel()
    if xv.shape != yv.shape:
        raise ValidationError(f"dimension mismatch: {xv.shape} vs {yv.shape}")
    if spec.family == "linear":
        return float(xv @ yv)
    if spec.family == "rbf":
        d = xv - yv
        return float(np.exp(-spec.gamma * (d @ d)))
    return float((xv @ yv + spec.coef0) ** spec.degree)


def kernel_columns(spec: KernelSpec, anchors, points) -> np.ndarray:
    """Kernel evaluations of each anchor against each point.

    Returns the (n_anchors x n_points) matrix with entry (i, j) equal to
    K(anchor_i, point_j).
    """
    a = _as_matrix(anchors, "anchor matrix")
    p = _as_matrix(points, "point matrix")
    if a.shape[1] != p.shape[1]:
        raise ValidationError(
            f"dimension mismatch: anchors have {a.shape[1]} features, points {p.shape[1]}"
        )
    inner = a @ p.T
    if spec.family == "linear":
        return inner
    if spec.family == "rbf":
        if a is p:
            # taking both norms from the inner-product diagonal keeps the
            # self-distances exactly zero, so K(x, x) = 1 exactly
            a_norms = p_norms = np.diag(inner)
        else:
            a_norms = np.sum(a * a, axis=1)
            p_norms = np.sum(p * p, axis=1)
        sq = a_norms[:, None] + p_norms[None, :] - 2.0 * inner
        np.maximum(sq, 0.0, out=sq)
        return np.exp(-spec.gamma * sq)
    return (inner + spec.coef0) ** spec.degree


def gram(spec: KernelSpec, sample: SampleMatrix) -> GramMatrix:
    """Gram matrix of the sample; exact symmetry is enforced by mirroring
    the upper triangle so each unordered pair is computed once."""
    k = kernel_columns(spec, sample.values, sample.values)
    upper = np.triu(k)
    return GramMatrix(upper + np.triu(k, 1).T)


def psd_check(gram_matrix: GramMatrix, tol: float = DEFAULT_PSD_TOL) -> PsdCheck:
    """Empirical PSD check: pass iff the minimum eigenvalue does not fall
    below -tol * max(|eigenvalues|, 1)."""
    if tol < 0.0:
        raise ValidationError("tol must be nonnegative")
    eigs = np.linalg.eigvalsh(gram_matrix.values)
    min_eig = float(eigs.min())
    threshold = -tol * max(float(np.max(np.abs(eigs))), 1.0)
    return PsdCheck(passed=min_eig >= threshold, min_eigenvalue=min_eig, threshold=threshold)


def feature_space_radius(gram_matrix: GramMatrix) -> float:
    """Radius q = max_i sqrt(K_ii) of the sample in kernel feature space."""
    diag = np.diag(gram_matrix.values)
    if np.any(diag < 0.0):
        raise ValidationError("Gram matrix has a negative diagonal entry")
    return float(np.sqrt(diag.max()))
