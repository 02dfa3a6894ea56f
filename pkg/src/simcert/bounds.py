"""Generalization certificates for distance-regression hypotheses.

The certificate bounds the expected stress loss of every hypothesis in a
norm-constrained class by

    R(h) <= R_hat(h) + 2 * rad_m(G) + M * sqrt(2 ln(1/delta) / m)

with probability at least 1 - delta, where rad_m(G) is the Rademacher
complexity of the loss class and M bounds the per-pair loss
|dhat_ij - D_ij| <= M.  Closed-form upper bounds on rad_m(G):

    linear class  (||W||_2 <= lam, features in radius r, targets <= beta):
        rad_m(G) <= lam^2 * max(2 r, beta)^2 / m,   M = lam * max(2 r, beta)
    kernel class  (RKHS norm <= lam, K(x, x) <= q^2, targets <= beta):
        rad_m(G) <= lam^2 * max(sqrt(2) q, beta)^2 / m

For the kernel class the per-pair bound uses the conservative
M = lam * max(2 q, beta): feature vectors live in a ball of radius q, so
embedded pairs are at most 2 lam q apart without assuming K_ij >= 0.

A Monte-Carlo estimator of the empirical Rademacher complexity is provided
for diagnostics; its inner supremum is approximated by local gradient
ascent, so the estimate is lower-biased and never part of a certificate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DistanceMatrix, SampleMatrix, ValidationError, data_radii, empirical_risk
from .hypotheses import (
    KernelClass,
    KernelMap,
    LinearClass,
    LinearMap,
    embedding_distance_matrix,
    model_norm,
    project_norm_ball,
)
from .kernels import feature_space_radius, gram
from .optimizer import (
    TrainConfig,
    initialize_model,
    parameters,
    replace_parameters,
    weighted_stress_gradient,
    weighted_stress_value,
)

__all__ = [
    "CertificateInputs",
    "BoundCertificate",
    "loss_bound_M",
    "rademacher_bound_linear",
    "rademacher_bound_kernel",
    "mcdiarmid_term",
    "generalization_bound",
    "empirical_rademacher_mc",
    "certify",
]


@dataclass(frozen=True)
class CertificateInputs:
    """Data-dependent quantities a certificate was assembled from."""

    lam: float
    r: float | None
    beta: float
    q: float | None
    mode: str


@dataclass(frozen=True)
class BoundCertificate:
    """Assembled high-probability bound with its inputs recorded.

    rademacher_term stores the doubled complexity bound 2 * rad_m(G) that
    enters the slack; slack = rademacher_term + loss_bound * sqrt(2 ln(1/delta)/m)
    and bound = empirical_risk + slack, exactly as stored.
    """

    empirical_risk: float
    rademacher_term: float
    loss_bound: float
    delta: float
    m: int
    slack: float
    bound: float
    inputs: CertificateInputs | None = None

    def __post_init__(self):
        fields = (
            self.empirical_risk,
            self.rademacher_term,
            self.loss_bound,
            self.delta,
            self.slack,
            self.bound,
        )
        if not all(math.isfinite(v) for v in fields):
            raise ValidationError("certificate fields must be finite")
        if self.slack < 0.0:
            raise ValidationError("slack must be nonnegative")
        if self.bound != self.empirical_risk + self.slack:
            raise ValidationError("bound must equal empirical_risk + slack exactly")

    def to_dict(self) -> dict:
        out = {
            "empirical_risk": self.empirical_risk,
            "rademacher_term": self.rademacher_term,
            "M": self.loss_bound,
            "delta": self.delta,
            "m": self.m,
            "slack": self.slack,
            "bound": self.bound,
        }
        if self.inputs is not None:
            out["lambda"] = self.inputs.lam
            out["r"] = self.inputs.r
            out["beta"] = self.inputs.beta
            out["q"] = self.inputs.q
            out["mode"] = self.inputs.mode
        return out


def _check_radii(lam: float, radius: float, beta: float) -> None:
    if lam < 0.0 or radius < 0.0 or beta < 0.0:
        raise ValidationError("norm budget and radii must be nonnegative")


def _check_delta(delta: float) -> None:
    if not (0.0 < delta <= 1.0):
        raise ValidationError(f"delta must lie in (0, 1], got {delta}")


def loss_bound_M(lam: float, radius: float, beta: float) -> float:
    """Per-pair loss bound lam * max(2 * radius, beta).

    ``radius`` is the feature-space radius: r for the linear class, q for a
    kernel class (where the conservative 2 q factor is used, see module
    docstring).
    """
    _check_radii(lam, radius, beta)
    return lam * max(2.0 * radius, beta)


def rademacher_bound_linear(lam: float, r: float, beta: float, m: int) -> float:
    """Closed-form upper bound lam^2 * max(2 r, beta)^2 / m for the linear class."""
    _check_radii(lam, r, beta)
    if m < 1:
        raise ValidationError("m must be >= 1")
    return lam**2 * max(2.0 * r, beta) ** 2 / m


def rademacher_bound_kernel(lam: float, q: float, beta: float, m: int) -> float:
    """Closed-form upper bound lam^2 * max(sqrt(2) q, beta)^2 / m for kernel classes."""
    _check_radii(lam, q, beta)
    if m < 1:
        raise ValidationError("m must be >= 1")
    return lam**2 * max(math.sqrt(2.0) * q, beta) ** 2 / m


def mcdiarmid_term(loss_bound: float, m: int, delta: float) -> float:
    """High-probability slack M * sqrt(2 ln(1/delta) / m), natural log."""
    if loss_bound < 0.0:
        raise ValidationError("loss bound must be nonnegative")
    if m < 1:
        raise ValidationError("m must be >= 1")
    _check_delta(delta)
    return loss_bound * math.sqrt(2.0 * math.log(1.0 / delta) / m)


def generalization_bound(
    empirical_risk_value: float,
    rademacher_upper: float,
    loss_bound: float,
    m: int,
    delta: float,
    inputs: CertificateInputs | None = None,
) -> BoundCertificate:
    """Assemble R_hat + 2 * rad_upper + M * sqrt(2 ln(1/delta) / m)."""
    if empirical_risk_value < 0.0 or rademacher_upper < 0.0:
        raise ValidationError("risk and complexity terms must be nonnegative")
    rademacher_term = 2.0 * rademacher_upper
    slack = rademacher_term + mcdiarmid_term(loss_bound, m, delta)
    return BoundCertificate(
        empirical_risk=float(empirical_risk_value),
        rademacher_term=float(rademacher_term),
        loss_bound=float(loss_bound),
        delta=float(delta),
        m=int(m),
        slack=float(slack),
        bound=float(empirical_risk_value + slack),
        inputs=inputs,
    )


def empirical_rademacher_mc(
    sample: SampleMatrix,
    distances: DistanceMatrix,
    hypothesis_class: LinearClass | KernelClass,
    n_sigma: int,
    inner_cfg: TrainConfig,
    seed: int,
) -> tuple[float, float]:
    """Monte-Carlo estimate of the empirical Rademacher complexity.

    For each sign draw, sigma_ij in {-1, +1} is sampled for i <= j and
    mirrored (diagonal signs multiply a zero term), then
    (1/m^2) sum_ij sigma_ij (dhat_ij - D_ij)^2 is maximized over the class
    by projected gradient ascent within the inner budget, keeping the best
    visited value.  Returns (mean, standard error) over draws.  Local
    ascent reaches only a lower bound on each supremum, so the estimate is
    a lower-biased diagnostic, not a certified quantity.
    """
    if n_sigma < 1:
        raise ValidationError("n_sigma must be >= 1")
    if distances.size != sample.m:
        raise ValidationError(
            f"size mismatch: {sample.m} sample points vs {distances.size} distance rows"
        )
    m = sample.m
    upper = np.triu_indices(m)
    values = np.empty(n_sigma)
    for draw in range(n_sigma):
        rng = np.random.default_rng([seed, draw])
        signs = rng.integers(0, 2, size=upper[0].size) * 2 - 1
        sigma = np.zeros((m, m))
        sigma[upper] = signs
        sigma = sigma + np.triu(sigma, 1).T

        model = initialize_model(hypothesis_class, sample, rng)
        best = weighted_stress_value(model, sample, distances, sigma)
        for _ in range(inner_cfg.max_iters):
            grad = weighted_stress_gradient(
                model, sample, distances, sigma, inner_cfg.smoothing_eps
            )
            if float(np.linalg.norm(grad)) < inner_cfg.grad_tol:
                break
            stepped = parameters(model) + inner_cfg.step_size * grad
            if not np.all(np.isfinite(stepped)):
                break
            model = project_norm_ball(replace_parameters(model, stepped))
            best = max(best, weighted_stress_value(model, sample, distances, sigma))
        values[draw] = best

    estimate = float(values.mean())
    if n_sigma == 1:
        return estimate, 0.0
    std_error = float(values.std(ddof=1) / math.sqrt(n_sigma))
    return estimate, std_error


def certify(
    model: LinearMap | KernelMap,
    sample: SampleMatrix,
    distances: DistanceMatrix,
    delta: float,
    mode: str | None = None,
) -> BoundCertificate:
    """Certificate for a trained model on its sample.

    The certified budget is lam = max(lambda_cap, model_norm): the class the
    certificate speaks about must contain the model even when penalized
    training left it outside the nominal cap.
    """
    inferred = "linear" if isinstance(model, LinearMap) else "kernel"
    if mode is not None and mode != inferred:
        raise ValidationError(f"mode {mode!r} does not match a {inferred} model")
    _check_delta(delta)

    radii = data_radii(sample, distances)
    lam = max(model.lambda_cap, model_norm(model))
    r_hat = empirical_risk(embedding_distance_matrix(model, sample), distances)
    m = sample.m

    if inferred == "linear":
        q = None
        loss_bound = loss_bound_M(lam, radii.r, radii.beta)
        rad_upper = rademacher_bound_linear(lam, radii.r, radii.beta, m)
    else:
        gram_matrix = model.anchor_gram if sample is model.anchors else gram(model.kernel, sample)
        q = feature_space_radius(gram_matrix)
        loss_bound = loss_bound_M(lam, q, radii.beta)
        rad_upper = rademacher_bound_kernel(lam, q, radii.beta, m)

    inputs = CertificateInputs(lam=lam, r=radii.r, beta=radii.beta, q=q, mode=inferred)
    return generalization_bound(r_hat, rad_upper, loss_bound, m, delta, inputs=inputs)
