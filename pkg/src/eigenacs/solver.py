"""Alternating convex search over the eigenvalue and the output weights.

With the hidden layer frozen the loss is biconvex: for fixed mu it is a
linear least-squares problem in the output weights w, and for fixed w it
is a scalar quadratic in mu. Both subproblems have closed-form minimizers,
so each half-step can only lower the loss and the recorded history is
monotonically non-increasing.

A first-order adaptive-moment baseline on the same loss is provided for
runtime comparisons.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from .assembly import LossSystem, design_matrix, eigen_parts, loss_value, relative_residual
from .const import (
    DEFAULT_GD_BETA1,
    DEFAULT_GD_BETA2,
    DEFAULT_GD_LR,
    DEFAULT_GD_STEPS,
    DEFAULT_LOSS_TOL,
    DEFAULT_MAX_ITERS,
    DEFAULT_MU_TOL,
    DEFAULT_SVD_CUTOFF,
    DEFAULT_TIKHONOV,
    DEGENERATE_CURVATURE,
    GD_DIVERGENCE_FACTOR,
    STATUS_CONVERGED,
    STATUS_DEGENERATE,
    STATUS_DIVERGED,
    STATUS_MAX_ITERS,
    SUSPECT_REFERENCE_FRACTION,
)
from .exceptions import ConfigurationError, DegenerateDirectionError, EigenAcsError, NumericalFailureError
from .features import FeatureBasis, evaluate_field
from .problems import physical_eigenvalue

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class ACSConfig:
    """Stopping rule and linear-solver settings of one ACS strand."""

    max_iters: int = DEFAULT_MAX_ITERS
    loss_tol: float = DEFAULT_LOSS_TOL
    tikhonov: float = DEFAULT_TIKHONOV
    svd_cutoff: float = DEFAULT_SVD_CUTOFF
    mu_tol: float = DEFAULT_MU_TOL

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ConfigurationError(f"must be at least 1, got {self.max_iters}", "acs.max_iters")
        for name in ("loss_tol", "tikhonov", "svd_cutoff", "mu_tol"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"must be non-negative, got {getattr(self, name)}", f"acs.{name}")

    def as_dict(self) -> dict[str, Any]:
        return {
            "max_iters": self.max_iters,
            "loss_tol": self.loss_tol,
            "tikhonov": self.tikhonov,
            "svd_cutoff": self.svd_cutoff,
            "mu_tol": self.mu_tol,
        }


@dataclass(frozen=True)
class GDConfig:
    """Adaptive-moment gradient-descent baseline settings."""

    lr: float = DEFAULT_GD_LR
    beta1: float = DEFAULT_GD_BETA1
    beta2: float = DEFAULT_GD_BETA2
    steps: int = DEFAULT_GD_STEPS
    eps: float = 1e-8
    time_budget: float | None = None

    def __post_init__(self) -> None:
        if self.lr < 0:
            raise ConfigurationError(f"must be non-negative, got {self.lr}", "gd.lr")
        if self.steps < 0:
            raise ConfigurationError(f"must be non-negative, got {self.steps}", "gd.steps")
        for name in ("beta1", "beta2"):
            if not 0 <= getattr(self, name) < 1:
                raise ConfigurationError(f"must lie in [0, 1), got {getattr(self, name)}", f"gd.{name}")

    def as_dict(self) -> dict[str, Any]:
        return {
            "lr": self.lr,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "steps": self.steps,
            "eps": self.eps,
            "time_budget": self.time_budget,
        }


def _finite_or_none(value: float | None) -> float | None:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


@dataclass
class EigenpairEstimate:
    """Outcome of one strand: eigenvalue, output weights and loss trace."""

    mu: float
    lambda_phys: float
    weights: NDArray[np.float64]
    loss_history: list[float]
    iterations: int
    status: str
    mu0: float = math.nan
    mu_history: list[float] = field(default_factory=list)
    residual: float = math.nan
    suspect_reference: bool = False
    wall_time: float = 0.0
    elapsed: list[float] = field(default_factory=list)
    basis: FeatureBasis | None = field(default=None, repr=False)
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def final_loss(self) -> float:
        return self.loss_history[-1] if self.loss_history else math.inf

    @property
    def ok(self) -> bool:
        """Neither degenerate nor diverged."""
        return self.status in (STATUS_CONVERGED, STATUS_MAX_ITERS)

    def evaluate(self, points: ArrayLike) -> NDArray[np.float64]:
        """Eigenfunction values at ``points`` (needs the strand's basis)."""
        if self.basis is None:
            raise ConfigurationError("estimate carries no feature basis", "basis")
        return evaluate_field(self.basis, self.weights, points)

    def as_dict(self, include_weights: bool = True) -> dict[str, Any]:
        result: dict[str, Any] = {
            "mu": _finite_or_none(self.mu),
            "lambda_phys": _finite_or_none(self.lambda_phys),
            "status": self.status,
            "iterations": self.iterations,
            "mu0": _finite_or_none(self.mu0),
            "final_loss": _finite_or_none(self.final_loss),
            "residual": _finite_or_none(self.residual),
            "suspect_reference": self.suspect_reference,
            "wall_time": self.wall_time,
            "loss_history": [float(v) for v in self.loss_history],
            "mu_history": [float(v) for v in self.mu_history],
        }
        if self.basis is not None:
            result["basis"] = self.basis.as_dict()
        if include_weights:
            result["weights"] = [float(v) for v in self.weights]
        result.update(self.meta)
        return result


# ---------------------------------------------------------------------------
# Convex subproblems
# ---------------------------------------------------------------------------

def _svd(G: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    try:
        return scipy.linalg.svd(G, full_matrices=False, lapack_driver="gesdd", check_finite=False)
    except np.linalg.LinAlgError:
        # gesdd can fail to converge on nearly rank-deficient input
        return scipy.linalg.svd(G, full_matrices=False, lapack_driver="gesvd", check_finite=False)


def update_weights(sys: LossSystem, mu: float, cfg: ACSConfig | None = None) -> NDArray[np.float64]:
    """argmin_w L(mu, w) for the stacked system G w ~ y.

    gamma > 0 gives the Tikhonov solution (G^T G + gamma I)^-1 G^T y,
    gamma = 0 the minimum-norm pseudoinverse solution with singular values
    below ``svd_cutoff * s_max`` discarded. Both are applied through one SVD
    of G, never through the normal equations.
    """
    if cfg is None:
        cfg = ACSConfig()
    G, y = design_matrix(sys, mu)
    if not np.all(np.isfinite(G)):
        raise NumericalFailureError(f"non-finite design matrix at mu={mu}")

    U, s, Vt = _svd(G)
    beta = U.T @ y
    if cfg.tikhonov > 0:
        filt = s / (s * s + cfg.tikhonov)
    else:
        keep = s > cfg.svd_cutoff * (s[0] if s.size else 0.0)
        filt = np.zeros_like(s)
        filt[keep] = 1.0 / s[keep]
    w = Vt.T @ (filt * beta)
    if not np.all(np.isfinite(w)):
        raise NumericalFailureError(f"non-finite weights at mu={mu}")
    return w


def update_mu(sys: LossSystem, w: ArrayLike) -> float:
    """argmin_mu L(mu, w) = -(c.a) / (c.c).

    Rows without a mu-coefficient contribute zero to c and drop out.
    """
    a, c = eigen_parts(sys, np.asarray(w, dtype=np.float64))
    cc = float(c @ c)
    if cc < DEGENERATE_CURVATURE:
        raise DegenerateDirectionError(f"c.c = {cc:.3e}: eigenfunction lies in the carrier's null space")
    return -float(c @ a) / cc


def loss_gradient(sys: LossSystem, mu: float, w: ArrayLike) -> tuple[float, NDArray[np.float64]]:
    """Exact (dL/dmu, grad_w L) of the composite loss."""
    w = np.asarray(w, dtype=np.float64)
    hw = sys.H @ w
    b1w = sys.B1 @ w
    res = sys.A @ w + mu * hw
    bnd = sys.B0 @ w + mu * b1w
    ref = float(sys.r @ w) - sys.y_ref
    orth = sys.Q @ w
    grad_w = 2.0 * (
        sys.A.T @ res + mu * (sys.H.T @ res)
        + sys.B0.T @ bnd + mu * (sys.B1.T @ bnd)
        + ref * sys.r
        + sys.Q.T @ orth
    )
    grad_mu = 2.0 * (float(hw @ res) + float(b1w @ bnd))
    return grad_mu, grad_w


# ---------------------------------------------------------------------------
# ACS outer loop
# ---------------------------------------------------------------------------

def run_acs(
    sys: LossSystem,
    mu0: float,
    cfg: ACSConfig | None = None,
    logger: logging.Logger | logging.LoggerAdapter | None = None,
) -> EigenpairEstimate:
    """Alternate w- and mu-updates from the initial guess ``mu0``.

    The loss is recorded after each half-step. A numerically computed
    candidate that would raise the loss above its predecessor is rejected
    and the previous iterate kept; the exact minimizer can never do worse.
    The strand has converged once an outer iteration changes the loss by
    at most ``loss_tol`` and mu by at most ``mu_tol``, both relative to
    max(1, previous value).
    """
    if cfg is None:
        cfg = ACSConfig()
    log = logger if logger is not None else _LOGGER
    if not math.isfinite(mu0):
        raise ConfigurationError(f"initial guess must be finite, got {mu0}", "mu0")

    start = time.perf_counter()
    mu = float(mu0)
    w: NDArray[np.float64] | None = None
    history: list[float] = []
    mu_history: list[float] = []
    status = STATUS_MAX_ITERS
    iterations = 0

    for iterations in range(1, cfg.max_iters + 1):
        try:
            candidate = update_weights(sys, mu, cfg)
        except NumericalFailureError as err:
            log.debug("w-update failed: %s", err)
            status = STATUS_DEGENERATE
            break
        candidate_loss = loss_value(sys, mu, candidate)
        if w is not None and candidate_loss > history[-1]:
            loss = history[-1]
        else:
            w, loss = candidate, candidate_loss
        history.append(loss)

        try:
            mu_new = update_mu(sys, w)
        except DegenerateDirectionError as err:
            log.debug("mu-update degenerate: %s", err)
            status = STATUS_DEGENERATE
            break
        if not math.isfinite(mu_new):
            status = STATUS_DEGENERATE
            break
        loss_new = loss_value(sys, mu_new, w)
        if loss_new > loss:
            mu_new, loss_new = mu, loss
        mu_step = abs(mu_new - mu)
        mu_scale = max(1.0, abs(mu))
        mu = mu_new
        history.append(loss_new)
        mu_history.append(mu)
        log.debug("iter %d: mu=%.12g loss=%.6e", iterations, mu, loss_new)

        # a flat loss alone is not enough: mu can still drift on a loss floor
        if len(history) > 2:
            previous = history[-3]
            if abs(loss_new - previous) <= cfg.loss_tol * max(1.0, previous) and mu_step <= cfg.mu_tol * mu_scale:
                status = STATUS_CONVERGED
                break

    weights = w if w is not None else np.zeros(sys.width)
    if mu < 0 and sys.eigen_exponent % 2 == 0:
        status = STATUS_DEGENERATE
    suspect = False
    residual = math.nan
    if w is not None:
        suspect = abs(sys.reference_value(w) - sys.u_ref) > SUSPECT_REFERENCE_FRACTION * abs(sys.u_ref)
        residual = relative_residual(sys, mu, w)

    estimate = EigenpairEstimate(
        mu=mu,
        lambda_phys=physical_eigenvalue(mu, sys.eigen_exponent),
        weights=weights,
        loss_history=history,
        iterations=iterations,
        status=status,
        mu0=float(mu0),
        mu_history=mu_history,
        residual=residual,
        suspect_reference=suspect,
        wall_time=time.perf_counter() - start,
    )
    log.debug(
        "ACS from mu0=%.6g: %s after %d iterations, mu=%.12g, loss=%.3e, residual=%.3e",
        mu0, status, iterations, mu, estimate.final_loss, residual,
    )
    return estimate


# ---------------------------------------------------------------------------
# Gradient-descent baseline
# ---------------------------------------------------------------------------

def gd_baseline(
    sys: LossSystem,
    mu0: float,
    w0: ArrayLike | None = None,
    lr: float = DEFAULT_GD_LR,
    steps: int = DEFAULT_GD_STEPS,
    *,
    beta1: float = DEFAULT_GD_BETA1,
    beta2: float = DEFAULT_GD_BETA2,
    eps: float = 1e-8,
    time_budget: float | None = None,
    logger: logging.Logger | logging.LoggerAdapter | None = None,
) -> EigenpairEstimate:
    """Joint Adam descent on (mu, w) with the exact analytic gradient.

    The loss is recorded before the first step and after every step,
    together with the elapsed wall time, so callers can locate the moment
    a target loss was first reached.
    """
    try:
        import torch
    except ImportError as err:
        raise EigenAcsError("the gradient-descent baseline needs the 'baseline' extra (torch)") from err

    GDConfig(lr=lr, beta1=beta1, beta2=beta2, steps=steps, eps=eps, time_budget=time_budget)
    log = logger if logger is not None else _LOGGER

    w_init = np.zeros(sys.width) if w0 is None else np.array(w0, dtype=np.float64)
    mu_param = torch.tensor([float(mu0)], dtype=torch.float64, requires_grad=True)
    w_param = torch.from_numpy(w_init.copy()).requires_grad_()
    optimizer = torch.optim.Adam([mu_param, w_param], lr=lr, betas=(beta1, beta2), eps=eps)

    start = time.perf_counter()
    mu = float(mu0)
    w = w_init.copy()
    loss0 = loss_value(sys, mu, w)
    history = [loss0]
    elapsed = [0.0]
    status = STATUS_MAX_ITERS
    done = 0

    for done in range(1, steps + 1):
        grad_mu, grad_w = loss_gradient(sys, mu, w)
        optimizer.zero_grad(set_to_none=False)
        mu_param.grad = torch.tensor([grad_mu], dtype=torch.float64)
        w_param.grad = torch.from_numpy(grad_w)
        optimizer.step()

        mu = float(mu_param.item())
        w = w_param.detach().numpy().copy()
        loss = loss_value(sys, mu, w)
        history.append(loss)
        now = time.perf_counter() - start
        elapsed.append(now)
        if not math.isfinite(loss) or loss > GD_DIVERGENCE_FACTOR * loss0:
            status = STATUS_DIVERGED
            log.debug("GD diverged at step %d (loss=%.3e)", done, loss)
            break
        if time_budget is not None and now >= time_budget:
            break

    return EigenpairEstimate(
        mu=mu,
        lambda_phys=physical_eigenvalue(mu, sys.eigen_exponent),
        weights=w,
        loss_history=history,
        iterations=done,
        status=status,
        mu0=float(mu0),
        residual=relative_residual(sys, mu, w),
        wall_time=time.perf_counter() - start,
        elapsed=elapsed,
    )
