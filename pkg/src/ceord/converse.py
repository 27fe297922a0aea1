"""Converse machinery: convex programs, KKT certificates, and matrix bounds.

The lower-bound argument reduces to a three-variable convex program over
(d1, d2, delta): per-mode distortion surrogates for the observations plus a
per-encoder residual.  Two variants exist depending on which observation
eigenvalue is smaller ("P" when the repeated eigenvalue is the bottleneck,
"P-hat" when the leading one is).  The closed-form candidate minimizer and
its multipliers are checked against an independent numerical minimizer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import minimize_scalar

from . import rdcore
from .spectra import DomainError, SourceModel, d_min

CASE_P = "P"
CASE_PHAT = "P-hat"


@dataclass(frozen=True)
class FeasiblePoint:
    d1: float
    d2: float
    delta: float


@dataclass(frozen=True)
class Multipliers:
    a1: float
    a2: float
    b1: float
    b2: float
    c: float

    @property
    def nonnegative(self) -> bool:
        return min(self.a1, self.a2, self.b1, self.b2, self.c) >= 0


@dataclass(frozen=True)
class KKTCertificate:
    case: str
    point: FeasiblePoint
    multipliers: Multipliers
    residuals: dict[str, float]
    objective: float
    valid: bool
    violations: tuple[str, ...]


def select_case(model: SourceModel, j: int) -> str:
    """Pick the program variant from the spectrum ordering at sub-dimension j."""
    return CASE_P if model.s.lambda1(j) >= model.s.lambda2 else CASE_PHAT


def _check_case(model: SourceModel, k: int, j: int, case: str) -> None:
    if not 1 <= k <= j <= model.ell:
        raise DomainError(f"need 1 <= k <= j <= ell, got k={k}, j={j}")
    ls1j, ls2 = model.s.lambda1(j), model.s.lambda2
    if case == CASE_P:
        if not (ls1j >= ls2 > 0):
            raise DomainError(
                f"case P needs lambda_s1(j) >= lambda_s2 > 0, got {ls1j:.6g}, {ls2:.6g}"
            )
    elif case == CASE_PHAT:
        if not (ls2 >= ls1j > 0):
            raise DomainError(
                f"case P-hat needs lambda_s2 >= lambda_s1(j) > 0, got {ls2:.6g}, {ls1j:.6g}"
            )
    else:
        raise DomainError(f"unknown case {case!r}")


def _lw(model: SourceModel, j: int, case: str) -> float:
    """The residual-noise level the program is taken at (limit value)."""
    return model.s.lambda2 if case == CASE_P else model.s.lambda1(j)


def _eta(model: SourceModel, k: int, lw: float, p: FeasiblePoint) -> float:
    ls1, ls2 = model.s.lambda1(k), model.s.lambda2
    arg1 = (ls1 - lw) * p.d1 + ls1 * lw
    arg2 = (ls2 - lw) * p.d2 + ls2 * lw
    if arg1 <= 0 or arg2 <= 0 or p.delta <= 0:
        raise DomainError("nonpositive log argument in objective")
    val = math.log(ls1 * ls1 / arg1) / (2 * k) + 0.5 * math.log(lw / p.delta)
    if k > 1:
        val += (k - 1) / (2 * k) * math.log(ls2 * ls2 / arg2)
    return val


def objective_eta(model: SourceModel, k: int, point: FeasiblePoint) -> float:
    """Objective of program P (residual level at the repeated eigenvalue)."""
    return _eta(model, k, model.s.lambda2, point)


def objective_eta_hat(
    model: SourceModel, k: int, j: int, point: FeasiblePoint
) -> float:
    """Objective of program P-hat (residual level at the leading eigenvalue)."""
    if model.s.lambda1(j) <= 0:
        raise DomainError("P-hat objective needs lambda_s1(j) > 0")
    return _eta(model, k, model.s.lambda1(j), point)


def _harmonic(a: float, b: float) -> float:
    return 1.0 / (1.0 / a + 1.0 / b)


def candidate_minimizer(
    model: SourceModel, k: int, j: int, d_k: float, case: str
) -> FeasiblePoint:
    """The closed-form candidate: harmonic means of eigenvalues with lambda_q."""
    _check_case(model, k, j, case)
    lam = rdcore.solve_lambda_q(model, k, d_k)
    d1 = _harmonic(model.s.lambda1(k), lam)
    d2 = _harmonic(model.s.lambda2, lam)
    delta = d2 if case == CASE_P else _harmonic(model.s.lambda1(j), lam)
    return FeasiblePoint(d1=d1, d2=d2, delta=delta)


def _distortion_lhs(model: SourceModel, k: int, d1: float, d2: float) -> float:
    """Left side of the coupled distortion constraint (compared to k*d_k)."""
    lx1, ls1 = model.x.lambda1(k), model.s.lambda1(k)
    lx2, ls2 = model.x.lambda2, model.s.lambda2
    t1 = lx1**2 / ls1**2 * d1 + lx1 - lx1**2 / ls1
    t2 = lx2**2 / ls2**2 * d2 + lx2 - lx2**2 / ls2 if ls2 > 0 else 0.0
    return t1 + (k - 1) * t2


def kkt_multipliers(
    model: SourceModel, k: int, j: int, d_k: float, case: str
) -> Multipliers:
    """Closed-form multipliers at the candidate point.

    The box multipliers vanish (the candidate is strictly inside the box);
    negative b-values are returned as-is and signal that the matching
    condition fails rather than raising.
    """
    p = candidate_minimizer(model, k, j, d_k, case)
    lx1, ls1 = model.x.lambda1(k), model.s.lambda1(k)
    lx2, ls2 = model.x.lambda2, model.s.lambda2
    a1_coef = lx1**2 / ls1**2
    a2_coef = lx2**2 / ls2**2
    c = (p.d1 + (k - 1) * p.d2) / (
        a1_coef * p.d1**2 + (k - 1) * a2_coef * p.d2**2
    ) / (2 * k)
    if case == CASE_P:
        b1 = (p.d2 - p.d1 + 2 * k * c * a1_coef * p.d1**2) / (2 * k * p.d2**2)
        b2 = (k - 1) * c * a2_coef
    else:
        b1 = (p.delta - p.d1 + 2 * k * c * a1_coef * p.d1**2) / (2 * k * p.delta**2)
        b2 = (
            (k - 1) * (p.delta - p.d2) + 2 * k * (k - 1) * c * a2_coef * p.d2**2
        ) / (2 * k * p.delta**2)
    return Multipliers(a1=0.0, a2=0.0, b1=b1, b2=b2, c=c)


def _delta_cap(d: float, lw: float, ls: float) -> float:
    """Upper bound on delta from the estimator-composition constraint."""
    inv = 1.0 / d + 1.0 / lw - 1.0 / ls
    if inv <= 0:
        return math.inf
    return 1.0 / inv


def verify_kkt(
    model: SourceModel,
    k: int,
    j: int,
    d_k: float,
    case: str,
    tol: float = 1e-9,
) -> KKTCertificate:
    """Assemble and check the full KKT system at the candidate point.

    Evaluates the three stationarity equations, the five complementary-
    slackness products, and primal feasibility; the certificate is valid iff
    every residual is within tol and all multipliers are nonnegative.
    """
    p = candidate_minimizer(model, k, j, d_k, case)
    m = kkt_multipliers(model, k, j, d_k, case)
    lx1, ls1 = model.x.lambda1(k), model.s.lambda1(k)
    lx2, ls2 = model.x.lambda2, model.s.lambda2
    ls1j = model.s.lambda1(j)
    lw = _lw(model, j, case)
    a1_coef = lx1**2 / ls1**2
    a2_coef = lx2**2 / ls2**2

    cap1 = _delta_cap(p.d1, lw, ls1)
    cap2 = p.d2 if case == CASE_P else _delta_cap(p.d2, lw, ls2)

    # Stationarity in d1: shared shape across both cases, lw differing.
    stat_d1 = (
        (lw - ls1) / (2 * k * ((ls1 - lw) * p.d1 + ls1 * lw))
        + m.a1
        - m.b1 * (1.0 + p.d1 / lw - p.d1 / ls1) ** -2
        + m.c * a1_coef
    )
    if case == CASE_P:
        stat_d2 = m.a2 - m.b2 + m.c * (k - 1) * a2_coef
    else:
        stat_d2 = (
            (k - 1) * (lw - ls2) / (2 * k * ((ls2 - lw) * p.d2 + ls2 * lw))
            + m.a2
            - m.b2 * (1.0 + p.d2 / lw - p.d2 / ls2) ** -2
            + m.c * (k - 1) * a2_coef
        )
    stat_delta = -1.0 / (2 * p.delta) + m.b1 + m.b2

    residuals = {
        "stationarity_d1": stat_d1,
        "stationarity_d2": stat_d2,
        "stationarity_delta": stat_delta,
        "slack_d1_box": m.a1 * (p.d1 - ls1),
        "slack_d2_box": m.a2 * (p.d2 - ls2),
        "slack_delta_cap1": m.b1 * (p.delta - cap1),
        "slack_delta_cap2": m.b2 * (p.delta - cap2),
        "slack_distortion": m.c * (_distortion_lhs(model, k, p.d1, p.d2) - k * d_k),
        "primal_d1": max(0.0, p.d1 - ls1, -p.d1),
        "primal_d2": max(0.0, p.d2 - ls2, -p.d2),
        "primal_delta_cap1": max(0.0, p.delta - cap1),
        "primal_delta_cap2": max(0.0, p.delta - cap2),
        "primal_distortion": max(0.0, _distortion_lhs(model, k, p.d1, p.d2) - k * d_k),
    }
    violations = [name for name, r in residuals.items() if abs(r) > tol]
    if not m.nonnegative:
        violations.append("negative_multiplier")
    objective = _eta(model, k, lw, p)
    return KKTCertificate(
        case=case,
        point=p,
        multipliers=m,
        residuals=residuals,
        objective=objective,
        valid=not violations,
        violations=tuple(violations),
    )


def solve_numeric(
    model: SourceModel, k: int, j: int, d_k: float, case: str
) -> tuple[FeasiblePoint, float]:
    """Independent numerical minimizer for the convex programs.

    The objective never benefits from slack in d2 or delta, so the problem
    collapses to one dimension: for each d1, push d2 to the distortion
    budget and delta to its caps.  The reduced function is scanned on a
    grid and polished with a bounded scalar minimizer.
    """
    _check_case(model, k, j, case)
    rdcore._check_dk(model, k, d_k)
    lx1, ls1 = model.x.lambda1(k), model.s.lambda1(k)
    lx2, ls2 = model.x.lambda2, model.s.lambda2
    lw = _lw(model, j, case)
    a1_coef = lx1**2 / ls1**2
    a2_coef = (k - 1) * lx2**2 / ls2**2
    budget = k * d_k - _distortion_lhs(model, k, 0.0, 0.0)
    assert budget > 0  # d_k > d_min guarantees room

    def expand(d1: float) -> Optional[FeasiblePoint]:
        if d1 <= 0 or d1 > ls1 or a1_coef * d1 > budget:
            return None
        if a2_coef > 0:
            d2 = min(ls2, (budget - a1_coef * d1) / a2_coef)
        else:
            d2 = ls2
        if d2 <= 0:
            return None
        cap2 = d2 if case == CASE_P else _delta_cap(d2, lw, ls2)
        delta = min(_delta_cap(d1, lw, ls1), cap2)
        return FeasiblePoint(d1=d1, d2=d2, delta=delta)

    def reduced(d1: float) -> float:
        p = expand(d1)
        if p is None or p.delta <= 0:
            return math.inf
        return _eta(model, k, lw, p)

    hi = ls1 if a1_coef == 0 else min(ls1, budget / a1_coef)
    grid = np.linspace(hi * 1e-9, hi * (1.0 - 1e-12), 257)
    vals = [reduced(t) for t in grid]
    best = int(np.argmin(vals))
    lo_b = grid[max(0, best - 1)]
    hi_b = grid[min(len(grid) - 1, best + 1)]
    res = minimize_scalar(
        reduced,
        bounds=(lo_b, hi_b),
        method="bounded",
        options={"xatol": 1e-13 * hi, "maxiter": 500},
    )
    d1_best, f_best = res.x, res.fun
    # endpoints of the bracket can beat a flat interior estimate
    for t in (lo_b, hi_b, hi):
        ft = reduced(t)
        if ft < f_best:
            d1_best, f_best = t, ft
    return expand(d1_best), f_best


def dj_lower_bound(
    model: SourceModel, k: int, j: int, delta: float, case: str
) -> float:
    """Distortion lower bound at sub-dimension j, as a function of delta."""
    _check_case(model, k, j, case)
    if delta <= 0:
        raise DomainError(f"delta must be > 0, got {delta}")
    lx1, lz1, ls1 = model.x.lambda1(j), model.z.lambda1(j), model.s.lambda1(j)
    lx2, ls2 = model.x.lambda2, model.s.lambda2
    if case == CASE_P:
        inv = 1.0 / delta + 1.0 / ls1 - 1.0 / ls2
        if inv <= 0:
            raise DomainError("nonpositive inner inverse in lower bound")
        t1 = lx1**2 / ls1**2 / inv + lx1 - lx1**2 / ls1
        t2 = lx2**2 / ls2**2 * delta + lx2 - lx2**2 / ls2
    else:
        inv = 1.0 / delta + 1.0 / ls2 - 1.0 / ls1
        if inv <= 0:
            raise DomainError("nonpositive inner inverse in lower bound")
        t1 = lx1**2 / ls1**2 * delta + lx1 - lx1**2 / ls1
        t2 = lx2**2 / ls2**2 / inv + lx2 - lx2**2 / ls2
    return t1 / j + (j - 1) * t2 / j


def sigma_identity(
    gamma_u: np.ndarray, gamma_s: np.ndarray, d: np.ndarray
) -> np.ndarray:
    """Reconstruction-error covariance of the fictitious signal.

    Maps the observation-error covariance D through the linear relation
    between the fictitious-signal estimate and the observation estimate.
    """
    try:
        np.linalg.cholesky(gamma_s)
    except np.linalg.LinAlgError as e:
        raise DomainError("observation covariance must be positive definite") from e
    m = np.linalg.solve(gamma_s, gamma_u)  # Gamma_S^{-1} Gamma_U
    return m.T @ d @ m + gamma_u - gamma_u @ m


def delta_bound(
    d: np.ndarray, lambda_w: float, gamma_s: np.ndarray
) -> np.ndarray:
    """Upper bound on the residual covariance given the fictitious signal.

    (D^{-1} + Lambda_W^{-1} - Gamma_S^{-1})^{-1}; the inner sum must be
    positive definite, which bounds how large lambda_w may be.
    """
    if lambda_w <= 0:
        raise DomainError(f"lambda_w must be > 0, got {lambda_w}")
    n = d.shape[0]
    inner = np.linalg.inv(d) + np.eye(n) / lambda_w - np.linalg.inv(gamma_s)
    try:
        np.linalg.cholesky(inner)
    except np.linalg.LinAlgError as e:
        raise DomainError("indefinite inner matrix in residual bound") from e
    return np.linalg.inv(inner)
