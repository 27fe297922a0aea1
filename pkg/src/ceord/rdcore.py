"""Frontier quantities for the symmetric remote-source compression problem.

Everything reduces to one scalar test-channel noise variance lambda_q: the
per-encoder rate, the distortion profile over growing decoder subsets, the
mu/nu spectral ratios, and the polynomial matching conditions that decide
when the achievable rate is provably optimal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .spectra import DomainError, SourceModel, d_min

# Inputs closer than this to an interval endpoint are rejected, not clamped:
# lambda_q diverges at one end and vanishes at the other.
ENDPOINT_SLACK = 1e-12

_BISECT_STEPS = 200


@dataclass(frozen=True)
class RDPoint:
    """One point on the rate-distortion frontier for cooperation level k."""

    k: int
    d_k: float
    lambda_q: float
    rate: float
    profile: tuple[float, ...]  # d_j for j = k..ell


@dataclass(frozen=True)
class RegimeReport:
    branch: str  # "mu" (rho_s >= 0) or "nu" (rho_s <= 0)
    regime: str  # always | near-dmin | both-ends | degenerate-x
    roots: Optional[tuple[float, float]]


@dataclass(frozen=True)
class ConditionReport:
    mu: Optional[float]
    nu: Optional[float]
    nu_kj: tuple[Optional[float], ...]  # for j = k..ell
    cond1: Optional[bool]
    cond2: Optional[bool]
    cond3: tuple[Optional[bool], ...]
    cond4: tuple[Optional[bool], ...]
    roots: Optional[tuple[float, float]]
    regime: str


def _check_dk(model: SourceModel, k: int, d_k: float) -> float:
    if not 1 <= k <= model.ell:
        raise DomainError(f"k={k} out of range [1, {model.ell}]")
    lo = d_min(model, k)
    hi = model.x.gamma
    if d_k <= lo + ENDPOINT_SLACK:
        raise DomainError(f"d_k={d_k:.12g} must exceed d_min^({k})={lo:.12g}")
    if d_k >= hi - ENDPOINT_SLACK:
        raise DomainError(f"d_k={d_k:.12g} must be below gamma_x={hi:.12g}")
    return lo


def distortion_at_lambda(model: SourceModel, k: int, j: int, lam: float) -> float:
    """d_j as a function of the test-channel noise variance (strictly increasing)."""
    lx1, lz1, ls1 = model.x.lambda1(j), model.z.lambda1(j), model.s.lambda1(j)
    lx2, lz2, ls2 = model.x.lambda2, model.z.lambda2, model.s.lambda2
    t1 = lx1 * (lz1 + lam) / (ls1 + lam) if lx1 > 0 else 0.0
    t2 = lx2 * (lz2 + lam) / (ls2 + lam) if lx2 > 0 else 0.0
    return t1 / j + (j - 1) * t2 / j


def solve_lambda_q(model: SourceModel, k: int, d_k: float) -> float:
    """Unique positive lambda_q with distortion_at_lambda(k, k, .) = d_k.

    Bracketed bisection: the map is monotone and smooth, so doubling the
    upper end until it crosses d_k and bisecting is unconditionally safe.
    """
    _check_dk(model, k, d_k)
    hi = 1.0
    while distortion_at_lambda(model, k, k, hi) < d_k:
        hi *= 2.0
        if hi > 1e300:  # pragma: no cover - d_k < gamma_x rules this out
            raise DomainError("bracket expansion failed")
    lo = 0.0
    for _ in range(_BISECT_STEPS):
        mid = 0.5 * (lo + hi)
        if distortion_at_lambda(model, k, k, mid) < d_k:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-14 * hi:
            break
    return 0.5 * (lo + hi)


def rate_at_lambda(model: SourceModel, k: int, lam: float) -> float:
    """Per-encoder rate in nats for a given test-channel noise variance."""
    ls1, ls2 = model.s.lambda1(k), model.s.lambda2
    return (math.log(ls1 + lam) + (k - 1) * math.log(ls2 + lam) - k * math.log(lam)) / (
        2 * k
    )


def rate_bar(model: SourceModel, k: int, d_k: float) -> float:
    """Symmetric per-encoder rate achieving distortion d_k at level k (nats)."""
    return rate_at_lambda(model, k, solve_lambda_q(model, k, d_k))


def distortion_profile(model: SourceModel, k: int, d_k: float) -> tuple[float, ...]:
    """Distortions d_j, j = k..ell, induced by the level-k test channel."""
    lam = solve_lambda_q(model, k, d_k)
    return tuple(
        distortion_at_lambda(model, k, j, lam) for j in range(k, model.ell + 1)
    )


def _shrink(lam_s: float, lam_q: float) -> float:
    """lam_s - lam_s^2/(lam_s + lam_q), in cancellation-free harmonic form."""
    return lam_s * lam_q / (lam_s + lam_q)


def mu_nu(
    model: SourceModel, k: int, d_k: float, cross_check: bool = False
) -> tuple[float, float, tuple[Optional[float], ...]]:
    """The spectral shrinkage ratios (mu, nu, nu_kj for j = k..ell).

    mu compares the repeated-mode MMSE shrinkage against the leading-mode
    one; nu is its reciprocal; nu_kj generalizes nu to sub-dimension j.
    """
    lam = solve_lambda_q(model, k, d_k)
    ls1, ls2 = model.s.lambda1(k), model.s.lambda2
    if ls1 <= 0:
        raise DomainError("mu undefined: leading observation eigenvalue is 0")
    if ls2 <= 0:
        raise DomainError("nu undefined: repeated observation eigenvalue is 0")
    mu = _shrink(ls2, lam) / _shrink(ls1, lam)
    nu = _shrink(ls1, lam) / _shrink(ls2, lam)
    if cross_check:
        # Verbatim Schur-complement form; agreement guards the simplification.
        mu_raw = (ls2 - ls2 * ls2 / (ls2 + lam)) / (ls1 - ls1 * ls1 / (ls1 + lam))
        assert abs(mu - mu_raw) <= 1e-12 * max(1.0, abs(mu))
    nu_kj = []
    for j in range(k, model.ell + 1):
        ls1j = model.s.lambda1(j)
        nu_kj.append(_shrink(ls1j, lam) / _shrink(ls2, lam) if ls1j > 0 else 0.0)
    return mu, nu, tuple(nu_kj)


def _cond1_value(model: SourceModel, k: int, mu: float) -> float:
    lx1, lx2 = model.x.lambda1(k), model.x.lambda2
    ls1, ls2 = model.s.lambda1(k), model.s.lambda2
    return (k - 1) * lx2**2 * ls1**2 * mu * (mu - 1.0) + k * lx1**2 * ls2**2


def _cond2_value(model: SourceModel, k: int, nu: float) -> float:
    lx1, lx2 = model.x.lambda1(k), model.x.lambda2
    ls1, ls2 = model.s.lambda1(k), model.s.lambda2
    return lx1**2 * ls2**2 * nu * (nu - 1.0) + k * lx2**2 * ls1**2


def _cond3_value(model: SourceModel, k: int, nu: float, nu_kj: float) -> float:
    lx1, lx2 = model.x.lambda1(k), model.x.lambda2
    ls1, ls2 = model.s.lambda1(k), model.s.lambda2
    return (nu_kj + (k - 1)) * lx1**2 * ls2**2 * nu**2 + (k - 1) * (
        nu_kj - nu
    ) * lx2**2 * ls1**2


def _cond4_value(model: SourceModel, k: int, nu: float, nu_kj: float) -> float:
    lx1, lx2 = model.x.lambda1(k), model.x.lambda2
    ls1, ls2 = model.s.lambda1(k), model.s.lambda2
    return (nu_kj - 1.0) * lx1**2 * ls2**2 * nu**2 + (
        (k - 1) * nu_kj + nu
    ) * lx2**2 * ls1**2


def classify_regime(model: SourceModel, k: int) -> RegimeReport:
    """Case split on where the matching condition can hold over the d-range.

    For rho_s >= 0 the condition is a quadratic in mu; if its discriminant is
    nonpositive it holds for every distortion ("always").  Otherwise the two
    roots in [0, 1] are compared against the limiting value of mu at maximal
    distortion.  Mirrored in nu for rho_s <= 0.
    """
    if not 1 <= k <= model.ell:
        raise DomainError(f"k={k} out of range [1, {model.ell}]")
    ls1, ls2 = model.s.lambda1(k), model.s.lambda2
    lx1, lx2 = model.x.lambda1(k), model.x.lambda2
    if model.s.rho >= 0:
        branch = "mu"
        if ls2 <= 0 or ls1 == ls2:
            # ratio pinned at 0 or 1; condition holds over the full range
            return RegimeReport(branch, "always", None)
        lhs = (k - 1) * lx2**2 * ls1**2
        rhs = 4 * k * lx1**2 * ls2**2
        if lhs <= rhs:
            return RegimeReport(branch, "always", None)
        disc = math.sqrt(1.0 - rhs / lhs)
        r1, r2 = 0.5 - 0.5 * disc, 0.5 + 0.5 * disc
        ratio = ls2 / ls1
    else:
        branch = "nu"
        if ls1 <= 0 or ls1 == ls2:
            return RegimeReport(branch, "always", None)
        lhs = lx1**2 * ls2**2
        rhs = 4 * k * lx2**2 * ls1**2
        if lhs <= rhs:
            return RegimeReport(branch, "always", None)
        disc = math.sqrt(1.0 - rhs / lhs)
        r1, r2 = 0.5 - 0.5 * disc, 0.5 + 0.5 * disc
        ratio = ls1 / ls2
    if rhs == 0.0:
        # roots degenerate to (0, 1): vanishing leading signal eigenvalue
        return RegimeReport(branch, "degenerate-x", (r1, r2))
    if r2 <= ratio:
        return RegimeReport(branch, "always", (r1, r2))
    if r1 <= ratio:
        return RegimeReport(branch, "near-dmin", (r1, r2))
    return RegimeReport(branch, "both-ends", (r1, r2))


def check_conditions(model: SourceModel, k: int, d_k: float) -> ConditionReport:
    """Evaluate the matching-condition polynomials at (k, d_k).

    Branches whose sign hypothesis on rho_s does not apply are reported as
    None rather than False; exact zeros count as satisfied.
    """
    mu, nu, nu_kj = mu_nu(model, k, d_k)
    rho_s = model.s.rho
    cond1 = _cond1_value(model, k, mu) >= 0 if rho_s >= 0 else None
    if rho_s <= 0:
        cond2 = _cond2_value(model, k, nu) >= 0
        cond3 = tuple(
            _cond3_value(model, k, nu, v) >= 0 if v is not None else None
            for v in nu_kj
        )
        cond4 = tuple(
            _cond4_value(model, k, nu, v) >= 0 if v is not None else None
            for v in nu_kj
        )
    else:
        cond2 = None
        cond3 = tuple(None for _ in nu_kj)
        cond4 = tuple(None for _ in nu_kj)
    reg = classify_regime(model, k)
    return ConditionReport(
        mu=mu,
        nu=nu,
        nu_kj=nu_kj,
        cond1=cond1,
        cond2=cond2,
        cond3=cond3,
        cond4=cond4,
        roots=reg.roots,
        regime=reg.regime,
    )


def degenerate_rate_s2zero(
    model: SourceModel, k: int, j: int, d_k: float
) -> tuple[float, float]:
    """Closed forms at the fully correlated boundary (repeated eigenvalue 0)."""
    if model.s.lambda2 > ENDPOINT_SLACK:
        raise DomainError("requires the repeated observation eigenvalue to be 0")
    if not k <= j <= model.ell:
        raise DomainError(f"j={j} out of range [{k}, {model.ell}]")
    gx, gz, gs = model.x.gamma, model.z.gamma, model.s.gamma
    arg = gs * d_k - gx * gz
    if arg <= 0:
        raise DomainError(f"d_k={d_k:.12g} at or below the distortion floor")
    rate = math.log(gx * gx / arg) / (2 * k)
    num = (j - k) * gx * gx * gz + (k * gs - j * gz) * gx * d_k
    den = (j * gs - k * gz) * gx - (j - k) * gs * d_k
    return rate, num / den


def degenerate_rate_s1zero(model: SourceModel, d_ell: float) -> float:
    """Closed form at the fully anti-correlated boundary (leading eigenvalue 0).

    Coincides with the (per-encoder normalized) rate-distortion function of
    the centralized remote source coding problem.
    """
    ell = model.ell
    if model.s.lambda1(ell) > ENDPOINT_SLACK:
        raise DomainError("requires the leading observation eigenvalue to be 0")
    lx2, lz2, ls2 = model.x.lambda2, model.z.lambda2, model.s.lambda2
    arg = ell * ls2 * d_ell - (ell - 1) * lx2 * lz2
    if arg <= 0:
        raise DomainError(f"d_ell={d_ell:.12g} at or below the distortion floor")
    return (ell - 1) / (2 * ell) * math.log((ell - 1) * lx2**2 / arg)
