"""Achievability side: Gaussian test channels and the symmetric rate point.

Each encoder quantizes through V_i = S_i + Q_i with common noise variance
lambda_q.  The induced rate region over a size-k subset is a contra-
polymatroid; by symmetry only the subset cardinality matters, so checking
the symmetric rate point needs one constraint per cardinality.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import rdcore
from .spectra import DomainError, SourceModel, dense


@dataclass(frozen=True)
class TestChannel:
    """Per-encoder quantization-noise variance (identical across encoders)."""

    __test__ = False  # keep pytest from collecting this as a test class

    lambda_q: float

    def __post_init__(self):
        if not self.lambda_q > 0:
            raise DomainError(f"lambda_q must be > 0, got {self.lambda_q}")


@dataclass(frozen=True)
class RegionCheck:
    k: int
    rate: float
    # (cardinality, required sum-rate, satisfied) per subset size 1..k
    constraints: tuple[tuple[int, float, bool], ...]

    @property
    def ok(self) -> bool:
        return all(sat for _, _, sat in self.constraints)


def subset_mutual_info(
    model: SourceModel, channel: TestChannel, b: int, k: int
) -> float:
    """I((S_i)_B; (V_i)_B | (V_i)_{A\\B}) for |B| = b inside |A| = k.

    Computed through the conditional covariance of V_B given the remaining
    channel outputs (Schur complement) rather than entropy differences of
    near-singular blocks; given S_B the residual is the pure channel noise.
    """
    if not 1 <= b <= k <= model.ell:
        raise DomainError(f"need 1 <= b <= k <= ell, got b={b}, k={k}")
    lam = channel.lambda_q
    cov_v = dense(model.s, k) + lam * np.eye(k)
    if b == k:
        cond = cov_v
    else:
        rest = cov_v[b:, b:]
        cross = cov_v[:b, b:]
        cond = cov_v[:b, :b] - cross @ np.linalg.solve(rest, cross.T)
    sign, logdet = np.linalg.slogdet(cond)
    assert sign > 0
    return 0.5 * (logdet - b * np.log(lam))


def check_symmetric_rate(model: SourceModel, k: int, d_k: float) -> RegionCheck:
    """Verify that the symmetric rate point lies in the subset rate region.

    Satisfaction allows slack 1e-9 relative to the required sum-rate; the
    full-set constraint is tight by construction.
    """
    lam = rdcore.solve_lambda_q(model, k, d_k)
    rate = rdcore.rate_at_lambda(model, k, lam)
    channel = TestChannel(lam)
    rows = []
    for b in range(1, k + 1):
        required = subset_mutual_info(model, channel, b, k)
        provided = b * rate
        ok = bool(required - provided <= 1e-9 * max(1.0, required))
        rows.append((b, float(required), ok))
    return RegionCheck(k=k, rate=rate, constraints=tuple(rows))


def achievable_point(model: SourceModel, k: int, d_k: float) -> rdcore.RDPoint:
    """Construct the achievable frontier point, asserting region membership."""
    lam = rdcore.solve_lambda_q(model, k, d_k)
    check = check_symmetric_rate(model, k, d_k)
    assert check.ok, "symmetric rate point fell outside the rate region"
    return rdcore.RDPoint(
        k=k,
        d_k=d_k,
        lambda_q=lam,
        rate=check.rate,
        profile=rdcore.distortion_profile(model, k, d_k),
    )
