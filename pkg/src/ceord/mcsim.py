"""Monte Carlo validation of the closed forms.

Sampling is chunked with a fixed chunk size and one counter-based stream
per (seed, chunk index), so the output for a given (seed, n) is identical
no matter how many chunks are evaluated in parallel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectra import DomainError, SourceModel, SymmetricSpec, basis, dense, eigenvalues

CHUNK = 1 << 16


@dataclass(frozen=True)
class SampleBatch:
    n: int
    seed: int
    x: np.ndarray  # n x ell
    z: np.ndarray
    s: np.ndarray


@dataclass(frozen=True)
class EmpiricalRD:
    lambda_q: float
    j: int
    n: int
    distortion: float
    stderr: float


@dataclass(frozen=True)
class DecompositionReport:
    lambda_w: float
    lambda_q: float
    n: int
    # worst |empirical - predicted| / stderr over entries, per check
    sigma_max_sigmas: float
    delta_offdiag_max_sigmas: float
    sigma_ok: bool
    delta_diag_ok: bool


def _chunk_normals(seed: int, idx: int, m: int, cols: int) -> np.ndarray:
    rng = np.random.Generator(
        np.random.Philox(np.random.SeedSequence(entropy=[int(seed), int(idx)]))
    )
    return rng.standard_normal((m, cols))


def _draw(n: int, seed: int, cols: int) -> np.ndarray:
    """n x cols standard normals, deterministic per (seed, n) and chunking-safe."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    parts = []
    for idx, start in enumerate(range(0, n, CHUNK)):
        m = min(CHUNK, n - start)
        parts.append(_chunk_normals(seed, idx, m, cols))
    return np.concatenate(parts, axis=0)


def _factor(spec: SymmetricSpec, j: int) -> np.ndarray:
    """Matrix F with F F^T equal to the dense covariance (spectral square root)."""
    ev = eigenvalues(spec, j)
    lams = np.full(j, max(ev.lambda2, 0.0))
    lams[0] = max(ev.lambda1, 0.0)
    return basis(j) * np.sqrt(lams)


def _cov_with_se(e: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Entrywise second-moment matrix of rows of e with per-entry standard errors.

    Computed pairwise to avoid materializing the n x j x j outer products.
    """
    n, j = e.shape
    mean = np.empty((j, j))
    se = np.empty((j, j))
    for a in range(j):
        for b in range(a, j):
            p = e[:, a] * e[:, b]
            mean[a, b] = mean[b, a] = p.mean()
            se[a, b] = se[b, a] = p.std(ddof=1) / np.sqrt(n)
    return mean, se


def sample(model: SourceModel, n: int, seed: int) -> SampleBatch:
    """Draw n i.i.d. realizations of (X, Z, S = X + Z)."""
    ell = model.ell
    g = _draw(n, seed, 3 * ell)
    x = g[:, :ell] @ _factor(model.x, ell).T
    z = g[:, ell : 2 * ell] @ _factor(model.z, ell).T
    return SampleBatch(n=n, seed=seed, x=x, z=z, s=x + z)


def empirical_distortion(
    model: SourceModel, k: int, lambda_q: float, j: int, n: int, seed: int
) -> EmpiricalRD:
    """Measured MMSE distortion under the test channel at sub-dimension j.

    Reconstruction uses the exact conditional mean given the j noisy channel
    outputs; the estimate averages the per-sample squared error across the j
    components, with its standard error.
    """
    if not k <= j <= model.ell:
        raise DomainError(f"j={j} out of range [{k}, {model.ell}]")
    batch = sample(model, n, seed)
    q = _draw(n, seed, 3 * model.ell)[:, 2 * model.ell : 2 * model.ell + j]
    v = batch.s[:, :j] + np.sqrt(lambda_q) * q
    gx = dense(model.x, j)
    gs = dense(model.s, j) + lambda_q * np.eye(j)
    xhat = v @ np.linalg.solve(gs, gx)  # (Gamma_S + lq I)^{-1} Gamma_X, symmetric
    err = batch.x[:, :j] - xhat
    per_sample = np.mean(err**2, axis=1)
    d = float(np.mean(per_sample))
    se = float(np.std(per_sample, ddof=1) / np.sqrt(n))
    return EmpiricalRD(lambda_q=lambda_q, j=j, n=n, distortion=d, stderr=se)


def decomposition_check(
    model: SourceModel,
    j: int,
    lambda_w: float,
    lambda_q: float,
    n: int,
    seed: int,
) -> DecompositionReport:
    """Empirically verify the fictitious signal-noise decomposition S = U + W.

    Checks (a) that the error covariance of the derived U-estimate matches
    its closed-form image of the S-estimation error covariance, entrywise
    within 5 standard errors, and (b) that the residual covariance of S
    given (U, decoder output) is diagonal, off-diagonals within 5 SE of 0.
    """
    bound = min(model.s.lambda1(j), model.s.lambda2)
    if not 0 < lambda_w < bound:
        raise DomainError(
            f"lambda_w={lambda_w:.6g} must lie in (0, {bound:.6g}) for j={j}"
        )
    gs = dense(model.s, j)
    gu = gs - lambda_w * np.eye(j)
    # spectral square root of Gamma_U (symmetric family shifted by -lambda_w)
    ev = eigenvalues(model.s, j)
    lams = np.full(j, ev.lambda2 - lambda_w)
    lams[0] = ev.lambda1 - lambda_w
    fu = basis(j) * np.sqrt(lams)

    g = _draw(n, seed, 3 * model.ell)
    u = g[:, :j] @ fu.T
    w = np.sqrt(lambda_w) * g[:, model.ell : model.ell + j]
    s = u + w
    v = s + np.sqrt(lambda_q) * g[:, 2 * model.ell : 2 * model.ell + j]

    gsq = gs + lambda_q * np.eye(j)
    shat = v @ np.linalg.solve(gsq, gs)
    d_analytic = gs - gs @ np.linalg.solve(gsq, gs)

    # (a) error covariance of the induced U-estimate vs its closed-form image
    uhat = shat @ np.linalg.solve(gs, gu)
    eu = u - uhat
    sigma_pred = (
        np.linalg.solve(gs, gu).T @ d_analytic @ np.linalg.solve(gs, gu)
        + gu
        - gu @ np.linalg.solve(gs, gu)
    )
    sigma_emp, sigma_se = _cov_with_se(eu)
    sigma_dev = np.abs(sigma_emp - sigma_pred) / sigma_se
    sigma_max = float(sigma_dev.max())

    # (b) residual of S given (U, decoder output) has diagonal covariance
    stilde = u + lambda_w / (lambda_w + lambda_q) * (v - u)
    es = s - stilde
    delta_emp, delta_se = _cov_with_se(es)
    off = ~np.eye(j, dtype=bool)
    delta_dev = np.abs(delta_emp[off]) / delta_se[off]
    delta_max = float(delta_dev.max())

    return DecompositionReport(
        lambda_w=lambda_w,
        lambda_q=lambda_q,
        n=n,
        sigma_max_sigmas=sigma_max,
        delta_offdiag_max_sigmas=delta_max,
        sigma_ok=sigma_max <= 5.0,
        delta_diag_ok=delta_max <= 5.0,
    )
