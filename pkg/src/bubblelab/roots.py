"""Simultaneous polynomial root finding.

All roots are computed at once by Aberth-Ehrlich iteration from coefficient
data; deflation is never performed.  Multiple roots come out as tight
clusters, and every returned root set is verified against a backward-error
bound, so callers can trust multiplicities at the working precision.
"""

from __future__ import annotations

import numpy as np

from .errors import RootFindingError

__all__ = ["all_roots", "roots_sorted"]

_GOLDEN = 0.6180339887498949


def _trim(coeffs):
    c = np.asarray(coeffs, dtype=complex).ravel()
    nz = np.nonzero(c != 0)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1]


def _horner_pair(coeffs, z):
    """Evaluate p(z) and p'(z) at the points z (coeffs lowest degree first)."""
    p = np.zeros_like(z)
    dp = np.zeros_like(z)
    for c in coeffs[::-1]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _scale_bound(coeffs, z):
    """sum_k |c_k| |z|^k, the natural backward-error scale at z."""
    s = np.zeros(z.shape, dtype=float)
    az = np.abs(z)
    for c in np.abs(coeffs[::-1]):
        s = s * az + c
    return s


def all_roots(coeffs, tol=1e-13, max_iter=120, restarts=4):
    """Return every root of the polynomial with the given coefficients.

    Parameters
    ----------
    coeffs : array_like of complex, lowest degree first.
    tol : float
        Backward-error target: each root z must satisfy
        |p(z)| <= tol * sum_k |c_k||z|^k (plus a machine floor).
    max_iter, restarts : int
        Iteration budget per start and number of deterministic restarts.

    Returns
    -------
    ndarray of complex, length equal to the degree (exact trailing-zero
    coefficients are trimmed first).  Roots are unordered.

    Raises
    ------
    RootFindingError
        If no restart achieves the residual target; the exception carries
        the per-root residuals of the best attempt.
    """
    c = _trim(coeffs)
    if not np.all(np.isfinite(c)):
        raise ValueError("non-finite polynomial coefficients")
    deg = len(c) - 1
    if deg <= 0:
        return np.zeros(0, dtype=complex)
    if deg == 1:
        return np.array([-c[0] / c[1]])

    c = c / np.max(np.abs(c))
    radius = 1.0 + np.max(np.abs(c[:-1]) / np.abs(c[-1]))

    best = None
    best_res = np.inf
    for attempt in range(restarts):
        z = _initial_guess(deg, radius, attempt)
        z, converged = _aberth(c, z, tol, max_iter)
        residual = np.abs(_horner_pair(c, z)[0])
        bound = tol * (_scale_bound(c, z) + 1e-300) + 1e3 * np.finfo(float).tiny
        worst = np.max(residual / (_scale_bound(c, z) + 1e-300))
        if np.all(residual <= np.maximum(bound, 64 * np.finfo(float).eps)):
            return z
        if worst < best_res:
            best_res, best = worst, (z, residual)
    z, residual = best
    raise RootFindingError(
        f"Aberth iteration missed residual target {tol:g} "
        f"(worst relative residual {best_res:.3e})",
        residuals=residual,
    )


def _initial_guess(deg, radius, attempt):
    k = np.arange(deg)
    theta = 2 * np.pi * (k + 0.25 + 0.13 * attempt) / deg + 0.5 / deg
    frac = np.mod((k + 1 + attempt) * _GOLDEN, 1.0)
    r = radius * (0.55 + 0.5 * frac)
    return r * np.exp(1j * theta)


def _aberth(c, z, tol, max_iter):
    deg = len(z)
    for _ in range(max_iter):
        p, dp = _horner_pair(c, z)
        small = np.abs(dp) < 1e-300
        if np.any(small):
            dp = np.where(small, 1e-300 + 0j, dp)
        w = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        denom = 1.0 - w * s
        denom = np.where(np.abs(denom) < 1e-300, 1e-300 + 0j, denom)
        step = w / denom
        z = z - step
        if np.all(np.abs(step) <= 16 * np.finfo(float).eps * (1.0 + np.abs(z))):
            return z, True
    return z, False


def roots_sorted(coeffs, **kwargs):
    """all_roots followed by a deterministic (real, imag) lexicographic sort."""
    r = all_roots(coeffs, **kwargs)
    order = np.lexsort((r.imag, r.real))
    return r[order]
