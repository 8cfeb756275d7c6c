"""Elementary symmetric functions and Garding cone membership.

Everything here operates on a spectrum: a finite real vector, by convention
handled in ascending order.  sigma_all evaluates every elementary symmetric
polynomial of the vector in one O(N^2) recurrence pass, and the cone
predicates are built on top of it.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

__all__ = [
    "ascending",
    "sigma_k",
    "sigma_all",
    "in_gamma_k",
    "in_gamma_k_korevaar",
    "garding_roots_real",
    "garding_poly_coeffs",
]


def ascending(values) -> np.ndarray:
    """Validate a spectrum: finite real entries, returned sorted ascending."""
    lam = np.asarray(values, dtype=float).ravel()
    if lam.size == 0:
        raise DomainError("spectrum must be non-empty")
    if not np.all(np.isfinite(lam)):
        raise DomainError("spectrum entries must be finite")
    return np.sort(lam)


def _check_order(n: int, k: int) -> None:
    if not isinstance(k, (int, np.integer)):
        raise DomainError(f"order k must be an integer, got {k!r}")
    if k < 0 or k > n:
        raise DomainError(f"order k={k} out of range for an {n}-vector")


def sigma_all(values) -> np.ndarray:
    """All elementary symmetric polynomials (sigma_0, ..., sigma_N).

    Expands prod_i (x + lam_i) by the stable coefficient recurrence: each
    entry multiplies in as e_j += lam_i * e_{j-1}, descending in j so the
    update never reads an already-updated slot.  sigma_0 = 1 by convention.
    """
    lam = np.asarray(values, dtype=float).ravel()
    if not np.all(np.isfinite(lam)):
        raise DomainError("spectrum entries must be finite")
    n = lam.size
    e = np.zeros(n + 1)
    e[0] = 1.0
    for i in range(n):
        # e[1:i+2] reads the pre-update e[0:i+1]; numpy evaluates the RHS
        # before assignment, so the recurrence never consumes a fresh slot
        e[1 : i + 2] = e[1 : i + 2] + lam[i] * e[0 : i + 1]
    return e


def sigma_k(values, k: int) -> float:
    """sigma_k of a spectrum, e.g. sigma_2(1,2,3) = 11."""
    lam = np.asarray(values, dtype=float).ravel()
    _check_order(lam.size, k)
    return float(sigma_all(lam)[k])


def in_gamma_k(values, k: int, strict: bool = True, slack: float = 0.0) -> bool:
    """Membership of the k-th Garding cone: sigma_j > 0 for j = 1..k.

    strict=False tests the closure sigma_j >= -slack instead; slack must be
    nonnegative and defaults to 0 so the predicates reduce to the exact
    definitions.  Admissibility checks on computed data pass a scale-aware
    slack through here.
    """
    lam = np.asarray(values, dtype=float).ravel()
    _check_order(lam.size, k)
    if k == 0:
        return True
    if slack < 0:
        raise DomainError("slack must be nonnegative")
    sig = sigma_all(lam)[1 : k + 1]
    if strict:
        return bool(np.all(sig > slack))
    return bool(np.all(sig >= -slack))


def in_gamma_k_korevaar(values, k: int) -> bool:
    """Garding cone membership via iterated partial derivatives of sigma_k.

    The interior of the cone is characterized by sigma_k > 0 together with
    positivity of every iterated partial of sigma_k up to order k-1.  A
    partial with respect to distinct slots i_1..i_m equals sigma_{k-m} of
    the vector with those entries deleted, so the check enumerates index
    subsets and evaluates complements.  Exponential in k; meant as an
    independent cross-check, not a production path.
    """
    from itertools import combinations

    lam = np.asarray(values, dtype=float).ravel()
    n = lam.size
    _check_order(n, k)
    if k == 0:
        return True
    if sigma_k(lam, k) <= 0.0:
        return False
    for m in range(1, k):
        for subset in combinations(range(n), m):
            rest = np.delete(lam, subset)
            if sigma_k(rest, k - m) <= 0.0:
                return False
    return True


def garding_poly_coeffs(values, k: int) -> np.ndarray:
    """Coefficients of t -> sigma_k(t*ones + lam), highest power first.

    The coefficient of t^{k-m} is C(N-m, k-m) * sigma_m(lam): a k-subset
    containing a fixed m-subset can be completed in C(N-m, k-m) ways.
    """
    lam = np.asarray(values, dtype=float).ravel()
    n = lam.size
    _check_order(n, k)
    sig = sigma_all(lam)
    return np.array([math.comb(n - m, k - m) * sig[m] for m in range(k + 1)])


def garding_roots_real(values, k: int, trials: int = 3) -> bool:
    """Check hyperbolicity in the direction of ones: k real roots.

    Roots of the degree-k polynomial t -> sigma_k(t*ones + lam) are computed
    from its coefficients; a root counts as real when its imaginary part is
    below 1e-9 * (1 + |lam|).  On root-finder failure the coefficients are
    nudged by a tiny deterministic relative perturbation and retried up to
    `trials` times before giving up.
    """
    lam = np.asarray(values, dtype=float).ravel()
    _check_order(lam.size, k)
    if k == 0:
        return True
    if trials < 1:
        raise DomainError("trials must be >= 1")
    coeffs = garding_poly_coeffs(lam, k)
    tol = 1e-9 * (1.0 + float(np.linalg.norm(lam)))
    scale = np.max(np.abs(coeffs))
    last_exc = None
    for attempt in range(trials):
        bumped = coeffs + (attempt * 1e-14 * scale)
        try:
            roots = np.roots(bumped)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - rare
            last_exc = exc
            continue
        if roots.size == k and np.all(np.isfinite(roots)):
            return bool(np.all(np.abs(roots.imag) <= tol))
    raise DomainError(f"root finder failed after {trials} trials: {last_exc}")
