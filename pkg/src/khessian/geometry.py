"""Boundary geometry: curvature fields, tube bounds, and barrier checks.

A domain enters the theory only through the principal curvatures of its
boundary (inner-normal convention) and the width of a regular tubular
neighborhood.  Near the boundary the Hessian of the distance function has
eigenvalues -kappa_i / (1 - kappa_i d) plus a zero in the normal
direction, so compositions g(d) reduce to symmetric-function algebra on
those values.  The two verifiers certify the exponential and logarithmic
boundary barriers sample by sample.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SearchError
from .symfun import in_gamma_k, sigma_all, sigma_k

__all__ = [
    "CurvatureField",
    "TubeSpec",
    "strictly_km1_convex",
    "augment_r",
    "hess_dist_spectrum",
    "s_j_composition",
    "verify_exp_boundary_barrier",
    "verify_log_boundary_barrier",
    "sphere_field",
    "ellipsoid_field",
    "load_field_json",
    "save_field_json",
]


@dataclass(frozen=True)
class CurvatureField:
    """Principal curvature samples of a closed boundary.

    points has shape (S, N) and kappas shape (S, N-1); row i holds the
    inner-normal principal curvatures at points[i].
    """

    points: np.ndarray
    kappas: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        kap = np.asarray(self.kappas, dtype=float)
        if pts.ndim != 2 or kap.ndim != 2:
            raise DomainError("field arrays must be 2-d (samples by components)")
        if pts.shape[0] != kap.shape[0] or pts.shape[0] == 0:
            raise DomainError("field needs matching, non-empty sample rows")
        if kap.shape[1] != pts.shape[1] - 1:
            raise DomainError("each sample needs N-1 curvatures for ambient dimension N")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(kap))):
            raise DomainError("field entries must be finite")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "kappas", kap)

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_samples(self) -> int:
        return self.points.shape[0]

    @property
    def mu(self) -> float:
        """Curvature bound max |kappa| over the field."""
        return float(np.max(np.abs(self.kappas)))


@dataclass(frozen=True)
class TubeSpec:
    """Regular tube data: 0 < d0 <= delta, mu >= max|kappa|, d0 <= 1/(2 mu)."""

    delta: float
    d0: float
    mu: float

    def __post_init__(self):
        if not 0 < self.d0 <= self.delta:
            raise DomainError("tube needs 0 < d0 <= delta")
        if self.mu < 0:
            raise DomainError("curvature bound mu must be nonnegative")
        if self.mu > 0 and self.d0 > 1.0 / (2.0 * self.mu):
            raise DomainError("tube width d0 must not exceed 1/(2 mu)")

    @classmethod
    def for_field(cls, field: CurvatureField, delta: float) -> "TubeSpec":
        mu = field.mu
        d0 = min(delta, 1.0 / (2.0 * mu)) if mu > 0 else delta
        return cls(delta=delta, d0=d0, mu=mu)


def strictly_km1_convex(field: CurvatureField, k: int) -> bool:
    """Strict (k-1)-convexity: sigma_j(kappa) > 0 for j < k at every sample.

    Only meaningful for k >= 2; the k = 1 theory puts no condition on the
    boundary, so asking is treated as a caller error.
    """
    if k < 2:
        raise DomainError("strict (k-1)-convexity needs k >= 2")
    if k - 1 > field.ambient_dim - 1:
        raise DomainError("order k exceeds the boundary dimension + 1")
    for kap in field.kappas:
        if not in_gamma_k(kap, k - 1, strict=True):
            return False
    return True


def _augmented_ok(field: CurvatureField, k: int, R: float) -> bool:
    for kap in field.kappas:
        if not in_gamma_k(np.append(kap, R), k, strict=True):
            return False
    return True


def augment_r(field: CurvatureField, k: int, r_max: float = None) -> float:
    """Smallest certified R with (kappa(y), R) strictly in the k-th cone.

    sigma_j(kappa, R) = R sigma_{j-1}(kappa) + sigma_j(kappa) is increasing
    in R under strict (k-1)-convexity, so feasibility is monotone: double
    from a small seed until the predicate holds, then bisect the bracket
    and return the certified upper end.  Raises when even r_max fails.
    """
    if not strictly_km1_convex(field, k):
        raise DomainError("augmentation needs a strictly (k-1)-convex field")
    scale = 1.0 + field.mu
    if r_max is None:
        r_max = 1e6 * scale
    r = 1e-6 * scale
    if _augmented_ok(field, k, r):
        return r
    lo = r
    while not _augmented_ok(field, k, r):
        r *= 2.0
        if r > r_max:
            worst = min(
                sigma_k(np.append(kap, r_max), j)
                for kap in field.kappas
                for j in range(1, k + 1)
            )
            raise SearchError(
                f"no augmentation R <= {r_max:.3g} reaches the k={k} cone",
                diagnostics={"r_max": r_max, "worst_sigma": worst},
            )
        lo = r / 2.0
    hi = r
    while hi - lo > 1e-3 * hi:
        mid = 0.5 * (lo + hi)
        if _augmented_ok(field, k, mid):
            hi = mid
        else:
            lo = mid
    if not _augmented_ok(field, k, hi):
        raise SearchError("augmentation certification failed", {"candidate": hi})
    return hi


def hess_dist_spectrum(kappa, d: float) -> np.ndarray:
    """Eigenvalues of D^2(dist) at depth d: -kappa_i/(1 - kappa_i d) and 0."""
    kap = np.asarray(kappa, dtype=float).ravel()
    if d < 0:
        raise DomainError("depth d must be nonnegative")
    denom = 1.0 - kap * d
    if np.any(denom <= 0):
        raise DomainError("depth d reaches the focal radius: 1 - kappa*d <= 0")
    return np.sort(np.append(-kap / denom, 0.0))


def s_j_composition(gp: float, gpp: float, kappa, d: float, j: int) -> float:
    """S_j(D^2 (g o dist)) from g'(d), g''(d) and the curvatures at depth d.

    The tangential eigenvalues are -kappa_i g'(d) / (1 - kappa_i d) and the
    normal one is g''(d); S_j is sigma_j of that assembled vector.
    """
    kap = np.asarray(kappa, dtype=float).ravel()
    if d < 0:
        raise DomainError("depth d must be nonnegative")
    denom = 1.0 - kap * d
    if np.any(denom <= 0):
        raise DomainError("depth d reaches the focal radius: 1 - kappa*d <= 0")
    vec = np.append(-kap * gp / denom, gpp)
    return sigma_k(vec, j)


def _tube_guard(field: CurvatureField, d0: float) -> None:
    if d0 <= 0:
        raise DomainError("collar width d0 must be positive")
    mu = field.mu
    if mu > 0 and d0 > 1.0 / (2.0 * mu):
        raise DomainError(
            f"collar width d0={d0:.6g} exceeds the tube bound 1/(2 mu)={1/(2*mu):.6g}"
        )


def verify_exp_boundary_barrier(field: CurvatureField, k: int, lam: float,
                                t: float, d0: float, n_depth: int = 64) -> dict:
    """Certify phi = e^{-t d} - 1 as a negative strict subsolution barrier.

    At every sample and depth d in (0, d0] the composition must satisfy
    S_j(D^2 phi) > 0 for j = 1..k (admissibility with room) and the margin
    S_k(D^2 phi) - lam |phi|^k > 0.  Factored form: S_j = t^j e^{-j t d}
    sigma_j(kappa_i/(1 - kappa_i d), t), so positivity reduces to the
    augmented symmetric functions; both are evaluated literally.
    """
    if k < 1 or k > field.ambient_dim:
        raise DomainError("order k out of range")
    if t <= 0 or lam < 0:
        raise DomainError("need a positive rate t and nonnegative lam")
    _tube_guard(field, d0)
    depths = np.linspace(0.0, d0, n_depth + 1)[1:]
    min_sj = math.inf
    worst_margin = math.inf
    for kap in field.kappas:
        for d in depths:
            denom = 1.0 - kap * d
            vec = np.append(kap / denom, t)
            sig = sigma_all(vec)
            phi = math.exp(-t * d) - 1.0
            for j in range(1, k + 1):
                sj = t**j * math.exp(-j * t * d) * sig[j]
                min_sj = min(min_sj, sj)
                if j == k:
                    worst_margin = min(worst_margin, sj - lam * abs(phi) ** k)
    report = {
        "kind": "exp-barrier",
        "k": k,
        "lam": float(lam),
        "t": float(t),
        "d0": float(d0),
        "samples": field.n_samples,
        "depth_nodes": int(n_depth),
        "min_sj": float(min_sj),
        "worst_margin": float(worst_margin),
        "admissible": bool(min_sj > 0),
        "passed": bool(min_sj > 0 and worst_margin > 0),
    }
    return report


def verify_log_boundary_barrier(field: CurvatureField, k: int, fsup: float,
                                usup: float, t: float, d0: float,
                                n_depth: int = 64) -> tuple:
    """Size the amplitude of v = -M log(1 + t d) and certify it nodewise.

    S_j(D^2 v) = (M t / (1 + t d))^j sigma_j(kappa_i/(1 - kappa_i d),
    t/(1 + t d)), so the barrier is admissible exactly when the augmented
    sigma values are positive; their sampled minimum beta, derated by the
    safety factor 0.5, sizes M so that S_k(D^2 v) >= fsup throughout the
    collar while M log(1 + t d0) >= usup matches the interior bound.
    Returns (M, report); raises SearchError when the collar data cannot
    support a positive beta.
    """
    if k < 1 or k > field.ambient_dim:
        raise DomainError("order k out of range")
    if t <= 0 or fsup < 0 or usup < 0:
        raise DomainError("need t > 0 and nonnegative bounds fsup, usup")
    _tube_guard(field, d0)
    depths = np.linspace(0.0, d0, n_depth + 1)[1:]
    beta = math.inf
    for kap in field.kappas:
        for d in depths:
            denom = 1.0 - kap * d
            vec = np.append(kap / denom, t / (1.0 + t * d))
            sig = sigma_all(vec)
            beta = min(beta, float(np.min(sig[1 : k + 1])))
    if not beta > 0:
        raise SearchError(
            "log barrier infeasible: augmented sigma_j not positive on the collar",
            diagnostics={"beta": beta, "t": t, "d0": d0},
        )
    beta_eff = 0.5 * beta
    m_pde = ((1.0 + t * d0) / t) * (fsup / beta_eff) ** (1.0 / k) if fsup > 0 else 0.0
    m_bc = usup / math.log1p(t * d0) if usup > 0 else 0.0
    M = max(m_pde, m_bc, 1.0 if fsup == 0 and usup == 0 else 0.0)

    min_sj = math.inf
    worst_margin = math.inf
    for kap in field.kappas:
        for d in depths:
            denom = 1.0 - kap * d
            vec = np.append(kap / denom, t / (1.0 + t * d))
            sig = sigma_all(vec)
            amp = M * t / (1.0 + t * d)
            for j in range(1, k + 1):
                sj = amp**j * sig[j]
                min_sj = min(min_sj, sj)
                if j == k:
                    worst_margin = min(worst_margin, sj - fsup)
    report = {
        "kind": "log-barrier",
        "k": k,
        "fsup": float(fsup),
        "usup": float(usup),
        "t": float(t),
        "d0": float(d0),
        "samples": field.n_samples,
        "depth_nodes": int(n_depth),
        "beta": float(beta),
        "beta_eff": float(beta_eff),
        "M": float(M),
        "min_sj": float(min_sj),
        "worst_margin": float(worst_margin),
        "boundary_match": bool(M * math.log1p(t * d0) >= usup),
        "admissible": bool(min_sj > 0),
        "passed": bool(min_sj > 0 and worst_margin >= 0 and M * math.log1p(t * d0) >= usup),
    }
    return M, report


def sphere_field(R: float, N: int, n_samples: int = 32) -> CurvatureField:
    """Sphere of radius R: every principal curvature equals 1/R."""
    if R <= 0 or N < 2 or n_samples < 1:
        raise DomainError("need R > 0, N >= 2 and at least one sample")
    if N == 2:
        angles = np.linspace(0.0, 2.0 * math.pi, n_samples, endpoint=False)
        pts = R * np.column_stack([np.cos(angles), np.sin(angles)])
    elif N == 3:
        # Fibonacci lattice: deterministic, roughly uniform
        i = np.arange(n_samples)
        z = 1.0 - 2.0 * (i + 0.5) / n_samples
        phi = i * math.pi * (3.0 - math.sqrt(5.0))
        rho = np.sqrt(1.0 - z**2)
        pts = R * np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    else:
        rng = np.random.default_rng(20240901)
        raw = rng.standard_normal((n_samples, N))
        pts = R * raw / np.linalg.norm(raw, axis=1, keepdims=True)
    kap = np.full((n_samples, N - 1), 1.0 / R)
    return CurvatureField(points=pts, kappas=kap)


def _level_set_curvatures(point: np.ndarray, semi_axes: np.ndarray) -> np.ndarray:
    """Inner-normal principal curvatures of an ellipsoid at a surface point.

    The shape operator of the level set F = sum (x_i/a_i)^2 - 1 restricted
    to the tangent space is T^t (D^2 F) T / |grad F| for any orthonormal
    tangent basis T, and D^2 F is the constant diagonal 2/a_i^2.
    """
    grad = 2.0 * point / semi_axes**2
    gnorm = np.linalg.norm(grad)
    n_hat = (grad / gnorm).reshape(1, -1)
    # rows 2..N of the SVD right factor span the tangent space
    _, _, vt = np.linalg.svd(n_hat)
    tangent = vt[1:].T
    hess = np.diag(2.0 / semi_axes**2)
    shape_op = tangent.T @ hess @ tangent / gnorm
    return np.sort(np.linalg.eigvalsh(shape_op))


def ellipsoid_field(semi_axes, n_samples: int = 32) -> CurvatureField:
    """Ellipsoid sum (x_i/a_i)^2 = 1 in dimension 2 or 3, exact curvatures."""
    axes = np.asarray(semi_axes, dtype=float).ravel()
    if axes.size not in (2, 3) or np.any(axes <= 0):
        raise DomainError("semi-axes must be 2 or 3 positive lengths")
    if n_samples < 1:
        raise DomainError("need at least one sample")
    if axes.size == 2:
        tt = np.linspace(0.0, 2.0 * math.pi, n_samples, endpoint=False)
        pts = np.column_stack([axes[0] * np.cos(tt), axes[1] * np.sin(tt)])
    else:
        n_u = max(2, int(math.sqrt(n_samples)))
        n_v = max(2, (n_samples + n_u - 1) // n_u)
        uu = np.linspace(0.0, math.pi, n_u + 2)[1:-1]
        vv = np.linspace(0.0, 2.0 * math.pi, n_v, endpoint=False)
        pts = np.array(
            [
                [
                    axes[0] * math.sin(u) * math.cos(v),
                    axes[1] * math.sin(u) * math.sin(v),
                    axes[2] * math.cos(u),
                ]
                for u in uu
                for v in vv
            ]
        )[:n_samples]
    kap = np.array([_level_set_curvatures(p, axes) for p in pts])
    return CurvatureField(points=pts, kappas=kap)


def load_field_json(path) -> CurvatureField:
    """Read a field file: a JSON list of {"point": [..], "kappa": [..]}."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read field file {path}: {exc}") from exc
    if not isinstance(payload, list) or not payload:
        raise DomainError(f"field file {path} must hold a non-empty JSON list")
    try:
        pts = np.array([row["point"] for row in payload], dtype=float)
        kap = np.array([row["kappa"] for row in payload], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed field file {path}: {exc}") from exc
    return CurvatureField(points=pts, kappas=kap)


def save_field_json(path, field: CurvatureField) -> None:
    rows = [
        {"point": p.tolist(), "kappa": kap.tolist()}
        for p, kap in zip(field.points, field.kappas)
    ]
    with open(path, "w") as fh:
        json.dump(rows, fh)
        fh.write("\n")
