"""Symmetric-matrix admissibility: spectra, S_k, and the matrix cones.

A matrix A is k-admissible when its eigenvalue vector lies in the closed
k-th Garding cone; the Dirichlet dual cone is the complement of the
negated interior.  Sub/supersolution predicates for the eigenvalue
operator S_k(D^2 u) + lam * u * |u|^{k-1} are evaluated on pointwise jets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .symfun import in_gamma_k, sigma_k

__all__ = [
    "SYMMETRY_RTOL",
    "AdmissibleJet",
    "as_symmetric",
    "eigenvalues",
    "s_k_op",
    "membership_slack",
    "in_sigma_k",
    "in_dual_sigma_k",
    "classical_subsolution_at",
    "classical_supersolution_at",
    "load_matrix_json",
    "save_matrix_json",
]

SYMMETRY_RTOL = 1e-12


def as_symmetric(matrix) -> np.ndarray:
    """Validate a square symmetric matrix (1e-12 relative tolerance).

    Returns the symmetrized array (A + A^T)/2 so downstream LAPACK calls
    see an exactly symmetric operand.
    """
    a = np.asarray(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix entries must be finite")
    scale = 1.0 + float(np.max(np.abs(a)))
    skew = float(np.max(np.abs(a - a.T)))
    if skew > SYMMETRY_RTOL * scale:
        raise DomainError(
            f"matrix is not symmetric: max|A - A^T| = {skew:.3e} "
            f"exceeds {SYMMETRY_RTOL:.0e} * (1 + max|A|)"
        )
    return 0.5 * (a + a.T)


def eigenvalues(matrix) -> np.ndarray:
    """Full spectrum of a symmetric matrix, ascending."""
    return np.linalg.eigvalsh(as_symmetric(matrix))


def s_k_op(matrix, k: int) -> float:
    """S_k(A) = sigma_k of the spectrum; S_1 = trace, S_N = det."""
    return sigma_k(eigenvalues(matrix), k)


def membership_slack(matrix, k: int) -> float:
    """Homogeneity-aware tolerance for closed-cone tests on computed data.

    sigma_j is degree j in the eigenvalues, so roundoff in the spectrum
    enters amplified by powers of the matrix scale; a single slack at the
    top degree, 1e-10 * (1 + ||A||_F)^k, covers every level tested.
    """
    a = np.asarray(matrix, dtype=float)
    return 1e-10 * (1.0 + float(np.linalg.norm(a))) ** k


def in_sigma_k(matrix, k: int, strict: bool = False) -> bool:
    """Whether the spectrum lies in the (closed or open) k-th cone."""
    a = as_symmetric(matrix)
    lam = np.linalg.eigvalsh(a)
    return in_gamma_k(lam, k, strict=strict, slack=membership_slack(a, k))


def in_dual_sigma_k(matrix, k: int) -> bool:
    """Dirichlet dual cone: complement of the negated open cone.

    A lies in the dual set exactly when -A is not interior k-admissible,
    so the implementation is literally that negation.
    """
    a = as_symmetric(matrix)
    return not in_sigma_k(-a, k, strict=True)


@dataclass(frozen=True)
class AdmissibleJet:
    """Second-order data of a test function at one point."""

    point: np.ndarray
    value: float
    gradient: np.ndarray
    hessian: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "gradient", np.asarray(self.gradient, dtype=float))
        object.__setattr__(self, "hessian", as_symmetric(self.hessian))
        n = self.point.size
        if self.gradient.size != n or self.hessian.shape != (n, n):
            raise DomainError("jet components disagree on the dimension")
        if not np.isfinite(self.value):
            raise DomainError("jet value must be finite")


def _operator_value(jet: AdmissibleJet, k: int, lam: float) -> float:
    v = jet.value
    return s_k_op(jet.hessian, k) + lam * v * abs(v) ** (k - 1)


def classical_subsolution_at(jet: AdmissibleJet, k: int, lam: float, rhs: float = 0.0) -> bool:
    """Pointwise classical subsolution test for the eigenvalue operator.

    Requires both the differential inequality >= rhs and k-admissibility
    of the Hessian (closed cone); the operator is only monotone on that
    cone, so admissibility is part of being a subsolution.
    """
    if lam < 0:
        raise DomainError("lam must be nonnegative")
    return _operator_value(jet, k, lam) >= rhs and in_sigma_k(jet.hessian, k, strict=False)


def classical_supersolution_at(jet: AdmissibleJet, k: int, lam: float, rhs: float = 0.0) -> bool:
    """Pointwise classical supersolution test (disjunctive form).

    A point passes when the inequality <= rhs holds or the Hessian leaves
    the admissibility cone: a non-admissible Hessian can never be touched
    from below by an admissible test function, so it counts vacuously.
    """
    if lam < 0:
        raise DomainError("lam must be nonnegative")
    return _operator_value(jet, k, lam) <= rhs or not in_sigma_k(jet.hessian, k, strict=False)


def load_matrix_json(path) -> np.ndarray:
    """Read {"n": N, "entries": row-major} and validate symmetry."""
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read matrix file {path}: {exc}") from exc
    try:
        n = int(payload["n"])
        entries = payload["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed matrix file {path}: {exc}") from exc
    flat = np.asarray(entries, dtype=float).ravel()
    if flat.size != n * n:
        raise DomainError(f"matrix file {path}: expected {n*n} entries, got {flat.size}")
    return as_symmetric(flat.reshape(n, n))


def save_matrix_json(path, matrix) -> None:
    a = as_symmetric(matrix)
    with open(path, "w") as fh:
        json.dump({"n": a.shape[0], "entries": a.ravel().tolist()}, fh)
        fh.write("\n")
