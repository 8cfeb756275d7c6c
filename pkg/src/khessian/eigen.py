"""Principal eigenvalue of the k-Hessian via the monotone iteration.

The scheme solves S_k(D^2 u_n) = 1 + lam |u_{n-1}|^k with zero boundary
data starting from u_0 = 0.  Iterates decrease pointwise; they stay
bounded exactly when lam is below the principal eigenvalue and blow up
above it, so bisection on that dichotomy brackets lambda_1.  The final
convergent iterate, extrapolated and normalized, is the eigenfunction
candidate, and Rayleigh/residual/minimum-principle diagnostics close the
loop.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import simpson

from .cones import AdmissibleJet, classical_supersolution_at
from .dirichlet import SolverConfig, first_integral_solve, holder_seminorm, make_grid
from .errors import DomainError, InconsistencyError
from .radial import RadialProfile, s_k_on_profile

__all__ = [
    "IterationConfig",
    "IterationResult",
    "SpectralEstimate",
    "lower_bound",
    "upper_bound",
    "iterate_fixed_lambda",
    "estimate_lambda1",
    "rayleigh_quotient",
    "minimum_principle_probe",
    "domain_monotonicity_check",
    "thread_cap",
]


def lower_bound(N: int, k: int, R: float) -> float:
    """Certified lower bound C(N,k) R^{-2k} for the principal eigenvalue."""
    _check(N, k, R)
    return math.comb(N, k) * R ** (-2 * k)


def upper_bound(N: int, k: int, R: float) -> float:
    """Certified upper bound 4^k C(N,k) R^{-2k} from the quartic test function."""
    _check(N, k, R)
    return 4**k * math.comb(N, k) * R ** (-2 * k)


def _check(N: int, k: int, R: float) -> None:
    if not isinstance(N, (int, np.integer)) or not isinstance(k, (int, np.integer)):
        raise DomainError("N and k must be integers")
    if k < 1 or k > N:
        raise DomainError("need 1 <= k <= N")
    if R <= 0:
        raise DomainError("radius must be positive")


@dataclass(frozen=True)
class IterationConfig:
    """Knobs for the fixed-point iteration and the eigenvalue bisection.

    sup_cap defaults to 1e6 times the sup norm of the f = 1 solution on
    the same ball; n_max exhaustion is classified by the trend of the
    sup-norm increments (growing means divergent, flattening means a slow
    converger).  bisect_tol defaults to 1e-3 times the initial bracket.
    """

    sup_cap: Optional[float] = None
    n_max: int = 500
    fixed_point_tol: float = 1e-8
    bisect_tol: Optional[float] = None

    def __post_init__(self):
        if self.sup_cap is not None and self.sup_cap <= 0:
            raise DomainError("sup_cap must be positive")
        if self.n_max < 10:
            raise DomainError("n_max must be at least 10")
        if self.fixed_point_tol <= 0:
            raise DomainError("fixed_point_tol must be positive")
        if self.bisect_tol is not None and self.bisect_tol <= 0:
            raise DomainError("bisect_tol must be positive")


@dataclass
class IterationResult:
    converged: bool
    slow: bool
    reason: str
    n_iter: int
    sup_trace: list
    profile: Optional[RadialProfile]
    lam: float


def default_sup_cap(N: int, k: int, R: float) -> float:
    """1e6 times the sup norm of the source-one solution a(R^2 - r^2)/2."""
    a = (1.0 / math.comb(N, k)) ** (1.0 / k)
    return 1e6 * 0.5 * a * R**2


def _classify_tail(sups: list, tol: float) -> str:
    """'growing' or 'plateau' from the last ten sup-norm increments."""
    d = np.diff(np.asarray(sups[-11:]))
    if d.size == 0 or d[-1] <= tol or np.any(d <= 0.0):
        return "plateau"
    ratios = d[1:] / d[:-1]
    return "growing" if float(np.exp(np.mean(np.log(ratios)))) >= 1.0 else "plateau"


def iterate_fixed_lambda(lam: float, R: float, N: int, k: int,
                         cfg: IterationConfig = IterationConfig(),
                         solver_cfg: SolverConfig = SolverConfig()) -> IterationResult:
    """Run the monotone scheme at fixed lam until it settles or blows up.

    Inner solves use the exact first integral with trapezoid cumulative
    quadrature: its weights are nonnegative, so a larger source yields a
    pointwise smaller solution exactly in floating point and the iterates
    are genuinely monotone node-wise, not just up to tolerance.  A
    violation is therefore a real fault and raises InconsistencyError.
    """
    _check(N, k, R)
    if lam < 0:
        raise DomainError("lam must be nonnegative")
    sup_cap = cfg.sup_cap if cfg.sup_cap is not None else default_sup_cap(N, k, R)
    r = make_grid(R, solver_cfg.grid_size, graded=solver_cfg.graded)
    h_prev = np.zeros_like(r)
    sup_trace: list = []
    keep = None
    for n in range(1, cfg.n_max + 1):
        f_nodes = 1.0 + lam * np.abs(h_prev) ** k
        h, hp, hpp = first_integral_solve(f_nodes, r, N, k, scheme="trapezoid")
        if np.any(h > h_prev):
            raise InconsistencyError(
                "iterate increased somewhere despite a larger source",
                trace={"lam": lam, "n": n, "sup_trace": sup_trace},
            )
        sup = float(np.max(np.abs(h)))
        diff = float(np.max(h_prev - h))
        sup_trace.append(sup)
        h_prev = h
        keep = (h, hp, hpp)
        if diff <= cfg.fixed_point_tol:
            profile = RadialProfile(N=N, k=k, r=r, h=h, hp=hp, hpp=hpp, k_convex=True)
            return IterationResult(True, False, "fixed-point", n, sup_trace, profile, lam)
        if sup > sup_cap:
            tail = np.diff(np.asarray(sup_trace[-10:]))
            if np.any(tail < 0):
                raise InconsistencyError(
                    "sup norms not monotone while exceeding the cap",
                    trace={"lam": lam, "n": n, "sup_trace": sup_trace},
                )
            profile = RadialProfile(N=N, k=k, r=r, h=h, hp=hp, hpp=hpp, k_convex=True)
            return IterationResult(False, False, "sup-cap", n, sup_trace, profile, lam)
    h, hp, hpp = keep
    profile = RadialProfile(N=N, k=k, r=r, h=h, hp=hp, hpp=hpp, k_convex=True)
    if _classify_tail(sup_trace, cfg.fixed_point_tol) == "growing":
        return IterationResult(False, False, "n-max-growing", cfg.n_max, sup_trace, profile, lam)
    return IterationResult(True, True, "n-max-plateau", cfg.n_max, sup_trace, profile, lam)


@dataclass
class SpectralEstimate:
    N: int
    k: int
    R: float
    lambda_lo: float
    lambda_hi: float
    lambda_best: float
    bounds: dict
    eigenfunction: RadialProfile
    rayleigh: float
    residual_max: float
    holder: Optional[float]
    diagnostics: dict = field(repr=False, default_factory=dict)

    def to_json_dict(self, profile_ref: Optional[str] = None) -> dict:
        out = {
            "N": self.N,
            "k": self.k,
            "R": self.R,
            "lambda_lo": self.lambda_lo,
            "lambda_hi": self.lambda_hi,
            "lambda_best": self.lambda_best,
            "bounds": dict(self.bounds),
            "rayleigh": self.rayleigh,
            "residual_max": self.residual_max,
            "profile_ref": profile_ref,
        }
        if self.holder is not None:
            out["holder_seminorm"] = self.holder
        return out


def _continue_iteration(profile: RadialProfile, lam: float, budget: int,
                        tol: float) -> tuple:
    """Extra fixed-point sweeps from an existing iterate; returns last three."""
    r = profile.r
    N, k = profile.N, profile.k
    window = [profile.h]
    h_prev = profile.h
    for _ in range(budget):
        f_nodes = 1.0 + lam * np.abs(h_prev) ** k
        h, hp, hpp = first_integral_solve(f_nodes, r, N, k, scheme="trapezoid")
        window.append(h)
        if len(window) > 3:
            window.pop(0)
        if float(np.max(h_prev - h)) <= tol:
            h_prev = h
            break
        h_prev = h
    return window


def _aitken(window: list) -> np.ndarray:
    """Nodewise Aitken delta-squared amplitude correction, guarded."""
    if len(window) < 3:
        return window[-1]
    h0, h1, h2 = window
    d1 = h1 - h0
    d2 = h2 - h1
    denom = d2 - d1
    scale = 1e-14 * (1.0 + np.max(np.abs(h2)))
    safe = np.abs(denom) > scale
    out = h2.copy()
    out[safe] = h2[safe] - d2[safe] ** 2 / denom[safe]
    return np.minimum(out, 0.0)


def estimate_lambda1(R: float, N: int, k: int,
                     cfg: IterationConfig = IterationConfig(),
                     solver_cfg: SolverConfig = SolverConfig()) -> SpectralEstimate:
    """Bracket the principal eigenvalue by bisection on the blow-up dichotomy.

    The certified bounds seed the bracket; convergence of the iteration at
    a probe moves the lower edge up, divergence moves the upper edge down.
    A probe that exhausts n_max while flattening counts as a slow
    convergence and doubles the effective bisection tolerance (logged in
    the diagnostics) rather than stalling the search.  The eigenfunction
    is the last convergent iterate, polished at the final lower edge,
    Aitken-extrapolated, re-solved once for derivative consistency, and
    normalized to minimum value -1.
    """
    lo = lower_bound(N, k, R)
    hi = upper_bound(N, k, R)
    eff_tol = cfg.bisect_tol if cfg.bisect_tol is not None else 1e-3 * (hi - lo)
    probes = []

    res = iterate_fixed_lambda(lo, R, N, k, cfg, solver_cfg)
    probes.append({"lam": lo, "reason": res.reason, "n_iter": res.n_iter,
                   "sup_final": res.sup_trace[-1]})
    if not res.converged:
        raise InconsistencyError(
            "iteration diverged at the certified lower bound",
            trace={"lam": lo, "sup_trace": res.sup_trace},
        )
    best = res

    res = iterate_fixed_lambda(hi, R, N, k, cfg, solver_cfg)
    probes.append({"lam": hi, "reason": res.reason, "n_iter": res.n_iter,
                   "sup_final": res.sup_trace[-1]})
    if res.converged:
        raise InconsistencyError(
            "iteration converged at the certified upper bound",
            trace={"lam": hi, "sup_trace": res.sup_trace},
        )

    slow_events = 0
    while hi - lo > eff_tol:
        mid = 0.5 * (lo + hi)
        res = iterate_fixed_lambda(mid, R, N, k, cfg, solver_cfg)
        probes.append({"lam": mid, "reason": res.reason, "n_iter": res.n_iter,
                       "sup_final": res.sup_trace[-1]})
        if res.converged:
            lo = mid
            best = res
            if res.slow:
                slow_events += 1
                eff_tol *= 2.0
        else:
            hi = mid

    lam_best = 0.5 * (lo + hi)

    # polish the best iterate at the settled lower edge, then extrapolate
    window = _continue_iteration(best.profile, best.lam, 4 * cfg.n_max,
                                 cfg.fixed_point_tol)
    h_star = _aitken(window)
    f_nodes = 1.0 + best.lam * np.abs(h_star) ** k
    r = best.profile.r
    h, hp, hpp = first_integral_solve(f_nodes, r, N, k, scheme="trapezoid")
    s = float(np.max(np.abs(h)))
    if s == 0.0:
        raise InconsistencyError("eigenfunction candidate vanished", trace={})
    w = RadialProfile(N=N, k=k, r=r, h=h / s, hp=hp / s, hpp=hpp / s, k_convex=True)

    sk = s_k_on_profile(w)
    residual_max = float(np.max(np.abs(sk[:-1] - lam_best * np.abs(w.h[:-1]) ** k)))
    rayleigh = rayleigh_quotient(w)
    holder = None
    if 2 * k > N:
        holder = holder_seminorm(w, 2.0 - N / k)

    return SpectralEstimate(
        N=N,
        k=k,
        R=R,
        lambda_lo=lo,
        lambda_hi=hi,
        lambda_best=lam_best,
        bounds={"lower": lower_bound(N, k, R), "upper": upper_bound(N, k, R)},
        eigenfunction=w,
        rayleigh=rayleigh,
        residual_max=residual_max,
        holder=holder,
        diagnostics={
            "probes": probes,
            "slow_events": slow_events,
            "effective_bisect_tol": eff_tol,
            "polish_lambda": best.lam,
            "normalization": s,
        },
    )


def sphere_area(N: int) -> float:
    """Surface measure of the unit sphere in R^N."""
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


def rayleigh_quotient(profile: RadialProfile, k: Optional[int] = None) -> float:
    """[-int u S_k(D^2 u) dx] / ||u||_{k+1}^{k+1} on radial data.

    Both integrals reduce to weighted radial quadratures against
    r^{N-1} dr times the unit-sphere area; the quotient is invariant under
    scaling u -> c u, which the eigen tests exercise.
    """
    k = profile.k if k is None else k
    if not np.any(profile.h):
        raise DomainError("Rayleigh quotient of the zero profile is undefined")
    omega = sphere_area(profile.N)
    weight = profile.r ** (profile.N - 1)
    sk = s_k_on_profile(profile, k)
    num = -omega * simpson(profile.h * sk * weight, x=profile.r)
    den = omega * simpson(np.abs(profile.h) ** (k + 1) * weight, x=profile.r)
    return float(num / den)


def minimum_principle_probe(profile: RadialProfile, lam: float,
                            rhs: float = 0.0) -> dict:
    """Nodewise supersolution certificate plus interior-minimum report.

    A certified supersolution with zero boundary data and a negative
    interior minimum witnesses a minimum-principle failure, which is how
    an upper bound for the principal eigenvalue is demonstrated: below
    the eigenvalue such a function could not exist.
    """
    N, k = profile.N, profile.k
    ok = np.empty(profile.r.size, dtype=bool)
    for i, (rr, hh, pp, qq) in enumerate(
        zip(profile.r, profile.h, profile.hp, profile.hpp)
    ):
        if rr == 0.0:
            hess = qq * np.eye(N)
        else:
            vals = np.full(N, pp / rr)
            vals[0] = qq
            hess = np.diag(vals)
        point = np.zeros(N)
        point[0] = rr
        grad = np.zeros(N)
        grad[0] = pp
        jet = AdmissibleJet(point=point, value=float(hh), gradient=grad, hessian=hess)
        ok[i] = classical_supersolution_at(jet, k, lam, rhs)
    interior = profile.r < profile.R
    interior_min = float(np.min(profile.h[interior]))
    argmin = int(np.argmin(profile.h))
    failed = np.flatnonzero(~ok)
    return {
        "lam": float(lam),
        "supersolution_everywhere": bool(ok.all()),
        "n_failed_nodes": int(failed.size),
        "first_failed_r": float(profile.r[failed[0]]) if failed.size else None,
        "interior_min": interior_min,
        "argmin_r": float(profile.r[argmin]),
        "negative_interior_min": bool(interior_min < 0),
        "violates_minimum_principle": bool(ok.all() and interior_min < 0),
    }


def thread_cap() -> int:
    """Worker cap from KHESS_THREADS, defaulting to the core count."""
    raw = os.environ.get("KHESS_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        cap = int(raw)
    except ValueError as exc:
        raise DomainError(f"KHESS_THREADS must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise DomainError("KHESS_THREADS must be at least 1")
    return cap


def domain_monotonicity_check(N: int, k: int, R1: float, R2: float,
                              cfg: IterationConfig = IterationConfig(),
                              solver_cfg: SolverConfig = SolverConfig()) -> dict:
    """Estimates on nested balls must order: bigger ball, smaller eigenvalue.

    Runs the two estimates (in parallel when the thread cap allows) and
    checks lambda_best(R_big) <= lambda_best(R_small) + 2 * bisect slack.
    """
    if R1 <= 0 or R2 <= 0 or R1 == R2:
        raise DomainError("need two distinct positive radii")
    r_small, r_big = min(R1, R2), max(R1, R2)
    with ThreadPoolExecutor(max_workers=min(2, thread_cap())) as pool:
        fut_small = pool.submit(estimate_lambda1, r_small, N, k, cfg, solver_cfg)
        fut_big = pool.submit(estimate_lambda1, r_big, N, k, cfg, solver_cfg)
        est_small = fut_small.result()
        est_big = fut_big.result()
    slack = 2.0 * max(
        est_small.diagnostics["effective_bisect_tol"],
        est_big.diagnostics["effective_bisect_tol"],
    )
    passed = est_big.lambda_best <= est_small.lambda_best + slack
    return {
        "R_small": r_small,
        "R_big": r_big,
        "lambda_small": est_small.lambda_best,
        "lambda_big": est_big.lambda_best,
        "slack": slack,
        "passed": bool(passed),
    }
