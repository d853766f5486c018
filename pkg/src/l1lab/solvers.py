"""The three iterative algorithms with per-iteration trace recording.

All three methods share the descent property: the recorded objective
values are nonincreasing. One iteration of the coordinate methods means
one full sweep over all d coordinates, so the outer iteration counter is
comparable across algorithms.

  gd   - full proximal-gradient step with the global constant L
  ccd  - cyclic per-coordinate proximal steps with refreshed gradients
  ccm  - cyclic exact per-coordinate minimization of F
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import (
    Assumption2Error,
    ConvergenceError,
    NonFiniteIterateError,
    PreconditionError,
    UnboundedBelowError,
)
from .operators import _soft, optimality_residual, prox_gradient_map
from .problems import ProblemSpec, _expit, as_vector, f_grad_coord, objective

# Coordinate updates smaller than this (relative) are treated as trivial,
# so no shrinkage-threshold diagnostic is recorded for them.
_TRIVIAL_RTOL = 1e-13

_ALGORITHMS = ("gd", "ccd", "ccm")


@dataclass(frozen=True)
class SolverConfig:
    """Outer-loop budget, stopping rule, and 1-D inner-solver tolerances.

    stop_residual is a sup-norm fixed-point residual threshold; the
    default 0 disables early stopping so exactly max_outer_iters
    iterations run.
    """

    max_outer_iters: int = 100
    stop_residual: float = 0.0
    record_inner: bool = False
    inner_1d_tol: float = 1e-12
    inner_1d_max_iters: int = 200

    def __post_init__(self):
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be at least 1")
        if self.stop_residual < 0.0:
            raise ValueError("stop_residual must be nonnegative")
        if not self.inner_1d_tol > 0.0:
            raise ValueError("inner_1d_tol must be positive")
        if self.inner_1d_max_iters < 1:
            raise ValueError("inner_1d_max_iters must be at least 1")


@dataclass(frozen=True)
class TauRecord:
    """Implicit shrinkage threshold of one non-trivial exact coordinate update."""

    k: int
    j: int
    z_old: float
    z_new: float
    grad_old: float
    tau: float


@dataclass
class Trace:
    """Record of one solver run: iterates, objective values, residuals.

    f_values[k] is the full objective F at iterate k, residuals[k] the
    fixed-point residual. ``inner`` optionally holds the within-sweep
    iterates (j = 0..d per sweep) for the coordinate methods, and
    ``tau_log`` the per-update threshold diagnostics of ccm.
    """

    algorithm: str
    iterates: list
    f_values: list
    residuals: list
    inner: list | None = None
    tau_log: list | None = None

    def descent_ok(self, tol: float = 1e-12) -> bool:
        vals = self.f_values
        return all(vals[k + 1] <= vals[k] + tol for k in range(len(vals) - 1))

    def write_csv(self, path) -> None:
        d = len(self.iterates[0])
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("k,F,residual," + ",".join(f"x_{i + 1}" for i in range(d)) + "\n")
            for k, (x, F, r) in enumerate(zip(self.iterates, self.f_values, self.residuals)):
                cells = [str(k), f"{F:.17g}", f"{r:.17g}"] + [f"{v:.17g}" for v in x]
                fh.write(",".join(cells) + "\n")

    def to_json_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "iterates": [x.tolist() for x in self.iterates],
            "f_values": list(self.f_values),
            "residuals": list(self.residuals),
            "inner": None
            if self.inner is None
            else [[y.tolist() for y in sweep] for sweep in self.inner],
            "tau_log": None if self.tau_log is None else [asdict(t) for t in self.tau_log],
        }

    def write_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2)
            fh.write("\n")


def gd_step(p: ProblemSpec, x) -> np.ndarray:
    """One proximal-gradient iteration (reduces to x - grad f/L when lam = 0)."""
    return prox_gradient_map(p, x)


def _ccd_pass(p, w, record_inner):
    inner = [w.copy()] if record_inner else None
    thr = p.lam / p.lipschitz
    for j in range(p.dim):
        gj = f_grad_coord(p, w, j)
        w[j] = _soft(w[j] - gj / p.lipschitz, thr)
        if record_inner:
            inner.append(w.copy())
    return w, inner


def ccd_sweep(p: ProblemSpec, y, record_inner: bool = False):
    """One cyclic sweep of per-coordinate proximal steps, updating in place.

    Each coordinate step uses the gradient at the current partially
    updated point. Returns the post-sweep vector and, when requested, the
    list of within-sweep iterates (j = 0..d).
    """
    w = as_vector(y, p.dim).copy()
    return _ccd_pass(p, w, record_inner)


def _logistic_restriction(p, w, j):
    # Coordinate restriction g(a) = f(w with w_j = a) for the logistic loss.
    X, Y = p.smooth.X, p.smooth.Y
    n = p.smooth.n
    c = Y * X[:, j]
    m0 = Y * (X @ w) - w[j] * c

    def g_value(a):
        return float(np.logaddexp(0.0, -(m0 + a * c)).mean())

    def g_deriv(a):
        return float(-(c @ _expit(-(m0 + a * c))) / n)

    return g_value, g_deriv


def _ccm_pass(p, w, cfg, k, record_inner):
    inner = [w.copy()] if record_inner else None
    taus = []
    if p.is_quadratic:
        A, b = p.smooth.A, p.smooth.b
        diag = A.diagonal()
        bad = np.nonzero(diag <= 0.0)[0]
        if bad.size:
            raise Assumption2Error(
                f"exact coordinate minimization needs strictly positive diagonal "
                f"entries; A_jj <= 0 at coordinates {bad.tolist()}"
            )
        for j in range(p.dim):
            gj = float(A[j] @ w + b[j])
            z_old = float(w[j])
            z_new = float(_soft(z_old - gj / diag[j], p.lam / diag[j]))
            if abs(z_new - z_old) > _TRIVIAL_RTOL * (1.0 + abs(z_old)):
                # For a quadratic restriction the implicit threshold is the
                # curvature A_jj itself, independent of the update.
                taus.append(TauRecord(k, j, z_old, z_new, gj, float(diag[j])))
            w[j] = z_new
            if record_inner:
                inner.append(w.copy())
    else:
        for j in range(p.dim):
            g_value, g_deriv = _logistic_restriction(p, w, j)
            z_old = float(w[j])
            gj = g_deriv(z_old)
            z_new = solve_1d_prox(
                g_value, g_deriv, p.lam, cfg.inner_1d_tol, cfg.inner_1d_max_iters
            )
            if abs(z_new - z_old) > _TRIVIAL_RTOL * (1.0 + abs(z_old)):
                taus.append(TauRecord(k, j, z_old, z_new, gj, secant_tau(g_deriv, z_old, z_new)))
            w[j] = z_new
            if record_inner:
                inner.append(w.copy())
    return w, taus, inner


def ccm_sweep(p: ProblemSpec, z, cfg: SolverConfig | None = None, k: int = 0):
    """One cyclic sweep of exact per-coordinate minimization of F.

    The quadratic branch uses the closed form S_{lam/A_jj}(z_j - g_j/A_jj);
    the general branch minimizes the coordinate restriction numerically.
    Returns the post-sweep vector and the threshold records of the
    non-trivial updates.
    """
    cfg = cfg if cfg is not None else SolverConfig()
    w = as_vector(z, p.dim).copy()
    w, taus, _ = _ccm_pass(p, w, cfg, k, record_inner=False)
    return w, taus


def _positive_branch_root(q, tol, max_iters):
    # q is nondecreasing with q(0) < 0; bracket the root by doubling, then bisect.
    lo, hi, step = 0.0, None, 1.0
    for _ in range(60):
        if q(step) >= 0.0:
            hi = step
            break
        lo = step
        step *= 2.0
    if hi is None:
        raise UnboundedBelowError(
            "no sign change within 60 doublings; the 1-D objective appears unbounded below"
        )
    for _ in range(max_iters):
        if hi - lo <= tol:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        if q(mid) >= 0.0:
            hi = mid
        else:
            lo = mid
    raise ConvergenceError(
        f"bisection did not reach width {tol:.3e} in {max_iters} iterations "
        f"(bracket [{lo:.17g}, {hi:.17g}])"
    )


def solve_1d_prox(g_value, g_deriv, lam, tol: float = 1e-12, max_iters: int = 200) -> float:
    """Minimize g(a) + lam * |a| for a strictly convex differentiable g.

    Dispatch on g'(0): inside [-lam, lam] the minimizer is 0; otherwise the
    minimizer has a known sign and solves g'(a) + lam = 0 (positive side)
    or g'(a) - lam = 0 (negative side), found by a doubling bracket and
    bisection on the shifted derivative.
    """
    if lam < 0.0:
        raise ValueError("lam must be nonnegative")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    d0 = float(g_deriv(0.0))
    if abs(d0) <= lam:
        return 0.0
    if d0 < -lam:
        return _positive_branch_root(lambda a: float(g_deriv(a)) + lam, tol, max_iters)
    return -_positive_branch_root(lambda a: -float(g_deriv(-a)) + lam, tol, max_iters)


def secant_tau(g_deriv, z_old: float, z_new: float) -> float:
    """Secant slope of g' across a coordinate update.

    For an exact-minimization update this slope is the implicit shrinkage
    threshold: z_new = S_{lam/tau}(z_old - g'(z_old)/tau). It lies in
    (0, L] for strictly convex g with L-Lipschitz derivative, and equals
    the curvature exactly when g is quadratic.
    """
    if z_new == z_old:
        raise PreconditionError("secant slope is undefined for a trivial update")
    return (float(g_deriv(z_new)) - float(g_deriv(z_old))) / (z_new - z_old)


def run(algorithm: str, p: ProblemSpec, x0, cfg: SolverConfig | None = None) -> Trace:
    """Run one algorithm from x0 and record a full trace.

    Iterations stop after cfg.max_outer_iters, or earlier when the
    fixed-point residual drops to cfg.stop_residual (if positive). Raises
    if an iterate turns non-finite, naming the iteration.
    """
    alg = str(algorithm).lower()
    if alg not in _ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {_ALGORITHMS}")
    cfg = cfg if cfg is not None else SolverConfig()
    x = as_vector(x0, p.dim).copy()

    iterates = [x.copy()]
    f_values = [objective(p, x)]
    residuals = [optimality_residual(p, x)]
    record_inner = cfg.record_inner and alg in ("ccd", "ccm")
    inner = [] if record_inner else None
    tau_log = [] if alg == "ccm" else None

    for k in range(cfg.max_outer_iters):
        if cfg.stop_residual > 0.0 and residuals[-1] <= cfg.stop_residual:
            break
        if alg == "gd":
            x = gd_step(p, x)
        elif alg == "ccd":
            x, sweep_inner = _ccd_pass(p, x.copy(), record_inner)
            if record_inner:
                inner.append(sweep_inner)
        else:
            x, taus, sweep_inner = _ccm_pass(p, x.copy(), cfg, k, record_inner)
            tau_log.extend(taus)
            if record_inner:
                inner.append(sweep_inner)
        if not np.isfinite(x).all():
            raise NonFiniteIterateError(
                f"{alg} produced a non-finite iterate at iteration {k + 1}", iteration=k + 1
            )
        iterates.append(x.copy())
        f_values.append(objective(p, x))
        residuals.append(optimality_residual(p, x))

    return Trace(
        algorithm=alg,
        iterates=iterates,
        f_values=f_values,
        residuals=residuals,
        inner=inner,
        tau_log=tau_log,
    )
