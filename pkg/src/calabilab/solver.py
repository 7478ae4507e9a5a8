"""Critical-metric solvers and the vector-field iteration harness.

solve_critical shoots on the affine coefficients (alpha, beta) of the EL
potential: given (alpha, beta), the scalar curvature is recovered as
s = (f')^{-1}((alpha x + beta) / h(phi)), the profile is rebuilt by
integrating (w Theta)'' = A - w s from the left endpoint, and Newton
iterates on the two far-end mismatches.

When f' is constant the EL potential does not depend on the metric, so
every metric is critical; the solver detects this degenerate direction and
returns the canonical representative with affine scalar curvature instead
of iterating on a singular system.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import (
    ConvergenceError,
    DomainError,
    NotInvertible,
    RangeError,
    SingularPotential,
)
from .functions import FunctionDescriptor
from .geometry import (
    MetricProfile,
    ProfileGeometry,
    bump_factor,
    class_constants,
    round_profile,
)
from .potentials import ELReport, HolomorphyPotential, el_potential, holomorphy_defect
from .spectral import SampledFunction, affine_projection

NEWTON_TOL = 1e-10
NEWTON_FD_STEP = 1e-7
MAX_NEWTON_ITER = 50

STATUS_CONVERGED = "converged"
STATUS_EVERY_METRIC = "every_metric_critical"


@dataclass(frozen=True)
class CriticalSolveResult:
    profile: MetricProfile
    alpha: float
    beta: float
    el_report: ELReport
    iterations: int
    converged: bool
    status: str
    residual_trace: tuple = ()


@dataclass(frozen=True)
class IterationStep:
    index: int
    alpha: float | None
    beta: float | None
    status: str  # continued | converged | zero_field | failed
    profile_summary: dict = field(default_factory=dict)


@dataclass(frozen=True)
class IterationTrace:
    steps: tuple
    # In the circle-symmetric reduction every invariant holomorphy
    # potential is affine in x, so each new field is proportional to the
    # ansatz field; the flag records that structural degeneracy.
    degenerate_direction: bool = True

    @property
    def final_status(self) -> str:
        return self.steps[-1].status if self.steps else "empty"


def _theta_from_p(geom: ProfileGeometry, p: np.ndarray) -> np.ndarray:
    grid = geom.grid
    if geom.weight_zero_order > 0:
        theta = grid.divide_by_left_monomial(p, geom.weight_zero_order)
    else:
        theta = p / geom.weight.values
    theta = theta.copy()
    theta[0] = 0.0
    return theta


class _Shooter:
    """Shared left-to-right integration of (w Theta)'' = A - w s."""

    def __init__(self, geom: ProfileGeometry):
        self.geom = geom
        grid = geom.grid
        self.grid = grid
        self.w = geom.weight.values
        self.a = geom.base_term.values
        self.w_hi = float(self.w[-1])
        self.dw_hi = float(grid.differentiate_values(self.w, 1)[-1])
        self.p_slope_lo = float(self.w[0]) * geom.slope_lo

    def integrate(self, s_vals: np.ndarray):
        rhs = self.a - self.w * s_vals
        p1 = self.p_slope_lo + self.grid.antiderivative_values(rhs)
        p = self.grid.antiderivative_values(p1)
        return p, p1

    def mismatch(self, s_vals: np.ndarray) -> np.ndarray:
        p, p1 = self.integrate(s_vals)
        theta_hi = p[-1] / self.w_hi
        dtheta_hi = (p1[-1] - self.dw_hi * theta_hi) / self.w_hi
        return np.array([theta_hi, dtheta_hi - self.geom.slope_hi])

    def profile(self, s_vals: np.ndarray) -> MetricProfile:
        p, _ = self.integrate(s_vals)
        return MetricProfile(self.geom, SampledFunction(self.grid, _theta_from_p(self.geom, p)))


def _newton(shooter: _Shooter, s_of_ab, init, tol=NEWTON_TOL, max_iter=MAX_NEWTON_ITER):
    ab = np.array(init, dtype=float)
    trace = []
    for it in range(max_iter):
        res = shooter.mismatch(s_of_ab(ab))
        rnorm = float(np.abs(res).max())
        trace.append((tuple(ab), rnorm))
        if rnorm < tol:
            return ab, it, trace
        jac = np.empty((2, 2))
        for j in range(2):
            bump = ab.copy()
            bump[j] += NEWTON_FD_STEP
            jac[:, j] = (shooter.mismatch(s_of_ab(bump)) - res) / NEWTON_FD_STEP
        sv = np.linalg.svd(jac, compute_uv=False)
        if sv[-1] <= 1e-12 * max(sv[0], 1.0):
            raise ConvergenceError("rank-deficient Newton Jacobian", trace)
        ab = ab - np.linalg.solve(jac, res)
    raise ConvergenceError(f"Newton stagnated after {max_iter} iterations", trace)


def _check_nonvanishing(hv: np.ndarray):
    if np.abs(hv).min() <= 1e-12 * max(np.abs(hv).max(), 1.0):
        raise SingularPotential("h(phi) crosses zero on the momentum interval")
    hr = hv.real
    if hr.max() > 0 > hr.min():
        raise SingularPotential("h(phi) changes sign on the momentum interval")


def solve_critical(
    geom: ProfileGeometry,
    f: FunctionDescriptor,
    h: FunctionDescriptor,
    phi: HolomorphyPotential,
    init: tuple | None = None,
    tol: float = NEWTON_TOL,
    max_iter: int = MAX_NEWTON_ITER,
) -> CriticalSolveResult:
    """Find the metric whose EL potential f'(s) h(phi) is alpha x + beta."""
    shooter = _Shooter(geom)
    grid = geom.grid
    x = grid.x
    hv = np.asarray(h(phi.values(), x))
    _check_nonvanishing(hv)
    hr = hv.real
    s0 = class_constants(geom).s0
    fprime = f.derivative()
    fp_const = fprime.constant_value()

    if fp_const is not None:
        # Degenerate direction: psi = fp_const * h(phi) is metric
        # independent, so every metric is critical when it is affine.
        # Return the canonical representative with affine scalar curvature.
        psi_fixed = fp_const * hv
        _, _, resid = affine_projection(psi_fixed, geom.weight, grid)
        if resid > 1e-8 * (1.0 + float(np.abs(psi_fixed).max())):
            raise ConvergenceError(
                "EL potential is metric-independent and non-affine: no critical metric"
            )
        ab, iters, trace = _newton(
            shooter, lambda ab: ab[0] * x + ab[1], (0.0, s0), tol, max_iter
        )
        status = STATUS_EVERY_METRIC
    else:
        try:
            fp_inv = fprime.inverse()
        except NotInvertible as exc:
            raise NotInvertible(
                f"f' of {f.render()} is not invertible; use residual_minimize"
            ) from exc

        def s_of_ab(ab):
            target = (ab[0] * x + ab[1]) / hr
            try:
                return np.asarray(fp_inv(target, x), dtype=float)
            except DomainError as exc:
                raise RangeError(
                    f"affine target left the range of f' at node x={exc.node!r}"
                ) from exc

        if init is None:
            try:
                beta0 = float(np.asarray(fprime(np.array([s0])))[0])
            except DomainError:
                beta0 = 1.0
            init = (0.0, beta0)
        ab, iters, trace = _newton(shooter, s_of_ab, init, tol, max_iter)
        status = STATUS_CONVERGED

    s_final = (ab[0] * x + ab[1]) if fp_const is not None else s_of_ab(ab)
    profile = shooter.profile(s_final)
    psi = el_potential(profile, f, h, phi)
    report = holomorphy_defect(profile, psi)
    return CriticalSolveResult(
        profile=profile,
        alpha=float(ab[0]),
        beta=float(ab[1]),
        el_report=report,
        iterations=iters,
        converged=True,
        status=status,
        residual_trace=tuple(trace),
    )


class _ResidualObjective:
    """Squared affine defect of the EL potential over the admissible
    parametrization Theta = Theta_round + B(x) q(x)."""

    def __init__(self, geom, f, h, phi, degree=6):
        self.geom = geom
        self.grid = geom.grid
        self.f = f
        self.h = h
        self.degree = degree
        x = self.grid.x
        self.hv = np.asarray(h(phi.values(), x))
        self.w = geom.weight.values
        self.a_term = geom.base_term.values
        self.theta0 = round_profile(geom).theta.values
        b = bump_factor(geom)
        tv = np.polynomial.chebyshev.chebvander(self.grid.t, degree)
        self.basis = b[:, None] * tv  # dTheta/dq_k
        self.fprime = f.derivative()
        self.fp_const = self.fprime.constant_value()
        self.fsecond = self.fprime.derivative()
        # ds/dq_k = -(w * B T_k)'' / w, precomputed per basis column
        cols = []
        for k in range(degree + 1):
            num = self.grid.differentiate_values(self.w * self.basis[:, k], 2)
            cols.append(-self._div_w(num))
        self.ds_basis = np.stack(cols, axis=1)
        self.qw = self.grid.quad_weights * self.w

    def _div_w(self, values):
        if self.geom.weight_zero_order > 0:
            return self.grid.divide_by_left_monomial(values, self.geom.weight_zero_order)
        return values / self.w

    def scalar_curvature(self, q):
        theta = self.theta0 + self.basis @ q
        return self._div_w(self.a_term - self.grid.differentiate_values(self.w * theta, 2))

    def psi_and_dpsi(self, q):
        x = self.grid.x
        s = self.scalar_curvature(q)
        if self.fp_const is not None:
            # Degenerate direction: target affine scalar curvature instead.
            return s, self.ds_basis
        psi = np.asarray(self.fprime(s, x)) * self.hv
        dpsi = (np.asarray(self.fsecond(s, x)) * self.hv)[:, None] * self.ds_basis
        return psi, dpsi

    def value_and_grad(self, q):
        psi, dpsi = self.psi_and_dpsi(q)
        alpha, beta, resid_norm = affine_projection(psi, self.w, self.grid)
        value = self.geom.vol_const * resid_norm ** 2
        resid = psi - (alpha * self.grid.x + beta)
        grad = 2.0 * self.geom.vol_const * np.real(
            (np.conj(resid) * self.qw) @ dpsi
        )
        return float(value), np.asarray(grad, dtype=float)

    def profile(self, q):
        return MetricProfile(
            self.geom, SampledFunction(self.grid, self.theta0 + self.basis @ q)
        )


def residual_minimize(
    geom: ProfileGeometry,
    f: FunctionDescriptor,
    h: FunctionDescriptor,
    phi: HolomorphyPotential,
    init_profile: MetricProfile,
    degree: int = 6,
    grad_tol: float = 1e-6,
) -> CriticalSolveResult:
    """Minimize the squared affine defect over the bump parametrization.

    Fallback for f without an invertible derivative; quasi-second-order
    (BFGS) descent with an analytic gradient.
    """
    obj = _ResidualObjective(geom, f, h, phi, degree)
    # project the initial profile onto the parametrization
    dtheta = init_profile.theta.values - obj.theta0
    q0, *_ = np.linalg.lstsq(obj.basis[1:-1], dtheta[1:-1], rcond=None)
    val0, grad0 = obj.value_and_grad(q0)
    if float(np.linalg.norm(grad0)) < grad_tol:
        q_opt, iters = q0, 0
    else:
        res = optimize.minimize(
            obj.value_and_grad,
            q0,
            jac=True,
            method="BFGS",
            options={"gtol": min(grad_tol, 1e-9), "maxiter": 500},
        )
        if float(np.linalg.norm(res.jac)) > grad_tol:
            raise ConvergenceError(
                f"descent stalled: |grad| = {float(np.linalg.norm(res.jac)):.3e}"
            )
        q_opt, iters = res.x, int(res.nit)
    profile = obj.profile(q_opt)
    psi = el_potential(profile, f, h, phi)
    report = holomorphy_defect(profile, psi)
    return CriticalSolveResult(
        profile=profile,
        alpha=float(np.real(report.alpha)),
        beta=float(np.real(report.beta)),
        el_report=report,
        iterations=iters,
        converged=True,
        status=STATUS_CONVERGED,
    )


def iterate(
    geom: ProfileGeometry,
    f: FunctionDescriptor,
    h: FunctionDescriptor,
    phi0: HolomorphyPotential,
    max_steps: int,
    zero_tol: float = 1e-10,
    conv_tol: float = 1e-8,
) -> IterationTrace:
    """Run the vector-field iteration: solve for a critical metric, read
    off psi = alpha x + beta as the next field's preassigned potential,
    and repeat until the new field is trivial, the coefficients settle, a
    step fails, or max_steps is exhausted."""
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    steps = []
    phi = phi0
    prev = None
    for i in range(max_steps):
        try:
            res = solve_critical(geom, f, h, phi)
        except Exception as exc:  # propagated solver errors mark the step failed
            steps.append(IterationStep(i, None, None, "failed", {"error": str(exc)}))
            break
        summary = {
            "sup_theta": float(res.profile.theta.values.max()),
            "defect_affine": res.el_report.defect_affine,
            "defect_operator": res.el_report.defect_operator,
            "solver_status": res.status,
        }
        if abs(res.alpha) < zero_tol:
            status = "zero_field"
        elif prev is not None and abs(res.alpha - prev[0]) < conv_tol and abs(res.beta - prev[1]) < conv_tol:
            status = "converged"
        else:
            status = "continued"
        steps.append(IterationStep(i, res.alpha, res.beta, status, summary))
        if status in ("zero_field", "converged"):
            break
        prev = (res.alpha, res.beta)
        phi = HolomorphyPotential(geom, scale=res.alpha, shift=res.beta)
    return IterationTrace(steps=tuple(steps))
