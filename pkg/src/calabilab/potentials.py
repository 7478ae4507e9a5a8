"""Holomorphy potentials, the functional S, criticality residuals, the
Futaki invariant, and the equivariant class integrals.

In the reduced setting the invariant holomorphy potentials are exactly the
affine functions of the momentum coordinate, so criticality of
psi = f'(s) h(phi) is measured by its weighted affine defect, and the
fourth-order operator reduces to L psi = (w Theta^2 psi'')'' / w with
kernel {affine}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWeight
from .functions import FunctionDescriptor
from .geometry import MetricProfile, ProfileGeometry, class_constants, require_admissible, scalar_curvature
from .spectral import SampledFunction, affine_projection

DEFAULT_AFFINE_TOL = 1e-8


@dataclass(frozen=True)
class HolomorphyPotential:
    """Normalized potential phi(x) = scale * x + shift of the symmetry field.

    The scale is 1 for the base field; iteration steps produce rescaled
    fields whose potentials are general affine functions.
    """

    geometry: ProfileGeometry
    scale: float = 1.0
    shift: float = 0.0

    def values(self) -> np.ndarray:
        return self.scale * self.geometry.grid.x + self.shift

    def sampled(self) -> SampledFunction:
        return SampledFunction(self.geometry.grid, self.values())


@dataclass(frozen=True)
class ELReport:
    """Criticality diagnostics for a candidate potential psi."""

    alpha: complex
    beta: complex
    defect_affine: float
    defect_operator: float
    is_critical: bool
    tolerance: float

    def as_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "beta": self.beta,
            "defect_affine": self.defect_affine,
            "defect_operator": self.defect_operator,
            "is_critical": self.is_critical,
            "tolerance": self.tolerance,
        }


def normalize_potential(geom: ProfileGeometry, target: float | None = None) -> HolomorphyPotential:
    """Potential x + c with c fixed by C_vol * int (x + c) w dx = target.

    The default target is C_vol * int x w dx, which makes c = 0 (the
    normalization under which transport constants vanish).
    """
    grid = geom.grid
    w = geom.weight.values
    moment = geom.vol_const * float(grid.integrate_values(grid.x * w))
    volume = geom.vol_const * float(grid.integrate_values(w))
    if target is None:
        target = moment
    return HolomorphyPotential(geom, 1.0, (target - moment) / volume)


def _phi_values(profile: MetricProfile, phi: HolomorphyPotential) -> np.ndarray:
    if phi.geometry.grid is not profile.geometry.grid:
        raise ValueError("potential and profile live on different grids")
    return phi.values()


def eval_S(
    profile: MetricProfile,
    f: FunctionDescriptor,
    h: FunctionDescriptor,
    phi: HolomorphyPotential,
) -> complex:
    """The functional C_vol * int f(s(x)) h(phi(x)) w(x) dx."""
    geom = profile.geometry
    grid = geom.grid
    s = scalar_curvature(profile).values
    fv = f(s, grid.x)
    hv = h(_phi_values(profile, phi), grid.x)
    return complex(geom.vol_const * grid.integrate_values(fv * hv * geom.weight.values))


def el_potential(
    profile: MetricProfile,
    f: FunctionDescriptor,
    h: FunctionDescriptor,
    phi: HolomorphyPotential,
) -> SampledFunction:
    """psi(x) = f'(s(x)) * h(phi(x)), the candidate holomorphy potential."""
    geom = profile.geometry
    grid = geom.grid
    s = scalar_curvature(profile).values
    fp = f.derivative()(s, grid.x)
    hv = h(_phi_values(profile, phi), grid.x)
    return SampledFunction(grid, fp * hv)


def lichnerowicz(profile: MetricProfile, psi: SampledFunction) -> SampledFunction:
    """Reduced fourth-order operator L psi = (w Theta^2 psi'')'' / w."""
    require_admissible(profile)
    geom = profile.geometry
    grid = geom.grid
    psi2 = grid.differentiate_values(psi.values, 2)
    inner = geom.weight.values * profile.theta.values ** 2 * psi2
    num = grid.differentiate_values(inner, 2)
    if geom.weight_zero_order > 0:
        out = grid.divide_by_left_monomial(num, geom.weight_zero_order)
    else:
        w = geom.weight.values
        if np.any(w[1:-1] == 0.0):
            raise DegenerateWeight("weight vanishes at an interior node")
        out = num / w
    return SampledFunction(grid, out)


def quadratic_form(profile: MetricProfile, psi: SampledFunction) -> float:
    """C_vol * int w Theta^2 |psi''|^2 dx, the energy whose kernel is the
    affine functions."""
    geom = profile.geometry
    grid = geom.grid
    psi2 = grid.differentiate_values(psi.values, 2)
    integrand = geom.weight.values * profile.theta.values ** 2 * np.abs(psi2) ** 2
    return float(geom.vol_const * grid.integrate_values(integrand))


def quadratic_form_matrix(profile: MetricProfile) -> np.ndarray:
    """Dense matrix Q with psi^T Q psi = C_vol int w Theta^2 (psi'')^2 dx,
    built from the barycentric second-derivative operator."""
    geom = profile.geometry
    grid = geom.grid
    d2 = grid.d2
    diag = grid.quad_weights * geom.weight.values * profile.theta.values ** 2
    return geom.vol_const * (d2.T * diag) @ d2


def holomorphy_defect(
    profile: MetricProfile, psi: SampledFunction, tol_affine: float | None = None
) -> ELReport:
    """Affine projection of psi against the class weight plus the
    quadratic-form residual; is_critical when the affine defect is below
    tol_affine (default 1e-8 * (1 + sup|psi|))."""
    require_admissible(profile)
    geom = profile.geometry
    alpha, beta, res = affine_projection(psi, geom.weight)
    defect_affine = float(np.sqrt(geom.vol_const) * res)
    defect_operator = float(np.sqrt(quadratic_form(profile, psi)))
    if tol_affine is None:
        tol_affine = DEFAULT_AFFINE_TOL * (1.0 + float(np.abs(psi.values).max()))
    return ELReport(
        alpha=alpha,
        beta=beta,
        defect_affine=defect_affine,
        defect_operator=defect_operator,
        is_critical=defect_affine <= tol_affine,
        tolerance=float(tol_affine),
    )


def futaki(profile: MetricProfile, phi: HolomorphyPotential) -> float:
    """C_vol * int (s - s0) phi w dx, the class obstruction for the field."""
    geom = profile.geometry
    grid = geom.grid
    s = scalar_curvature(profile).values
    s0 = class_constants(geom).s0
    integrand = (s - s0) * _phi_values(profile, phi) * geom.weight.values
    return float(geom.vol_const * grid.integrate_values(integrand))


def equivariant_integral(
    profile: MetricProfile, h: FunctionDescriptor, phi: HolomorphyPotential
) -> complex:
    """C_vol * int h(phi) w dx (the f = constant(1) slice of S)."""
    require_admissible(profile)
    geom = profile.geometry
    grid = geom.grid
    hv = h(_phi_values(profile, phi), grid.x)
    return complex(geom.vol_const * grid.integrate_values(hv * geom.weight.values))
