"""Convention constants pinned by executable oracles.

The transport scale constants are not taken on faith: kappa_theta enters
the symplectic-potential transport G_t = G_0 - kappa_theta * t * u and
kappa_phi the fixed-point moment velocity dphi = kappa_phi * Theta * u'.
The Legendre dictionary forces kappa_phi = kappa_theta; the value 1/2
corresponds to reading the deformation direction u as a Kahler potential
increment (omega = i ddbar F with moment map F'/2).  The oracles in
build_manifest (and the test suite) verify the pinned pair.
"""

from __future__ import annotations

import json

import numpy as np

from .geometry import DEFAULT_NODES, make_cpm_geometry, round_profile, scalar_curvature

KAPPA_THETA = 0.5
KAPPA_PHI = 0.5

GENERATOR = "splitmix64"


def pin_cpm_base_coefficient(m: int, nodes: int = DEFAULT_NODES) -> tuple[float, float]:
    """Pin the coefficient a in A(x) = a * x^(m-2) by requiring the
    Fubini-Study profile 2x(1-x) to have constant scalar curvature.

    Solves the linear least-squares problem
        a * x^(m-2) - (w Theta_FS)'' = c * x^(m-1)
    over the grid for (a, c) and returns them; c is the pinned constant
    scalar curvature.
    """
    geom = make_cpm_geometry(m, nodes)
    grid = geom.grid
    x = grid.x
    w = geom.weight.values
    theta = round_profile(geom).theta.values
    d2 = grid.differentiate_values(w * theta, 2)
    basis = np.stack([x ** (m - 2), x ** (m - 1)], axis=1)
    sol, *_ = np.linalg.lstsq(basis, d2, rcond=None)
    a, neg_c = sol[0], sol[1]
    return float(a), float(-neg_c)


def fubini_study_scalar_constant(m: int, nodes: int = DEFAULT_NODES) -> float:
    """Constant scalar curvature of the Fubini-Study profile on CP^m,
    recorded from the computation rather than asserted."""
    geom = make_cpm_geometry(m, nodes)
    s = scalar_curvature(round_profile(geom)).values
    return float(s.mean())


def build_manifest(nodes: int = DEFAULT_NODES, ms=(2, 3, 4)) -> dict:
    """Recompute all pinned constants and return the conventions manifest."""
    manifest = {
        "kappa_theta": KAPPA_THETA,
        "kappa_phi": KAPPA_PHI,
        "random_generator": GENERATOR,
        "vol_const_convention": "C_vol = 2*pi (one angular circle)",
        "nodes": nodes,
        "cpm": {},
    }
    for m in ms:
        a, c = pin_cpm_base_coefficient(m, nodes)
        manifest["cpm"][str(m)] = {
            "base_coefficient": a,
            "scalar_constant": c,
            "scalar_constant_observed": fubini_study_scalar_constant(m, nodes),
            "scalar_std": float(scalar_curvature(round_profile(make_cpm_geometry(m, nodes))).values.std()),
        }
    return manifest


def write_manifest(path, nodes: int = DEFAULT_NODES) -> dict:
    manifest = build_manifest(nodes)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest
