"""Cross-module verification battery behind the ``verify`` CLI command.

Each check produces a measured value and a bound; a check passes when
value <= bound.  Bounds are the module tolerances and can be overridden
one by one (``--tol name=value``), which is also how the battery's
failure path is exercised.  Randomized identities use a fixed seed so
runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import observables, spinor, states, symmetry
from .dynamics import (
    NRPacketParams,
    evolve_report,
    nr_current,
    nr_density_analytic_grid,
    nr_gaussian_grid,
    nr_spectral_evolution,
)
from .observables import FourVectorDensity
from .transform import CartesianGrid, position_state_cartesian, radial_delta_x

SEED = 20130625

DEFAULT_TOLERANCES = {
    "dirac_anticommutation": 0.0,
    "projector_idempotence": 1e-12,
    "projector_hermiticity": 1e-12,
    "eigenspinor_residual": 1e-10,
    "eigenspinor_norm": 1e-12,
    "spin_eigenvalue": 1e-10,
    "rotation_intertwines": 1e-10,
    "derivative_bound_slack": 1e-3,
    "profile_norm": 1e-8,
    "profile_mean_v0": 1e-8,
    "profile_mean_boosted": 1e-6,
    "state_norms": 1e-6,
    "positive_energy_membership": 1e-10,
    "rn_at_zero": 1e-8,
    "rn_convergence_ratio": 1.0,
    "rn_alpha3_convergence_ratio": 1.0,
    "velocity_identity": 1e-8,
    "causality_margin": 1e-10,
    "lightcone_leakage": 1e-3,
    "overlap_reduction": 1e-9,
    "opposite_spin_overlap": 1e-10,
    "overlap_decay_ratio": 1.0,
    "nr_oracle": 1e-6,
    "nr_current_order_defect": 0.2,
    "boost_velocity_addition": 1e-12,
    "boost_composition": 1e-12,
    "boost_field_trend_ratio": 1.0,
    "moment_consistency": 1e-4,
    "localization_trend_ratio": 1.0,
}


@dataclass
class Check:
    name: str
    value: float
    bound: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "value": self.value,
            "bound": self.bound,
            "passed": self.passed,
        }


def _check(name: str, value: float, tolerances: dict) -> Check:
    bound = float(tolerances[name])
    return Check(name=name, value=float(value), bound=bound, passed=float(value) <= bound)


def _random_momenta(count: int, radius: float, rng) -> np.ndarray:
    return rng.uniform(-radius, radius, size=(count, 3))


def _monotone_ratio(errors) -> float:
    """max ratio of consecutive error magnitudes; < 1 means strictly decreasing."""
    errors = np.asarray(errors, dtype=float)
    return float(np.max(errors[1:] / errors[:-1]))


def run_checks(tolerances: dict | None = None) -> list[Check]:
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        unknown = set(tolerances) - set(tol)
        if unknown:
            raise KeyError(f"unknown tolerance names: {sorted(unknown)}")
        tol.update(tolerances)
    rng = np.random.default_rng(SEED)
    checks: list[Check] = []

    # --- matrix algebra -------------------------------------------------
    anti = max(
        np.abs(
            spinor.ALPHA[i] @ spinor.ALPHA[j]
            + spinor.ALPHA[j] @ spinor.ALPHA[i]
            - 2.0 * (i == j) * np.eye(4)
        ).max()
        for i in range(3)
        for j in range(3)
    )
    checks.append(_check("dirac_anticommutation", anti, tol))

    pts = _random_momenta(1000, 50.0, rng)
    proj = spinor.positive_projector(pts)
    checks.append(
        _check("projector_idempotence", np.abs(proj @ proj - proj).max(), tol)
    )
    checks.append(
        _check(
            "projector_hermiticity",
            np.abs(proj - np.conj(np.swapaxes(proj, -1, -2))).max(),
            tol,
        )
    )
    ham = spinor.hamiltonian_matrix(pts)
    erg = spinor.energy(pts)
    umat = spinor.pryce_u_matrix(pts)
    checks.append(
        _check(
            "rotation_intertwines",
            np.abs(ham @ umat - erg[:, None, None] * (umat @ spinor.BETA)).max(),
            tol,
        )
    )
    worst_resid = worst_norm = worst_spin = 0.0
    s3 = spinor.pryce_spin3(pts)
    for label in (spinor.SPIN_UP, spinor.SPIN_DOWN):
        u = spinor.spin_eigenspinor(pts, label)
        worst_resid = max(
            worst_resid,
            np.abs(np.einsum("mab,mb->ma", ham, u) - erg[:, None] * u).max(),
        )
        worst_norm = max(worst_norm, np.abs(np.sum(np.abs(u) ** 2, axis=1) - 1).max())
        worst_spin = max(
            worst_spin,
            np.abs(np.einsum("mab,mb->ma", s3, u) - label * u).max(),
        )
    checks.append(_check("eigenspinor_residual", worst_resid, tol))
    checks.append(_check("eigenspinor_norm", worst_norm, tol))
    checks.append(_check("spin_eigenvalue", worst_spin, tol))

    bounds_report = spinor.spinor_derivative_bounds(_random_momenta(100, 20.0, rng))
    slack_used = max(
        bounds_report.max_component - 1.0,
        bounds_report.worst_mass_ratio - 1.0,
        bounds_report.worst_radial_ratio - 1.0,
        0.0,
    )
    checks.append(_check("derivative_bound_slack", slack_used, tol))

    # --- profiles and states -------------------------------------------
    plain = states.gaussian_profile(1.0)
    norm, mean = states.check_profile_conditions(plain)
    checks.append(_check("profile_norm", abs(norm - 1.0), tol))
    checks.append(_check("profile_mean_v0", float(np.linalg.norm(mean)), tol))
    boosted = states.boosted_gaussian_profile((0.0, 0.0, 0.5))
    _, bmean = states.check_profile_conditions(boosted)
    checks.append(
        _check(
            "profile_mean_boosted",
            float(np.linalg.norm(bmean - np.array([0.0, 0.0, 0.5]))),
            tol,
        )
    )
    norm_dev = max(
        abs(states.make_state(n=n).norm() - 1.0) for n in (1, 2, 5, 10, 20)
    )
    checks.append(_check("state_norms", norm_dev, tol))

    sample = _random_momenta(200, 20.0, rng)
    st = states.make_state(a=(0.5, -0.3, 1.0), v=(0.0, 0.0, 0.4), n=3)
    phi = st.spinor(sample[:, 0], sample[:, 1], sample[:, 2])  # (4, M)
    proj_s = spinor.positive_projector(sample)
    resid = np.abs(np.einsum("mab,bm->am", proj_s, phi) - phi).max()
    checks.append(_check("positive_energy_membership", resid, tol))

    # --- R_n convergence -------------------------------------------------
    checks.append(
        _check(
            "rn_at_zero",
            abs(observables.convolution_Rn(plain, 7, (0, 0, 0)) - 1.0),
            tol,
        )
    )
    errs = [
        abs(observables.convolution_Rn(plain, n, (1, 0, 0)) - 1.0) for n in (2, 4, 8)
    ]
    checks.append(_check("rn_convergence_ratio", _monotone_ratio(errs), tol))
    errs = [
        abs(observables.convolution_Rn(boosted, n, (0, 0, 0), "alpha3") - 0.5)
        for n in (2, 4, 8)
    ]
    checks.append(_check("rn_alpha3_convergence_ratio", _monotone_ratio(errs), tol))

    # --- velocity identity ----------------------------------------------
    worst = 0.0
    for v in ((0.0, 0.0, 0.0), (0.0, 0.0, 0.3)):
        sb = states.make_state(v=v, n=6)
        sf, cf = observables.mean_velocity_two_ways(sb)
        worst = max(worst, float(np.abs(sf - cf).max()))
    checks.append(_check("velocity_identity", worst, tol))

    # --- causality over time ----------------------------------------------
    grid = CartesianGrid(64, 16.0)
    report, _ = evolve_report(states.make_state(n=5), grid, (0.0, 0.5, 1.0), r0=3.0)
    checks.append(_check("causality_margin", max(report.causality_margins), tol))
    checks.append(_check("lightcone_leakage", max(report.leakages), tol))

    # --- overlaps ----------------------------------------------------------
    s_a = states.make_state(n=2)
    s_b = states.make_state(a=(2.0, 0.0, 0.0), n=2)
    closed = observables.overlap(s_a, s_b)
    brute = observables.overlap(s_a, s_b, method="quadrature")
    checks.append(_check("overlap_reduction", abs(closed - brute), tol))
    flipped = states.make_state(n=2, spin=spinor.SPIN_DOWN)
    checks.append(
        _check(
            "opposite_spin_overlap",
            abs(observables.overlap(s_a, flipped, method="quadrature")),
            tol,
        )
    )
    decays = [
        abs(
            observables.overlap(
                states.make_state(n=n), states.make_state(a=(2.0, 0.0, 0.0), n=n)
            )
        )
        for n in (2, 4, 8, 16)
    ]
    checks.append(_check("overlap_decay_ratio", _monotone_ratio(decays), tol))

    # --- nonrelativistic oracle -------------------------------------------
    nr_grid = CartesianGrid(64, 20.0)
    params = NRPacketParams(n=1, sigma=1.0, a=(0.5, 0.0, 0.0), v=(0.0, 0.0, 0.3))
    chi0 = nr_gaussian_grid(params, nr_grid)
    chi1 = nr_spectral_evolution(chi0, nr_grid, 1.0)
    err = np.abs(np.abs(chi1) ** 2 - nr_density_analytic_grid(params, nr_grid, 1.0)).max()
    checks.append(_check("nr_oracle", err, tol))
    errs = []
    for pts_per_axis in (64, 128):
        g = CartesianGrid(pts_per_axis, 12.0)
        chi = nr_gaussian_grid(NRPacketParams(n=1, v=(0.0, 0.0, 0.5)), g)
        j = nr_current(chi, g.dx)
        target = np.zeros_like(j)
        target[2] = 0.5 * np.abs(chi) ** 2
        errs.append(np.abs(j - target).max())
    order = float(np.log2(errs[0] / errs[1]))
    checks.append(_check("nr_current_order_defect", max(2.0 - order, 0.0), tol))

    # --- boosts -------------------------------------------------------------
    half = symmetry.BoostParams(rapidity=float(np.arctanh(0.5)))
    checks.append(
        _check(
            "boost_velocity_addition",
            abs(symmetry.velocity_addition(0.5, half) - 0.8),
            tol,
        )
    )
    lim = symmetry.PointDensityLimit(
        point=(0.3, -0.2, 1.7), velocity=(0.1, 0.2, 0.4), j_weight=(0.1, 0.2, 0.4)
    )
    two_step = symmetry.boost_label(
        symmetry.boost_label(lim, symmetry.BoostParams(0.3)), symmetry.BoostParams(0.9)
    )
    one_step = symmetry.boost_label(lim, symmetry.BoostParams(1.2))
    comp_err = max(
        np.abs(np.array(two_step.point) - np.array(one_step.point)).max(),
        np.abs(np.array(two_step.velocity) - np.array(one_step.velocity)).max(),
    )
    checks.append(_check("boost_composition", comp_err, tol))
    trend = []
    for n in (4, 8):
        stv = states.make_state(v=(0.0, 0.0, 0.5), n=n)
        ps = position_state_cartesian(stv, CartesianGrid(128, 12.0))
        chk = symmetry.verify_boost_against_field(
            FourVectorDensity.from_position_state(ps), stv.label, symmetry.BoostParams(0.6)
        )
        trend.append(abs(chk.weight_ratio - chk.predicted_weight_ratio))
    checks.append(_check("boost_field_trend_ratio", trend[1] / trend[0], tol))

    # --- moments -------------------------------------------------------------
    ref = states.make_state(a=(1.0, 0.0, 0.0), n=4)
    ps = position_state_cartesian(ref, CartesianGrid(64, 16.0))
    grid_mean = observables.moments(ps).mean_x
    mom_mean = observables.position_mean_from_momentum(ref)
    checks.append(
        _check("moment_consistency", float(np.abs(grid_mean - mom_mean).max()), tol)
    )
    spreads = [radial_delta_x(plain, n) for n in (2, 4, 8)]
    checks.append(_check("localization_trend_ratio", _monotone_ratio(spreads), tol))

    return checks
