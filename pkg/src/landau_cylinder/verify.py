"""Fast self-consistency checks over the whole stack.

Each check runs at reduced scale (coarse grids, short drives) and returns
(name, passed, detail).  They are meant as a smoke screen after install or
refactor, not as the acceptance suite: a few seconds total, everything
deterministic given the seed.
"""

from __future__ import annotations

import numpy as np

from .core import CylinderGrid, PhysicsConfig, Wavefunction, inner_product, wrap_angle
from .drive import DriveProtocol, drift_displacement
from .eigenstates import displaced_gaussian, landau_eigenstate, landau_energy, mode_center
from .magtrans import (
    Displacement,
    PathPolyline,
    apply_displacement,
    compose_phase,
    path_ordered_translation,
    translate_x,
)
from .propagator import apply_hamiltonian, evolve_oracle, evolve_tdse

__all__ = ["run_all_checks", "CHECKS"]


def _random_state(cfg, grid, rng, n_modes=3):
    """Random low-lying superposition, well inside the window."""
    psi = None
    for _ in range(n_modes):
        n = int(rng.integers(0, 3))
        j = int(rng.integers(-2, 3))
        c = complex(rng.normal(), rng.normal())
        term = landau_eigenstate(cfg, grid, n, j) * c
        psi = term if psi is None else Wavefunction(
            grid, psi.amplitudes + term.amplitudes, psi.mode_offset
        )
    return psi.normalized()


def check_parseval(cfg, grid, rng):
    psi = _random_state(cfg, grid, rng)
    stack = psi.to_modes()
    total = float(np.sum(stack.mode_norms_sq()))
    err = abs(total - psi.norm_sq())
    return err < 1e-12, f"mode-sum vs grid norm mismatch {err:.2e}"


def check_topological_x_translation(cfg, grid, rng):
    """Full-circumference translation is exactly the flux phase."""
    worst = 0.0
    for phi in (0.0, np.pi / 2, 3.7):
        c = PhysicsConfig(cfg.hbar, cfg.q, cfg.m, cfg.c, cfg.B, phi, cfg.l)
        psi = _random_state(c, grid, rng)
        moved = translate_x(psi, c.l, c)
        expected = psi * np.exp(1j * c.flux_phase(phi))
        worst = max(worst, float(np.max(np.abs(moved.amplitudes - expected.amplitudes))))
    return worst < 1e-12, f"worst amplitude deviation {worst:.2e}"


def check_composition_rule(cfg, grid, rng):
    """M(R2) M(R1) = exp(-i q B (R1 x R2) / 2 hbar c) M(R1 + R2)."""
    worst = 0.0
    for _ in range(5):
        r1 = Displacement(*rng.uniform(-1.0, 1.0, 2))
        r2 = Displacement(*rng.uniform(-1.0, 1.0, 2))
        psi = _random_state(cfg, grid, rng)
        seq = apply_displacement(apply_displacement(psi, r1, cfg), r2, cfg)
        direct = apply_displacement(psi, r1 + r2, cfg)
        expected = direct * np.exp(1j * compose_phase(r1, r2, cfg))
        worst = max(worst, float(np.max(np.abs(seq.amplitudes - expected.amplitudes))))
    return worst < 1e-9, f"worst composition deviation {worst:.2e}"


def check_energy_invariance(cfg, grid, rng):
    """Quantized translations commute with the static Hamiltonian."""
    psi = _random_state(cfg, grid, rng)
    step = cfg.translation_step
    moved = apply_displacement(psi, Displacement(0.0, -2.0 * step), cfg)
    e0 = _energy(psi, cfg)
    e1 = _energy(moved, cfg)
    err = abs(e1 - e0)
    return err < 1e-9, f"energy shift under quantized y-translation {err:.2e}"


def _energy(psi, cfg):
    hpsi = apply_hamiltonian(psi, cfg)
    return float(np.real(inner_product(psi, hpsi)) / psi.norm_sq())


def check_eigenstate_residual(cfg, grid, rng):
    worst = 0.0
    for (n, j) in ((0, 0), (1, -1), (2, 1)):
        psi = landau_eigenstate(cfg, grid, n, j)
        hpsi = apply_hamiltonian(psi, cfg)
        e = landau_energy(cfg, n)
        resid = Wavefunction(grid, hpsi.amplitudes - e * psi.amplitudes, psi.mode_offset)
        worst = max(worst, resid.norm())
    return worst < 1e-8, f"worst |H psi - E psi| = {worst:.2e}"


def check_spectral_flow(cfg, grid, rng):
    """Adding one flux quantum maps state (n, j) onto the old (n, j - 1)."""
    c2 = PhysicsConfig(cfg.hbar, cfg.q, cfg.m, cfg.c, cfg.B, cfg.phi0 + cfg.flux_quantum, cfg.l)
    a = landau_eigenstate(c2, grid, 0, 0)
    b = landau_eigenstate(cfg, grid, 0, -1)
    err = float(np.max(np.abs(np.abs(a.amplitudes) - np.abs(b.amplitudes))))
    dc = abs(mode_center(c2, 0) - mode_center(cfg, -1))
    return err < 1e-10 and dc < 1e-12, f"profile dev {err:.2e}, center dev {dc:.2e}"


def check_swept_area(cfg, grid, rng):
    t = np.linspace(0.0, 2 * np.pi, 1025)
    circle = PathPolyline(tuple(zip(np.cos(t) - 1.0, np.sin(t))))
    err = abs(circle.swept_area() - np.pi)
    return err < 1e-4, f"unit-circle shoelace area off by {err:.2e}"


def check_drift_quadrature(cfg, grid, rng):
    """Closed-form drive displacement vs direct quadrature of the fields."""
    path = PathPolyline(((0.0, 0.0), (1.0, 0.5), (0.0, 0.0)))
    proto = DriveProtocol.from_path(cfg, path, T=8.0)
    worst = 0.0
    for t in (1.7, 4.0, 7.3):
        rx, ry = proto.displacement(t)
        b = drift_displacement(proto, t)
        worst = max(worst, abs(float(rx) - b.rx), abs(float(ry) - b.ry))
    return worst < 1e-9, f"displacement mismatch {worst:.2e}"


def check_tdse_vs_oracle(cfg, grid, rng):
    psi0 = displaced_gaussian(cfg, grid, j=0, center=mode_center(cfg, 0) + 0.4)
    path = PathPolyline(((0.0, 0.0), (0.8, 0.6), (0.0, 0.0)))
    proto = DriveProtocol.from_path(cfg, path, T=6.0, dt=0.002)
    num = evolve_tdse(psi0, proto).final_state
    ora = evolve_oracle(psi0, proto).final_state
    overlap = inner_product(num, ora)
    infid = abs(1.0 - abs(overlap))
    dphase = abs(np.angle(overlap))
    return infid < 1e-7 and dphase < 1e-5, f"infidelity {infid:.2e}, phase gap {dphase:.2e}"


def check_norm_conservation(cfg, grid, rng):
    psi0 = landau_eigenstate(cfg, grid, 0, 0)
    proto = DriveProtocol.from_path(cfg, PathPolyline(((0.0, 0.0), (cfg.l, 0.0))), T=10.0)
    rec = evolve_tdse(psi0, proto)
    return rec.norm_drift < 1e-10, f"norm drift {rec.norm_drift:.2e}"


def check_step_halving(cfg, grid, rng):
    """Global error of the splitting drops like dt^2."""
    psi0 = displaced_gaussian(cfg, grid, j=0, center=mode_center(cfg, 0) + 0.3)
    path = PathPolyline(((0.0, 0.0), (0.6, 0.4), (0.0, 0.0)))
    proto_ref = DriveProtocol.from_path(cfg, path, T=4.0, dt=0.0005)
    ref = evolve_tdse(psi0, proto_ref).final_state
    errs = []
    for dt in (0.008, 0.004):
        proto = DriveProtocol.from_path(cfg, path, T=4.0, dt=dt)
        out = evolve_tdse(psi0, proto).final_state
        errs.append(float(np.linalg.norm(out.amplitudes - ref.amplitudes)))
    ratio = errs[0] / errs[1]
    return 3.0 < ratio < 5.0, f"halving ratio {ratio:.2f} (want ~4)"


def check_berry_phase_short(cfg, grid, rng):
    """One fast winding loop: phase lands near q phi / hbar c after the
    drift-action subtraction, well inside the coarse tolerance."""
    from .experiments import run_ab_loop

    res = run_ab_loop(cfg, grid, phi=np.pi / 2, T=50.0 / cfg.omega, min_fidelity=0.9)
    err = abs(wrap_angle(res.gamma_measured - res.gamma_predicted))
    return err < 5e-2, f"phase error {err:.2e} at T = 50 cyclotron periods"


def check_path_phase_bookkeeping(cfg, grid, rng):
    """Path-ordered product collapses to net translation x area phase."""
    psi = _random_state(cfg, grid, rng)
    path = PathPolyline(((0.0, 0.0), (0.7, 0.0), (0.7, 0.5), (0.0, 0.5), (0.0, 0.0)))
    out = path_ordered_translation(psi, path, cfg)
    # contractible loop: state must return to itself up to the area phase
    total = out.state * np.exp(1j * out.accumulated_phase)
    overlap = inner_product(psi, total)
    err = abs(overlap / psi.norm_sq() - np.exp(-1j * cfg.q * cfg.B * 0.35 / (cfg.hbar * cfg.c)))
    err2 = abs(out.accumulated_phase - (-cfg.q * cfg.B * 0.35 / (cfg.hbar * cfg.c)))
    return err < 1e-9 and err2 < 1e-12, f"loop phase dev {err:.2e}, area phase dev {err2:.2e}"


CHECKS = (
    ("parseval", check_parseval),
    ("topological_x_translation", check_topological_x_translation),
    ("composition_rule", check_composition_rule),
    ("energy_invariance", check_energy_invariance),
    ("eigenstate_residual", check_eigenstate_residual),
    ("spectral_flow", check_spectral_flow),
    ("swept_area", check_swept_area),
    ("drift_quadrature", check_drift_quadrature),
    ("tdse_vs_oracle", check_tdse_vs_oracle),
    ("norm_conservation", check_norm_conservation),
    ("step_halving", check_step_halving),
    ("path_phase_bookkeeping", check_path_phase_bookkeeping),
    ("berry_phase_short", check_berry_phase_short),
)


def run_all_checks(seed: int = 0):
    """Run every check on the reference setup; returns (name, ok, detail) rows."""
    cfg = PhysicsConfig.reference()
    grid = CylinderGrid.for_config(cfg)
    results = []
    for name, fn in CHECKS:
        rng = np.random.default_rng(seed)
        try:
            ok, detail = fn(cfg, grid, rng)
        except Exception as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
