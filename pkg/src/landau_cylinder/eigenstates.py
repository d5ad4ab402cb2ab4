"""Landau eigenstates on the cylinder and periodized planar states.

In the gauge A_x = -B y + phi / l each x mode j sees a shifted harmonic
well: completing the square in the mode Hamiltonian

    h_j = p_y^2 / 2m + (hbar kappa_j - q A_x(y) / c)^2 / 2m

gives an oscillator of frequency omega = qB/mc centered at

    y_c(j) = phi / (l B) - hbar kappa_j c / (q B),

with energies E_n = hbar omega (n + 1/2) independent of j.  Adjacent mode
centers are spaced by -hc/(qBl); threading one extra flux quantum slides
every center up by one spacing (spectral flow j -> j - 1).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import ConfigError, CylinderGrid, ModeStack, PhysicsConfig, Wavefunction

__all__ = [
    "hermite_profile",
    "oscillator_profiles",
    "mode_center",
    "landau_energy",
    "landau_eigenstate",
    "displaced_gaussian",
    "LandauLevelState",
    "eigen_table",
    "PlanarCoherentState",
    "periodized_planar_state",
]


def oscillator_profiles(
    cfg: PhysicsConfig, y: np.ndarray, center: float, n_max: int
) -> np.ndarray:
    """Normalized oscillator eigenfunctions phi_0..phi_n_max, stacked.

    Uses the stable two-term recurrence on the *normalized* functions,

        phi_n = sqrt(2/n) xi phi_{n-1} - sqrt((n-1)/n) phi_{n-2},

    with xi = (y - center) sqrt(m omega / hbar), which avoids the
    catastrophic growth of raw Hermite polynomials.
    """
    scale = np.sqrt(cfg.m * cfg.omega / cfg.hbar)
    xi = (np.asarray(y) - center) * scale
    out = np.zeros((n_max + 1,) + xi.shape)
    out[0] = (cfg.m * cfg.omega / (np.pi * cfg.hbar)) ** 0.25 * np.exp(-0.5 * xi**2)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * xi * out[0]
    for n in range(2, n_max + 1):
        out[n] = np.sqrt(2.0 / n) * xi * out[n - 1] - np.sqrt((n - 1.0) / n) * out[n - 2]
    return out  # the (m omega / pi hbar)^{1/4} prefactor gives unit L2 norm in y


def hermite_profile(cfg: PhysicsConfig, y: np.ndarray, center: float, n: int) -> np.ndarray:
    """Single normalized oscillator eigenfunction phi_n(y - center)."""
    if n < 0:
        raise ConfigError(f"level index must be non-negative (got {n})")
    return oscillator_profiles(cfg, y, center, n)[n]


def mode_center(cfg: PhysicsConfig, j: int, phi=None, mode_offset: float = 0.0) -> float:
    """Guiding-center position y_c of mode j at flux phi (default cfg.phi0)."""
    phi = cfg.phi0 if phi is None else phi
    kappa = 2.0 * np.pi * (j + mode_offset) / cfg.l
    return phi / (cfg.l * cfg.B) - cfg.hbar * kappa * cfg.c / (cfg.q * cfg.B)


def landau_energy(cfg: PhysicsConfig, n: int) -> float:
    """E_n = hbar omega (n + 1/2); degenerate in the mode index."""
    return cfg.hbar * cfg.omega * (n + 0.5)


def _check_support(grid: CylinderGrid, center: float, n: int, l_B: float) -> None:
    margin = (n + 4) * l_B
    if center - margin < grid.y_min or center + margin > grid.y_max:
        raise ConfigError(
            f"state support [{center - margin:.2f}, {center + margin:.2f}] too close "
            f"to the y window [{grid.y_min}, {grid.y_max}]"
        )


def _single_mode_state(
    grid: CylinderGrid, j: int, profile: np.ndarray, mode_offset: float
) -> Wavefunction:
    profiles = np.zeros((grid.Nx, grid.Ny), dtype=complex)
    profiles[grid.mode_row(j)] = profile
    psi = Wavefunction.from_modes(ModeStack(grid, profiles, mode_offset))
    return psi.normalized()


def landau_eigenstate(
    cfg: PhysicsConfig,
    grid: CylinderGrid,
    n: int,
    j: int,
    phi=None,
    mode_offset: float = 0.0,
) -> Wavefunction:
    """Eigenstate e^{i kappa_j x} phi_n(y - y_c(j)) / sqrt(l), grid normalized."""
    if n < 0:
        raise ConfigError(f"level index must be non-negative (got {n})")
    center = mode_center(cfg, j, phi, mode_offset)
    _check_support(grid, center, n, cfg.magnetic_length)
    profile = hermite_profile(cfg, grid.y, center, n).astype(complex)
    return _single_mode_state(grid, j, profile, mode_offset)


def displaced_gaussian(
    cfg: PhysicsConfig,
    grid: CylinderGrid,
    j: int,
    center: float,
    momentum: float = 0.0,
    n: int = 0,
    mode_offset: float = 0.0,
) -> Wavefunction:
    """Displaced level-n eigenstate (a coherent state for n = 0) in mode j."""
    _check_support(grid, center, n, cfg.magnetic_length)
    profile = hermite_profile(cfg, grid.y, center, n) * np.exp(
        1j * momentum * (grid.y - center) / cfg.hbar
    )
    return _single_mode_state(grid, j, profile, mode_offset)


@dataclass(frozen=True)
class LandauLevelState:
    """Catalog row for one (n, j) eigenstate."""

    n: int
    j: int
    kappa: float
    y_center: float
    energy: float

    def build(self, cfg: PhysicsConfig, grid: CylinderGrid) -> Wavefunction:
        return landau_eigenstate(cfg, grid, self.n, self.j)


def eigen_table(
    cfg: PhysicsConfig, grid: CylinderGrid, n_max: int, j_max: int
) -> list[LandauLevelState]:
    """All (n, j) with n <= n_max and |j| <= j_max, ordered by (n, j)."""
    rows = []
    for n in range(n_max + 1):
        for j in range(-j_max, j_max + 1):
            rows.append(
                LandauLevelState(
                    n=n,
                    j=j,
                    kappa=2.0 * np.pi * j / cfg.l,
                    y_center=mode_center(cfg, j),
                    energy=landau_energy(cfg, n),
                )
            )
    return rows


@dataclass(frozen=True)
class PlanarCoherentState:
    """Ground-level coherent state of the planar Landau problem.

    In the planar problem (same gauge, x unrestricted) the lowest-level
    coherent state centered at (x0, y0) has the closed form

        Psi(x, y) = exp[i kappa_0 x - i (x-x0)(y-y0) / (2 lB^2)]
                    exp[-((x-x0)^2 + (y-y0)^2) / (4 lB^2)],

    with kappa_0 = q phi/(hbar l c) - y0/lB^2 picked so the guiding center
    sits at y0.  It is a Gaussian superposition over the continuous mode
    wavevector, hence an exact E_0 eigenstate, localized isotropically with
    density width lB.  Shrinks as B grows.
    """

    x0: float
    y0: float

    def x_sigma(self, cfg: PhysicsConfig) -> float:
        return cfg.magnetic_length

    def evaluate(self, cfg: PhysicsConfig, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        lb2 = cfg.magnetic_length**2
        kappa0 = cfg.q * cfg.phi0 / (cfg.hbar * cfg.l * cfg.c) - self.y0 / lb2
        dx = x - self.x0
        dy = y - self.y0
        return np.exp(
            1j * kappa0 * x - 1j * dx * dy / (2.0 * lb2) - (dx**2 + dy**2) / (4.0 * lb2)
        )


def periodized_planar_state(
    cfg: PhysicsConfig,
    grid: CylinderGrid,
    planar,
    terms: int | None = None,
    overlap_tol: float = 1e-6,
) -> Wavefunction:
    """Wrap a localized planar eigenstate onto the cylinder.

    Superposes plain x translates, C sum_k Psi(x - k l, y), which commutes
    with the x-translation-invariant Hamiltonian, so eigenstates periodize
    to eigenstates.  The planar state must be localized well inside one
    circumference; if adjacent translates overlap by more than overlap_tol
    (relative) a warning is emitted but the sum is still returned.

    `planar` needs an ``evaluate(cfg, x, y) -> complex array`` method and an
    ``x_sigma(cfg) -> float`` width estimate (PlanarCoherentState, or any
    object with the same duck type).
    """
    sigma = planar.x_sigma(cfg)
    if sigma >= cfg.l / 2.0:
        raise ConfigError(
            f"planar state x width {sigma:.3f} is not localized within half a "
            f"circumference {cfg.l / 2:.3f}"
        )
    if terms is None:
        terms = int(np.ceil(6.0 * sigma / cfg.l)) + 1

    X = grid.x[:, None]
    Y = grid.y[None, :]
    u = np.zeros((grid.Nx, grid.Ny), dtype=complex)
    for k in range(-terms, terms + 1):
        u += planar.evaluate(cfg, X - k * cfg.l, Y)

    # Relative overlap of neighbor translates, on a doubled non-periodic
    # x window so the cross term is fully captured.
    x_wide = np.concatenate([grid.x - cfg.l, grid.x])[:, None]
    f0 = planar.evaluate(cfg, x_wide, Y)
    f1 = planar.evaluate(cfg, x_wide - cfg.l, Y)
    norm0 = np.sum(np.abs(f0) ** 2)
    overlap = abs(np.vdot(f0, f1)) / norm0 if norm0 > 0 else 0.0
    if overlap > overlap_tol:
        warnings.warn(
            f"adjacent periodization terms overlap at {overlap:.2e} "
            f"(tolerance {overlap_tol:.0e}); the result is still an eigenstate "
            "but no longer resembles the planar input",
            stacklevel=2,
        )

    return Wavefunction(grid, u).normalized()
