"""Driven Landau states on a flux-threaded cylinder.

Numerical laboratory for adiabatic transport of Landau-level eigenstates
on a 2D cylinder threaded by an axial flux: magnetic translation algebra,
exact mode-space time evolution, and geometric-phase readout for loops
that wind around the cylinder, sweep local area, or both.
"""

from .core import (
    ConfigError,
    CylinderGrid,
    GridMismatchError,
    ModeOffsetMismatchError,
    ModeStack,
    NonCyclicEvolutionError,
    PhysicsConfig,
    TruncationError,
    Wavefunction,
    inner_product,
    wrap_angle,
)
from .drive import DriveProtocol, SegmentSchedule, drift_displacement
from .eigenstates import (
    LandauLevelState,
    PlanarCoherentState,
    displaced_gaussian,
    eigen_table,
    landau_eigenstate,
    landau_energy,
    mode_center,
    oscillator_profiles,
    periodized_planar_state,
)
from .experiments import (
    ExperimentResult,
    Fig1Comparison,
    LoopSpec,
    StudyResult,
    StudyRow,
    SweepResult,
    ab_loop_spec,
    adiabatic_study,
    berry_phase,
    excursion_loop_spec,
    fig1_loop_spec,
    flux_sweep,
    rectangle_loop_spec,
    run_ab_loop,
    run_fig1_comparison,
    run_general_loop,
    run_loop,
)
from .magtrans import (
    Displacement,
    PathPolyline,
    TranslationResult,
    apply_displacement,
    compose_phase,
    path_ordered_translation,
    sequential_translation,
    translate_x,
    translate_y,
)
from .propagator import (
    EvolutionRecord,
    FactorizationReport,
    OracleResult,
    apply_hamiltonian,
    evolve_oracle,
    evolve_tdse,
    expectation_energy,
    factorized_evolution,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "CylinderGrid",
    "GridMismatchError",
    "ModeOffsetMismatchError",
    "ModeStack",
    "NonCyclicEvolutionError",
    "PhysicsConfig",
    "TruncationError",
    "Wavefunction",
    "inner_product",
    "wrap_angle",
    "DriveProtocol",
    "SegmentSchedule",
    "drift_displacement",
    "LandauLevelState",
    "PlanarCoherentState",
    "displaced_gaussian",
    "eigen_table",
    "landau_eigenstate",
    "landau_energy",
    "mode_center",
    "oscillator_profiles",
    "periodized_planar_state",
    "ExperimentResult",
    "Fig1Comparison",
    "LoopSpec",
    "StudyResult",
    "StudyRow",
    "SweepResult",
    "ab_loop_spec",
    "adiabatic_study",
    "berry_phase",
    "excursion_loop_spec",
    "fig1_loop_spec",
    "flux_sweep",
    "rectangle_loop_spec",
    "run_ab_loop",
    "run_fig1_comparison",
    "run_general_loop",
    "run_loop",
    "Displacement",
    "PathPolyline",
    "TranslationResult",
    "apply_displacement",
    "compose_phase",
    "path_ordered_translation",
    "sequential_translation",
    "translate_x",
    "translate_y",
    "EvolutionRecord",
    "FactorizationReport",
    "OracleResult",
    "apply_hamiltonian",
    "evolve_oracle",
    "evolve_tdse",
    "expectation_energy",
    "factorized_evolution",
    "__version__",
]
