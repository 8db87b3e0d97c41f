"""Exactly solvable multi-well Hamiltonians isospectral to the oscillator.

Two levels ``E_-1 = nu + 1/2`` and ``E_-2 = mu + 1/2`` are added below the
harmonic-oscillator ladder by a second-order Darboux/Crum transformation.
The deformed potential has two or three wells whose shape is set by the
free parameters ``lambda1``, ``lambda2`` while the spectrum stays fixed.
Its exact eigenstates form the "smart basis" used for tunneling dynamics,
symmetry-breaking perturbations and Floquet analysis of a driven system.

Subpackages are flat modules:

- `isowell.specfun`: parabolic cylinder functions, gamma, Bessel J0.
- `isowell.numerics`: adaptive quadrature, Jacobi eigensolver, ODE propagation.
- `isowell.model`: potential, wells and the orthonormal smart basis.
- `isowell.dynamics`: wave packets and well probabilities.
- `isowell.perturb`: compact bump perturbation and localization.
- `isowell.floquet`: monodromy, quasi-energies, amplitude sweeps.
- `isowell.estimators`: scikit-learn style front ends.
- `isowell.cli`: the ``isowell`` command.
"""

__version__ = "0.1.0"

from .exceptions import (CapturedNormWarning, ConfigError, ConfigWarning, ConstructionError,
                         ConvergenceError, DomainError, IsowellError, SingularPotentialError,
                         StiffnessError)
from .model import (BasisSet, DeformationParams, IsospectralModel, OscillatorBasis, WellStructure,
                    build_basis, classify_wells, potential, spectrum)
from .dynamics import (PacketConfig, SpectralState, evolve, project, region_overlap,
                       two_level_probability, well_probability)
from .perturb import DisturbanceParams, PerturbedSpectrum, diagonalize_perturbed, localization_report
from .floquet import (DriveParams, FloquetResult, floquet_spectrum, monodromy, quasi_energies,
                      stroboscopic_evolution, sweep_quasi_energies)
from .estimators import FloquetSolver, PerturbedHamiltonian, SmartBasis

__all__ = [
    "__version__",
    "IsowellError", "DomainError", "ConvergenceError", "StiffnessError", "SingularPotentialError",
    "ConstructionError", "ConfigError", "ConfigWarning", "CapturedNormWarning",
    "DeformationParams", "WellStructure", "IsospectralModel", "BasisSet", "OscillatorBasis",
    "build_basis", "classify_wells", "potential", "spectrum",
    "PacketConfig", "SpectralState", "project", "evolve", "region_overlap", "well_probability",
    "two_level_probability",
    "DisturbanceParams", "PerturbedSpectrum", "diagonalize_perturbed", "localization_report",
    "DriveParams", "FloquetResult", "monodromy", "quasi_energies", "floquet_spectrum",
    "sweep_quasi_energies", "stroboscopic_evolution",
    "SmartBasis", "PerturbedHamiltonian", "FloquetSolver",
]
