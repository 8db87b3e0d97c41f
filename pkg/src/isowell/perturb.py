"""Reflection-symmetry breaking by a smooth compact bump.

The bump is added to the deformed Hamiltonian and the sum is diagonalized
in the smart basis.  Because every basis state obeys its own Schrodinger
equation exactly, the potential seen by the perturbed ground state can be
rebuilt from the expansion coefficients alone, which gives an end-to-end
check of the truncation.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import region_overlap
from .exceptions import ConfigError, ConfigWarning, DomainError
from .numerics import eig_sym, integrate

__all__ = [
    "DisturbanceParams",
    "PerturbedSpectrum",
    "LocalizationReport",
    "bump",
    "perturbed_matrix",
    "diagonalize_perturbed",
    "localization_report",
    "reconstruct_potential",
    "suggested_size",
]

DEFAULT_STATES = 10
WIDE_BUMP_STATES = 20
WIDE_BUMP_HALFWIDTH = 0.5
EDGE_MARGIN = 1.0
NODE_TOL = 1e-10


@dataclass(frozen=True)
class DisturbanceParams:
    """Bump of height `s` at `b`, supported on ``[b - c, b + c]``."""

    s: float
    b: float
    c: float

    def __post_init__(self):
        for name in ("s", "b", "c"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not self.c > 0:
            raise DomainError(f"bump half-width must be positive, got {self.c}")

    @property
    def support(self):
        return self.b - self.c, self.b + self.c


def bump(d, x):
    """``s exp(1/c^2 - 1/(c^2 - (x - b)^2))`` inside the support, else 0."""
    x = np.asarray(x, dtype=float)
    u2 = (x - d.b) ** 2
    c2 = d.c * d.c
    inside = u2 < c2
    gap = np.where(inside, c2 - u2, 1.0)
    with np.errstate(over="ignore", divide="ignore"):
        out = np.where(inside, d.s * np.exp(1.0 / c2 - 1.0 / gap), 0.0)
    return float(out) if out.ndim == 0 else out


def suggested_size(d):
    """Default basis size: 10 states, 20 for wide bumps."""
    return WIDE_BUMP_STATES if d.c > WIDE_BUMP_HALFWIDTH else DEFAULT_STATES


def perturbed_matrix(basis, d, n_states=None, spec=None):
    """``H_mn = E_m delta_mn + int Psi_m V1 Psi_n`` over the bump support.

    Raises
    ------
    ConfigError
        If the support leaves the basis box ``[-L, L]``.
    """
    n = basis.size if n_states is None else int(n_states)
    if not 0 < n <= basis.size:
        raise DomainError(f"n_states must be in 1..{basis.size}")
    spec = basis.quadrature(spec)
    L = spec.halfwidth
    lo, hi = d.support
    if lo < -L or hi > L:
        raise ConfigError(f"bump support [{lo:g}, {hi:g}] leaves the box [-{L:g}, {L:g}]")
    if lo < -L + EDGE_MARGIN or hi > L - EDGE_MARGIN:
        warnings.warn("bump support is within one unit of the truncation edge", ConfigWarning,
                      stacklevel=2)

    def integrand(x):
        v = basis.values(x, n)
        return v[:, None, :] * (v * bump(d, x))[None, :, :]

    V = integrate(integrand, lo, hi, spec)
    H = np.diag(np.asarray(basis.energies[:n], dtype=float)) + V
    return 0.5 * (H + H.T)


@dataclass(frozen=True, eq=False)
class PerturbedSpectrum:
    """Eigenpairs of the perturbed Hamiltonian in the smart basis.

    Row ``n`` of ``coeff_matrix`` holds the expansion of state ``n``.
    """

    energies: np.ndarray
    coeff_matrix: np.ndarray
    basis_size: int
    basis: object
    disturbance: DisturbanceParams

    @property
    def splitting(self):
        return float(self.energies[1] - self.energies[0])

    def coefficients(self, n, convention="basis"):
        """Expansion of state `n`.

        ``convention='analytic'`` refers the coefficients to the basis
        states with the signs of their closed-form expressions, then fixes
        the overall sign so the largest entry is positive.
        """
        row = np.array(self.coeff_matrix[n])
        if convention == "analytic":
            row = row * self.basis.analytic_signs[: self.basis_size]
            return row * _dominant_sign(row)
        if convention != "basis":
            raise DomainError(f"unknown convention {convention!r}")
        return row

    def evaluate(self, xi, n=0):
        """Value and slope of perturbed state `n` at `xi`."""
        v, dv = self.basis.evaluate(xi, self.basis_size)
        c = self.coeff_matrix[n]
        return np.tensordot(c, v, axes=(0, 0)), np.tensordot(c, dv, axes=(0, 0))


def diagonalize_perturbed(basis, d, n_states=None, spec=None):
    """Diagonalize the perturbed Hamiltonian (cyclic Jacobi).

    Eigenvectors are sign-fixed so each one's largest-magnitude coefficient
    is positive.
    """
    H = perturbed_matrix(basis, d, n_states, spec)
    eig = eig_sym(H)
    rows = eig.vectors.T.copy()
    rows *= np.array([_dominant_sign(r) for r in rows])[:, None]
    rows.setflags(write=False)
    energies = eig.values.copy()
    energies.setflags(write=False)
    return PerturbedSpectrum(energies, rows, H.shape[0], basis, d)


def _dominant_sign(row):
    return 1.0 if row[int(np.argmax(np.abs(row)))] >= 0 else -1.0


@dataclass(frozen=True)
class LocalizationReport:
    """``weights[n, k]``: probability of perturbed state n in region k."""

    regions: tuple
    weights: np.ndarray
    splitting: float

    def dominant_well(self, n):
        return int(np.argmax(self.weights[n]))


def localization_report(spec, wells, states=None, qspec=None):
    """Per-region weights of the perturbed states and the doublet splitting."""
    regions = tuple(wells.regions(spec.basis.halfwidth))
    idx = range(spec.basis_size) if states is None else states
    C = spec.coeff_matrix
    weights = np.array([[C[n] @ region_overlap(spec.basis, r, spec.basis_size, qspec) @ C[n]
                         for r in regions] for n in idx])
    return LocalizationReport(regions, weights, spec.splitting)


def reconstruct_potential(spec, basis, xi, node_tol=NODE_TOL):
    """Potential rebuilt from the perturbed ground state.

    ``U_rec = E_0 + Psi''/(2 Psi)`` with ``Psi'' = sum_n C_n 2 (U - E_n) Psi_n``
    taken from each basis state's own Schrodinger equation, so nothing is
    differentiated numerically.  Points where ``|Psi| < node_tol`` are
    returned as NaN; a scalar `xi` there raises.

    Raises
    ------
    DomainError
        Scalar `xi` at a near-node point.
    """
    basis = spec.basis if basis is None else basis
    xi = np.asarray(xi, dtype=float)
    n = spec.basis_size
    v = basis.values(xi, n)
    c = spec.coeff_matrix[0]
    U = basis.potential(xi)
    e = np.asarray(basis.energies[:n], dtype=float).reshape((n,) + (1,) * xi.ndim)
    psi = np.tensordot(c, v, axes=(0, 0))
    psi2 = np.tensordot(c, 2.0 * (U - e) * v, axes=(0, 0))
    near = np.abs(psi) < node_tol
    if xi.ndim == 0 and near:
        raise DomainError(f"ground state nearly vanishes at xi={float(xi):.6g}")
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(near, np.nan, spec.energies[0] + 0.5 * psi2 / np.where(near, 1.0, psi))
    return float(out) if out.ndim == 0 else out
