"""Floquet analysis of the dipole-driven multi-well Hamiltonian.

In the smart basis the driven Hamiltonian is
``H(tau) = diag(E) + S cos(w tau + phi0) X`` with ``X`` the dipole matrix.
Quasi-energies are eigenphases of the one-period propagator (monodromy),
folded into the fundamental domain ``[-w/2, w/2)``.  This is equivalent to
diagonalizing the Fourier-truncated Floquet matrix but has no Fourier cutoff.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .dynamics import GaussianPacket, PacketConfig, project, region_overlap
from .exceptions import DomainError
from .numerics import integrate_line, propagate_linear_ode
from .specfun import j0_first_zero

__all__ = [
    "DriveParams",
    "FloquetResult",
    "SweepTable",
    "StroboscopicResult",
    "dipole_matrix",
    "ctd_frequency",
    "ctd_amplitude",
    "monodromy",
    "quasi_energies",
    "fold",
    "floquet_spectrum",
    "sweep_quasi_energies",
    "stroboscopic_evolution",
]

UNITARITY_TOL = 1e-7
ODE_TOL = 1e-10
TRACK_AMBIGUITY = 1e-3
DEFAULT_STATES = 10


@dataclass(frozen=True)
class DriveParams:
    """Drive ``xi S cos(w tau + phi0)``; `w` is in units of omega0."""

    S: float
    w: float
    phi0: float = 0.0

    def __post_init__(self):
        for name in ("S", "w", "phi0"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if not self.w > 0:
            raise DomainError(f"drive frequency must be positive, got {self.w}")

    @property
    def period(self):
        return 2.0 * math.pi / self.w


def dipole_matrix(basis, n_states=None, spec=None):
    """``X_mn = int Psi_m xi Psi_n dxi``."""
    n = basis.size if n_states is None else int(n_states)
    if not 0 < n <= basis.size:
        raise DomainError(f"n_states must be in 1..{basis.size}")

    def integrand(x):
        v = basis.values(x, n)
        return v[:, None, :] * (v * x)[None, :, :]

    X = integrate_line(integrand, basis.quadrature(spec))
    return 0.5 * (X + X.T)


def ctd_frequency(S, r):
    """Drive frequency at which ``J0(2 S r / w)`` has its first zero.

    The sign of the dipole element depends on the basis sign convention,
    so ``|r|`` is used.
    """
    _check_positive(S, r)
    return 2.0 * S * abs(r) / j0_first_zero()


def ctd_amplitude(w, r):
    """Drive amplitude of the first tunneling-destruction point at frequency `w`."""
    _check_positive(w, r)
    return w * j0_first_zero() / (2.0 * abs(r))


def _check_positive(a, r):
    if not (math.isfinite(a) and a > 0):
        raise DomainError(f"expected a positive amplitude/frequency, got {a!r}")
    if not (math.isfinite(r) and r != 0):
        raise DomainError(f"dipole element must be finite and nonzero, got {r!r}")


def _driven_hamiltonian(energies, X, drive):
    E = np.diag(np.asarray(energies, dtype=float))

    def H(tau):
        return E + drive.S * math.cos(drive.w * tau + drive.phi0) * X

    return H


def monodromy(basis, drive, n_states=DEFAULT_STATES, tol=ODE_TOL, X=None, spec=None):
    """One-period propagator ``U(T_d)`` in the first `n_states` basis states.

    All columns are propagated together from the identity.
    """
    n = int(n_states)
    if X is None:
        X = dipole_matrix(basis, n, spec)
    H = _driven_hamiltonian(basis.energies[:n], X[:n, :n], drive)
    return propagate_linear_ode(H, np.eye(n, dtype=complex), 0.0, drive.period, tol)


def fold(eps, w):
    """Map energies into the fundamental domain ``[-w/2, w/2)``."""
    eps = np.asarray(eps, dtype=float)
    out = np.mod(eps + 0.5 * w, w) - 0.5 * w
    # mod can return w itself for inputs a hair below a zone edge
    out = np.where(out >= 0.5 * w, out - w, out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class FloquetResult:
    """Quasi-energies (ascending) and matching monodromy eigenvectors.

    ``doublet`` is ``(i, j, splitting)`` for the two modes carrying the most
    weight on the undriven tunnel doublet (basis states 0 and 1).
    ``closest_pair`` is the pair of neighbouring levels with the smallest
    gap.  ``ambiguous`` is set when the two disagree or when the smallest
    gap is tied within the tracking tolerance; nothing is silently chosen.
    """

    quasi_energies: np.ndarray
    modes: np.ndarray
    w: float
    doublet: tuple
    closest_pair: tuple
    ambiguous: bool = False

    @property
    def splitting(self):
        return self.doublet[2]


def quasi_energies(U, w):
    """Eigenphase quasi-energies ``-arg(lambda) / T_d`` of a monodromy."""
    U = np.asarray(U, dtype=complex)
    n = U.shape[0]
    defect = np.abs(U.conj().T @ U - np.eye(n)).max()
    if defect > UNITARITY_TOL:
        raise DomainError(f"monodromy is not unitary (defect {defect:.3g})")
    lam, vec = np.linalg.eig(U)
    period = 2.0 * math.pi / w
    eps = np.atleast_1d(fold(-np.angle(lam) / period, w))
    order = np.argsort(eps, kind="stable")
    eps = eps[order]
    vec = vec[:, order]
    vec = vec / np.linalg.norm(vec, axis=0)
    closest, tied = _closest_pair(eps, w)
    doublet = _tunnel_pair(eps, vec, w)
    ambiguous = tied or set(closest[:2]) != set(doublet[:2])
    eps.setflags(write=False)
    return FloquetResult(eps, vec, float(w), doublet, closest, bool(ambiguous))


def _gap(a, b, w):
    d = abs(a - b)
    return min(d, w - d)


def _closest_pair(eps, w):
    n = eps.size
    if n < 2:
        return (0, 0, float("nan")), False
    # neighbours on the circle of circumference w
    gaps = np.append(np.diff(eps), eps[0] + w - eps[-1])
    order = np.argsort(gaps, kind="stable")
    k = int(order[0])
    tied = n > 2 and gaps[order[1]] - gaps[k] <= TRACK_AMBIGUITY * max(gaps[k], 1e-300)
    return (k, (k + 1) % n, float(gaps[k])), bool(tied)


def _tunnel_pair(eps, vec, w):
    if eps.size < 2:
        return (0, 0, float("nan"))
    weight = np.sum(np.abs(vec[:2]) ** 2, axis=0)
    i, j = sorted(int(k) for k in np.argsort(-weight, kind="stable")[:2])
    return (i, j, float(_gap(eps[i], eps[j], w)))


def floquet_spectrum(basis, drive, n_states=DEFAULT_STATES, tol=ODE_TOL, spec=None):
    """Monodromy and quasi-energies in one call."""
    U = monodromy(basis, drive, n_states, tol, spec=spec)
    return quasi_energies(U, drive.w)


@dataclass(frozen=True, eq=False)
class SweepTable:
    """Quasi-energies tracked along an amplitude sweep.

    ``levels[k, l]`` is the quasi-energy of track ``l`` at ``S_grid[k]``;
    tracks are labelled by their order at the first grid point.
    ``crossings`` lists ``(k, l1, l2)`` where matching was ambiguous.
    ``doublet_gaps[k]`` is the splitting of the tunnel doublet identified
    afresh at each grid point (see `FloquetResult`), which stays on the
    doublet through avoided crossings that overlap tracking follows
    adiabatically.
    """

    S_grid: np.ndarray
    levels: np.ndarray
    crossings: tuple
    w: float
    doublet_gaps: np.ndarray

    def rows(self):
        """``(S, level_id, epsilon)`` records, one per grid point and track."""
        return [(float(S), l, float(e)) for S, lv in zip(self.S_grid, self.levels)
                for l, e in enumerate(lv)]

    def gap(self, l1, l2):
        """Circular distance between two tracks along the sweep."""
        d = np.abs(self.levels[:, l1] - self.levels[:, l2])
        return np.minimum(d, self.w - d)

    def gap_minimum(self, l1=None, l2=None):
        """Amplitude of the smallest gap, refined by a parabola through neighbours.

        Defaults to the tunnel-doublet splitting.
        """
        g = self.doublet_gaps if l1 is None or l2 is None else self.gap(l1, l2)
        k = int(np.argmin(g))
        if 0 < k < g.size - 1:
            s = self.S_grid[k - 1:k + 2]
            coef = np.polyfit(s, g[k - 1:k + 2], 2)
            if coef[0] > 0:
                vertex = -coef[1] / (2.0 * coef[0])
                if s[0] <= vertex <= s[2]:
                    return float(vertex)
        return float(self.S_grid[k])


def sweep_quasi_energies(basis, w, S_grid, n_states=DEFAULT_STATES, phi0=0.0, tol=ODE_TOL,
                         spec=None):
    """Quasi-energies over an ascending amplitude grid with overlap tracking.

    Adjacent grid points are matched by maximal mode overlap
    ``|<Phi_a(S_k)|Phi_b(S_k+1)>|``; when a track's two best overlaps differ
    by less than 1e-3 the step is flagged as a crossing.
    """
    S_grid = np.asarray(S_grid, dtype=float)
    if S_grid.ndim != 1 or S_grid.size == 0 or not np.all(np.isfinite(S_grid)):
        raise DomainError("S_grid must be a non-empty finite 1-D array")
    if np.any(np.diff(S_grid) <= 0) or S_grid[0] < 0 or S_grid[-1] > 1:
        raise DomainError("S_grid must be strictly ascending within [0, 1]")
    n = int(n_states)
    X = dipole_matrix(basis, n, spec)
    levels = np.empty((S_grid.size, n))
    crossings = []
    prev = None
    gaps = np.empty(S_grid.size)
    for k, S in enumerate(S_grid):
        res = quasi_energies(monodromy(basis, DriveParams(S, w, phi0), n, tol, X), w)
        modes, eps = res.modes, res.quasi_energies
        if prev is not None:
            O = np.abs(prev.conj().T @ modes)
            rows, cols = linear_sum_assignment(-O)
            perm = cols[np.argsort(rows)]
            modes, eps = modes[:, perm], eps[perm]
            O = O[:, perm]
            top2 = -np.sort(-O, axis=1)[:, :2]
            for l in np.nonzero(top2[:, 0] - top2[:, 1] < TRACK_AMBIGUITY)[0]:
                other = int(np.argsort(-O[l])[1])
                crossings.append((k, int(l), other))
        gaps[k] = res.doublet[2]
        levels[k] = eps
        prev = modes
    levels.setflags(write=False)
    gaps.setflags(write=False)
    return SweepTable(S_grid, levels, tuple(crossings), float(w), gaps)


@dataclass(frozen=True, eq=False)
class StroboscopicResult:
    """Packet sampled at ``tau = n T_d``.

    ``coeffs[n]`` are the basis coefficients and ``density[n]`` the
    modulus on the requested grid.
    """

    taus: np.ndarray
    coeffs: np.ndarray
    density: np.ndarray
    basis: object
    captured_norm: float

    def probability(self, region, spec=None):
        M = region_overlap(self.basis, region, self.coeffs.shape[1], spec)
        return np.real(np.einsum("km,mn,kn->k", self.coeffs.conj(), M, self.coeffs))


def stroboscopic_evolution(packet_cfg, basis, drive, n_periods, xi_grid, n_states=DEFAULT_STATES,
                           tol=ODE_TOL, spec=None):
    """Evolve a packet by whole drive periods through the Floquet modes."""
    if int(n_periods) < 1:
        raise DomainError("n_periods must be at least 1")
    packet = GaussianPacket(packet_cfg) if isinstance(packet_cfg, PacketConfig) else packet_cfg
    state = project(packet, basis, n_states, spec)  # warns on poor capture
    U = monodromy(basis, drive, n_states, tol, spec=spec)
    lam, V = np.linalg.eig(U)
    amp = np.linalg.solve(V, state.coeffs)
    steps = np.arange(int(n_periods) + 1)
    coeffs = (lam[None, :] ** steps[:, None] * amp[None, :]) @ V.T
    xi = np.asarray(xi_grid, dtype=float)
    density = np.abs(coeffs @ basis.values(xi, n_states))
    return StroboscopicResult(steps * drive.period, coeffs, density, basis, state.captured_norm)
