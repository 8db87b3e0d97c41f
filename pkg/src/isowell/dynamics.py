"""Wave-packet tunneling in the smart basis.

A packet is projected once onto the eigenbasis; after that every time is
reached exactly through the phases ``exp(-i E_n tau)``, with ``tau`` the
dimensionless time ``omega0 t``.  Well probabilities reuse one overlap matrix
per (basis, region) pair.
"""

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exceptions import CapturedNormWarning, DomainError
from .numerics import find_extrema, integrate

__all__ = [
    "PacketConfig",
    "GaussianPacket",
    "SpectralState",
    "PRESET_PACKETS",
    "gaussian_packet",
    "project",
    "evolve",
    "region_overlap",
    "well_probability",
    "well_regions",
    "two_level_probability",
    "density_surface",
    "recurrence_time",
]

CAPTURED_NORM_WARN = 0.99
NORM_SLACK = 1e-8
# exp(+-2 R) must stay finite in the packet formula
MAX_SQUEEZE = 300.0


@dataclass(frozen=True)
class PacketConfig:
    """Gaussian packet of width ``exp(-R)`` centred at `xi0`."""

    R: float
    xi0: float

    def __post_init__(self):
        if not (math.isfinite(self.R) and math.isfinite(self.xi0)):
            raise DomainError("packet parameters must be finite")
        if not abs(self.R) < MAX_SQUEEZE:
            raise DomainError(f"packet width exp(-R) is not representable for R={self.R}")

    @property
    def width(self):
        return math.exp(-self.R)


# packet centres at the right-well minimum of the Lambda=1 and Lambda=0.5 models
PRESET_PACKETS = {
    "symmetric": PacketConfig(R=0.75, xi0=1.525),
    "asymmetric": PacketConfig(R=0.75, xi0=1.607),
}


class GaussianPacket:
    """``(e^{2R}/pi)^{1/4} exp(-(xi - xi0)^2 e^{2R} / 2)``, unit L2 norm."""

    def __init__(self, cfg):
        self.cfg = cfg
        self._k = math.exp(2.0 * cfg.R)
        self._amp = (self._k / math.pi) ** 0.25

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        return self._amp * np.exp(-0.5 * self._k * (xi - self.cfg.xi0) ** 2)

    def support(self, decades=16):
        """Interval outside which the packet is below ``10**-decades``."""
        half = self.cfg.width * math.sqrt(2.0 * decades * math.log(10.0))
        return self.cfg.xi0 - half, self.cfg.xi0 + half


def gaussian_packet(cfg):
    return GaussianPacket(cfg)


@dataclass(frozen=True, eq=False)
class SpectralState:
    """Packet coefficients over the first ``len(coeffs)`` basis states.

    ``captured_norm`` is the squared norm retained by the truncation.
    """

    basis: object
    coeffs: np.ndarray
    t0: float = 0.0
    captured_norm: float = field(init=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 1 or not 0 < c.size <= self.basis.size:
            raise DomainError("coefficient vector does not fit the basis")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        norm = float(np.sum(np.abs(c) ** 2))
        if norm > 1.0 + NORM_SLACK:
            raise DomainError(f"captured norm {norm:.12g} exceeds 1")
        object.__setattr__(self, "captured_norm", norm)

    @property
    def n_states(self):
        return self.coeffs.size

    @property
    def energies(self):
        return self.basis.energies[: self.n_states]

    def truncated(self, n_states):
        return SpectralState(self.basis, self.coeffs[:n_states], self.t0)

    def below(self, energy):
        """Copy keeping only states with energy below `energy`."""
        keep = self.energies < energy
        if not np.any(keep):
            raise DomainError(f"no basis state lies below {energy:.6g}")
        return SpectralState(self.basis, np.where(keep, self.coeffs, 0.0), self.t0)

    def phased(self, tau):
        """Coefficients at time(s) `tau`; shape ``tau.shape + (n,)``."""
        tau = np.asarray(tau, dtype=float)
        return self.coeffs * np.exp(-1j * np.multiply.outer(tau - self.t0, self.energies))


def project(packet, basis, n_states=None, spec=None, max_energy=None, t0=0.0):
    """Expand a real packet over the basis by quadrature.

    Parameters
    ----------
    packet : callable or PacketConfig
        Real function of ``xi`` (vectorized).
    basis : BasisSet
    n_states : int, optional
        Number of leading states kept (default: all).
    max_energy : float, optional
        Drop states at or above this energy, e.g. the barrier top to keep
        only under-barrier states.

    Warns
    -----
    CapturedNormWarning
        When less than 99% of the packet norm is captured.
    """
    if isinstance(packet, PacketConfig):
        packet = GaussianPacket(packet)
    n = basis.size if n_states is None else int(n_states)
    if not 0 < n <= basis.size:
        raise DomainError(f"n_states must be in 1..{basis.size}")
    spec = basis.quadrature(spec)
    L = spec.halfwidth
    cuts = [p for p in getattr(packet, "support", lambda: ())() if -L < p < L]
    coeffs = integrate(lambda x: packet(x) * basis.values(x, n), -L, L, spec, breakpoints=cuts)
    state = SpectralState(basis, np.atleast_1d(coeffs), t0)
    if max_energy is not None:
        state = state.below(max_energy)
    if state.captured_norm < CAPTURED_NORM_WARN:
        warnings.warn(f"basis captures only {state.captured_norm:.4f} of the packet norm; "
                      "consider a larger basis", CapturedNormWarning, stacklevel=2)
    return state


class _Evolved:
    def __init__(self, state, tau):
        self.state = state
        self.tau = float(tau)
        self._c = state.phased(self.tau)

    def __call__(self, xi):
        v = self.state.basis.values(xi, self.state.n_states)
        return np.tensordot(self._c, v, axes=(0, 0))


def evolve(state, tau):
    """Evaluator ``xi -> Phi(xi, tau)`` (complex)."""
    if not math.isfinite(tau):
        raise DomainError("tau must be finite")
    return _Evolved(state, tau)


@lru_cache(maxsize=128)
def _overlap(basis, a, b, n, spec):
    def integrand(x):
        v = basis.values(x, n)
        return v[:, None, :] * v[None, :, :]

    M = integrate(integrand, a, b, spec)
    M = 0.5 * (M + M.T)
    M.setflags(write=False)
    return M


def region_overlap(basis, region, n_states=None, spec=None):
    """Matrix ``int_a^b Psi_m Psi_n dxi``; cached per (basis, region)."""
    a, b = (float(v) for v in region)
    if not a < b:
        raise DomainError(f"invalid region ({a}, {b}): need a < b")
    n = basis.size if n_states is None else int(n_states)
    return _overlap(basis, a, b, n, basis.quadrature(spec))


def well_probability(state, region, tau, spec=None):
    """Probability of finding the packet in `region` at time(s) `tau`."""
    M = region_overlap(state.basis, region, state.n_states, spec)
    c = state.phased(tau)
    p = np.real(np.einsum("...m,mn,...n->...", c.conj(), M, c))
    return float(p) if p.ndim == 0 else p


def well_regions(state_or_basis, wells):
    """Regions of `wells` covering the basis box, left to right."""
    basis = getattr(state_or_basis, "basis", state_or_basis)
    return wells.regions(basis.halfwidth)


def two_level_probability(C1, C2, region_overlap, dE, t, P0):
    """Closed-form two-state well probability.

    ``P(t) = P0 - 4 C1 C2 sin^2(dE t / 2) M12`` with ``M12`` the region
    overlap of the two states.
    """
    if not dE > 0:
        raise DomainError("dE must be positive")
    t = np.asarray(t, dtype=float)
    out = P0 - 4.0 * C1 * C2 * np.sin(0.5 * dE * t) ** 2 * region_overlap
    return float(out) if out.ndim == 0 else out


def density_surface(state, xi_grid, tau_grid):
    """``|Phi(xi, tau)|`` on a grid; rows follow `tau_grid`."""
    xi = _ascending(xi_grid, "xi_grid")
    tau = _ascending(tau_grid, "tau_grid")
    v = state.basis.values(xi, state.n_states)
    return np.abs(state.phased(tau) @ v)


def recurrence_time(state, region, tau_max, grid_n=20001, tol=1e-6):
    """First ``tau > 0`` at which the region probability returns to its start.

    Local maxima of ``P(tau)`` on ``(0, tau_max]`` are refined; the first
    one within `tol` of ``P(0)`` is returned, or None.
    """
    p0 = well_probability(state, region, 0.0)
    f = lambda t: well_probability(state, region, t)  # noqa: E731
    for pos, kind in find_extrema(f, 0.0, tau_max, grid_n):
        if kind == "max" and abs(f(pos) - p0) <= tol:
            return pos
    return None


def _ascending(grid, name):
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise DomainError(f"{name} must be a non-empty 1-D array")
    if not np.all(np.isfinite(g)):
        raise DomainError(f"{name} must be finite")
    if np.any(np.diff(g) <= 0):
        raise DomainError(f"{name} must be strictly ascending")
    return g
