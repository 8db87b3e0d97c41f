"""Isospectral multi-well Hamiltonians built from the harmonic oscillator.

Two levels ``E_-2 < E_-1 < 1/2`` are added below the oscillator ground
state with a two-step Crum-Krein deformation.  Everything is expressed in
the dimensionless coordinate ``xi`` with ``H = -1/2 d^2/dxi^2 + U(xi)``.

The seed relation ``psi'' = (xi^2 - 2E) psi`` closes every derivative in
closed form, so nothing here is differentiated numerically.
"""

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .exceptions import ConstructionError, DomainError, SingularPotentialError
from .numerics import DEFAULT_QUADRATURE, find_extrema, integrate_line
from .specfun import ParabolicCylinder, gamma

__all__ = [
    "DeformationParams",
    "WellStructure",
    "BasisSet",
    "IsospectralModel",
    "OscillatorBasis",
    "oscillator_states",
    "sublevel_psi",
    "wronskian",
    "potential",
    "classify_wells",
    "norm_constants",
    "build_basis",
    "spectrum",
    "seed_wronskian",
]

SQRT2 = math.sqrt(2.0)
# beyond this |xi| every basis function is below 1e-170 and Wronskians overflow
XI_CUTOFF = 20.0
RESIDUAL_TOL = 1e-6
# minima shallower than this (energy units) are dimples on a barrier
MIN_WELL_DEPTH = 0.05


@dataclass(frozen=True)
class DeformationParams:
    """A point of the isospectral family.

    ``nu`` and ``mu`` are the parabolic-cylinder orders of the added levels,
    ``E_-1 = nu + 1/2`` and ``E_-2 = mu + 1/2``.
    """

    nu: float
    mu: float
    lambda1: float
    lambda2: float = 1.0
    omega0: float = 1.0

    def __post_init__(self):
        for name in ("nu", "mu", "lambda1", "lambda2", "omega0"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise DomainError(f"{name} must be finite, got {value!r}")
        if not self.mu < self.nu < 0:
            raise DomainError(f"need mu < nu < 0, got nu={self.nu}, mu={self.mu}")
        if not (self.lambda1 > 0 and self.lambda2 > 0):
            raise DomainError("deformation parameters lambda1, lambda2 must be positive")
        if not self.omega0 > 0:
            raise DomainError("omega0 must be positive")

    @property
    def e_minus1(self):
        return self.nu + 0.5

    @property
    def e_minus2(self):
        return self.mu + 0.5

    @property
    def splitting(self):
        """Tunnel doublet of the unperturbed model, ``E_-1 - E_-2``."""
        return self.nu - self.mu

    def replace(self, **changes):
        values = dict(nu=self.nu, mu=self.mu, lambda1=self.lambda1,
                      lambda2=self.lambda2, omega0=self.omega0)
        values.update(changes)
        return DeformationParams(**values)


@dataclass(frozen=True)
class WellStructure:
    minima: tuple
    barrier_tops: tuple
    well_count: int

    def __post_init__(self):
        if len(self.barrier_tops) != len(self.minima) - 1:
            raise DomainError("barrier tops must interleave the minima")

    def regions(self, halfwidth=8.0):
        """Well regions ``(a, b)`` from left to right, split at barrier tops."""
        cuts = [-halfwidth] + [p for p, _ in self.barrier_tops] + [halfwidth]
        return list(zip(cuts[:-1], cuts[1:]))

    @property
    def barrier_height(self):
        """Highest barrier top value (U_loc.max), or None for one well."""
        if not self.barrier_tops:
            return None
        return max(v for _, v in self.barrier_tops)


def oscillator_states(n_max, xi):
    """Normalized oscillator eigenfunctions ``psi_0 .. psi_n_max`` and slopes.

    Returns arrays of shape ``(n_max + 1, len(xi))``; uses the stable
    three-term recurrence rather than explicit Hermite polynomials.
    """
    xi = np.asarray(xi, dtype=float)
    psi = np.empty((n_max + 2,) + xi.shape)
    psi[0] = math.pi ** -0.25 * np.exp(-0.5 * xi * xi)
    if n_max + 1 >= 1:
        psi[1] = SQRT2 * xi * psi[0]
    for n in range(1, n_max + 1):
        psi[n + 1] = math.sqrt(2.0 / (n + 1)) * xi * psi[n] - math.sqrt(n / (n + 1)) * psi[n - 1]
    dpsi = np.empty((n_max + 1,) + xi.shape)
    for n in range(n_max + 1):
        dpsi[n] = -math.sqrt((n + 1) / 2.0) * psi[n + 1]
        if n > 0:
            dpsi[n] += math.sqrt(n / 2.0) * psi[n - 1]
    return psi[: n_max + 1], dpsi


class IsospectralModel:
    """Closed-form ingredients of one family member.

    Holds the two parabolic-cylinder evaluators; every method is vectorized
    over `xi`.
    """

    def __init__(self, params):
        self.params = params
        self._d_nu = ParabolicCylinder(params.nu)
        self._d_mu = ParabolicCylinder(params.mu)

    def sublevels(self, xi):
        """``(psi_-1, psi_-1', psi_-2, psi_-2')`` with primes in ``xi``."""
        xi = np.asarray(xi, dtype=float)
        z = SQRT2 * xi
        a, da = self._d_nu.evaluate(z)
        b, db = self._d_nu.evaluate(-z)
        lam1, lam2 = self.params.lambda1, self.params.lambda2
        p1 = a + lam1 * b
        dp1 = SQRT2 * (da - lam1 * db)
        a, da = self._d_mu.evaluate(z)
        b, db = self._d_mu.evaluate(-z)
        p2 = a - lam2 * b
        dp2 = SQRT2 * (da + lam2 * db)
        return p1, dp1, p2, dp2

    def sublevel_psi(self, which, xi):
        p1, dp1, p2, dp2 = self.sublevels(xi)
        if which == 1:
            return p1, dp1
        if which == 2:
            return p2, dp2
        raise DomainError(f"which must be 1 or 2, got {which!r}")

    def wronskian(self, xi):
        """``W = psi_-2 psi_-1' - psi_-2' psi_-1`` and its first two derivatives."""
        p1, dp1, p2, dp2 = self.sublevels(xi)
        gap = 2.0 * (self.params.e_minus2 - self.params.e_minus1)
        W = p2 * dp1 - dp2 * p1
        dW = gap * p2 * p1
        d2W = gap * (dp2 * p1 + p2 * dp1)
        return W, dW, d2W

    def potential(self, xi):
        """Deformed potential ``xi^2/2 - (ln|W|)''``."""
        xi = np.asarray(xi, dtype=float)
        p1, dp1, p2, dp2 = self.sublevels(xi)
        gap = 2.0 * (self.params.e_minus2 - self.params.e_minus1)
        W = p2 * dp1 - dp2 * p1
        scale = np.abs(p2 * dp1) + np.abs(dp2 * p1)
        bad = np.abs(W) <= 1e-12 * scale
        if np.any(bad):
            where = float(np.atleast_1d(xi)[np.atleast_1d(bad)][0])
            raise SingularPotentialError(f"Wronskian vanishes near xi={where:.6g}", xi=where)
        r1 = gap * p2 * p1 / W
        r2 = gap * (dp2 * p1 + p2 * dp1) / W
        U = 0.5 * xi * xi - (r2 - r1 * r1)
        return float(U) if U.ndim == 0 else U

    def classify_wells(self, halfwidth=8.0, grid_n=4001, min_depth=None):
        """Minima and barrier tops of the potential on ``[-L, L]``.

        A minimum shallower than `min_depth` below its lower neighbouring
        top is a dimple rather than a well.  It is merged with both
        neighbouring tops into one plateau barrier located at the dimple and
        carrying the higher top value.
        """
        if min_depth is None:
            min_depth = MIN_WELL_DEPTH
        ext = [(p, k, float(self.potential(p)))
               for p, k in find_extrema(self.potential, -halfwidth, halfwidth, grid_n)]
        merged = True
        while merged:
            merged = False
            for i in range(1, len(ext) - 1):
                p, kind, u = ext[i]
                left, right = ext[i - 1], ext[i + 1]
                if kind == "min" and min(left[2], right[2]) - u < min_depth:
                    ext[i - 1:i + 2] = [(p, "max", max(left[2], right[2]))]
                    merged = True
                    break
        minima = tuple((p, u) for p, k, u in ext if k == "min")
        tops = tuple((p, u) for p, k, u in ext if k == "max")
        return WellStructure(minima, tops, len(minima))

    def norm_constants(self):
        return norm_constants(self.params)


@lru_cache(maxsize=16)
def _model(params):
    # parameters are frozen and the evaluator tables immutable
    return IsospectralModel(params)


def sublevel_psi(which, params, xi):
    """Sub-level function ``psi_-1`` (which=1) or ``psi_-2`` (which=2) and slope."""
    return _model(params).sublevel_psi(which, xi)


def wronskian(params, xi):
    return _model(params).wronskian(xi)


def potential(params, xi):
    return _model(params).potential(xi)


def classify_wells(params, halfwidth=8.0, min_depth=None):
    return _model(params).classify_wells(halfwidth, min_depth=min_depth)


def seed_wronskian(order, xi):
    """xi-Wronskian of ``D_order(sqrt2 xi)`` and ``D_order(-sqrt2 xi)``.

    Constant in ``xi`` and equal to ``2 sqrt(pi) / Gamma(-order)``.
    """
    d = ParabolicCylinder(order)
    z = SQRT2 * np.asarray(xi, dtype=float)
    a, da = d.evaluate(z)
    b, db = d.evaluate(-z)
    return a * (-SQRT2 * db) - SQRT2 * da * b


def norm_constants(params):
    """Analytic normalization constants ``(N_{Lambda_-2}, N_{Lambda_-1})``.

    ``N^-2 = 4 Lambda sqrt(pi omega0) (nu - mu) / Gamma(-order)``, with the
    Lambda_-2 / Gamma(-mu) constant belonging to the ground state.
    """
    common = 4.0 * math.sqrt(math.pi * params.omega0) * (params.nu - params.mu)
    inv2_ground = common * params.lambda2 / gamma(-params.mu)
    inv2_first = common * params.lambda1 / gamma(-params.nu)
    return 1.0 / math.sqrt(inv2_ground), 1.0 / math.sqrt(inv2_first)


def spectrum(params, count):
    """Exact energies ``[E_-2, E_-1, 1/2, 3/2, ...]`` (first `count`)."""
    if count < 2:
        raise DomainError("count must be at least 2")
    return np.array([params.e_minus2, params.e_minus1] + [i + 0.5 for i in range(count - 2)])


@dataclass(frozen=True, eq=False)
class BasisSet:
    """Orthonormal eigenbasis of the deformed Hamiltonian (the smart basis).

    State 0 has energy ``E_-2``, state 1 ``E_-1`` and state ``i + 2`` the
    oscillator energy ``i + 1/2``.
    """

    params: DeformationParams
    size: int
    energies: np.ndarray
    halfwidth: float
    construction: str
    scales: np.ndarray = field(repr=False)
    model: IsospectralModel = field(repr=False)
    analytic_norm_mismatch: float = field(default=0.0, repr=False)

    def evaluate(self, xi, n_states=None):
        """Values and slopes of the first `n_states` states at `xi`.

        Returns two arrays of shape ``(n_states,) + xi.shape``.
        """
        n = self.size if n_states is None else n_states
        if not 0 < n <= self.size:
            raise DomainError(f"n_states must be in 1..{self.size}")
        vals, ders = _raw_states(self.model, n, xi, self.construction)
        s = self.scales[:n].reshape((n,) + (1,) * (vals.ndim - 1))
        return vals * s, ders * s

    def values(self, xi, n_states=None):
        return self.evaluate(xi, n_states)[0]

    @property
    def evaluators(self):
        return [_StateEvaluator(self, n) for n in range(self.size)]

    @property
    def analytic_signs(self):
        """Sign of each state relative to its defining closed-form expression."""
        return np.sign(self.scales)

    def potential(self, xi):
        return self.model.potential(xi)

    def gram(self, n_states=None, spec=None):
        """Overlap matrix by quadrature (identity for an intact basis)."""
        n = self.size if n_states is None else n_states
        spec = self.quadrature(spec)

        def integrand(x):
            v = self.values(x, n)
            return v[:, None, :] * v[None, :, :]

        return integrate_line(integrand, spec)

    def quadrature(self, spec=None):
        """`spec` (default tolerances if None) on this basis' box."""
        spec = DEFAULT_QUADRATURE if spec is None else spec
        return replace(spec, halfwidth=max(spec.halfwidth, self.halfwidth))

    def hamiltonian_residuals(self, grid_n=2001, h=1e-3):
        return _residuals(self.model, self.size, self.construction, self.scales,
                          self.energies, self.halfwidth, grid_n, h)


class OscillatorBasis:
    """Seed oscillator eigenstates behind the same interface as `BasisSet`.

    Serves as a sanity reference: potential ``xi^2/2``, energies ``n + 1/2``.
    """

    construction = "oscillator"

    def __init__(self, size=10, halfwidth=8.0):
        if not 1 <= size <= 40:
            raise DomainError("basis size must be between 1 and 40")
        self.size = size
        self.halfwidth = max(float(halfwidth), math.sqrt(2.0 * size) + 3.5)
        self.energies = np.arange(size) + 0.5
        self.energies.setflags(write=False)
        self.analytic_signs = np.ones(size)

    def evaluate(self, xi, n_states=None):
        n = self.size if n_states is None else n_states
        if not 0 < n <= self.size:
            raise DomainError(f"n_states must be in 1..{self.size}")
        return oscillator_states(n - 1, xi)

    def values(self, xi, n_states=None):
        return self.evaluate(xi, n_states)[0]

    def potential(self, xi):
        xi = np.asarray(xi, dtype=float)
        return 0.5 * xi * xi

    quadrature = BasisSet.quadrature
    gram = BasisSet.gram


class _StateEvaluator:
    def __init__(self, basis, n):
        self.basis = basis
        self.n = n

    def __call__(self, xi):
        v, d = self.basis.evaluate(xi, self.n + 1)
        return v[self.n], d[self.n]


def _raw_states(model, n, xi, construction):
    """Unnormalized states before numerical normalization.

    ``construction='crum'`` is the two-step Crum form
    ``W{psi_-2, psi_-1, psi_i} / W{psi_-2, psi_-1}`` reduced with the seed
    relation; ``'printed'`` swaps ``E_i - E_-1`` for ``E_i - E_-2`` in the
    mixing coefficient.
    """
    xi = np.asarray(xi, dtype=float)
    shape = xi.shape
    x = np.atleast_1d(xi).ravel()
    inside = np.abs(x) <= XI_CUTOFF
    vals = np.zeros((n, x.size))
    ders = np.zeros((n, x.size))
    xs = x[inside]
    if xs.size:
        p = model.params
        e1, e2 = p.e_minus1, p.e_minus2
        p1, dp1, p2, dp2 = model.sublevels(xs)
        W = p2 * dp1 - dp2 * p1
        dW = 2.0 * (e2 - e1) * p2 * p1
        rw = 1.0 / W
        dlog = dW * rw
        states = [(p1 * rw, (dp1 - p1 * dlog) * rw), (p2 * rw, (dp2 - p2 * dlog) * rw)]
        if n > 2:
            ho, dho = oscillator_states(n - 3, xs)
            for i in range(n - 2):
                ei = i + 0.5
                denom = ei - e1 if construction == "crum" else ei - e2
                kappa = (e1 - e2) / denom
                wi = ho[i] * dp1 - dho[i] * p1
                dwi = 2.0 * (ei - e1) * ho[i] * p1
                q = wi * p2 * rw
                dq = (dwi * p2 + wi * dp2) * rw - q * dlog
                states.append((ho[i] + kappa * q, dho[i] + kappa * dq))
        for k in range(n):
            vals[k, inside] = states[k][0]
            ders[k, inside] = states[k][1]
    return vals.reshape((n,) + shape), ders.reshape((n,) + shape)


def _residuals(model, n, construction, scales, energies, halfwidth, grid_n=2001, h=1e-3):
    """Relative L2 residual of ``-1/2 psi'' + U psi - E psi`` per state.

    The second derivative is a fourth-order central difference of the
    analytic first derivative.
    """
    x = np.linspace(-halfwidth, halfwidth, grid_n)
    v, _ = _raw_states(model, n, x, construction)
    d = [_raw_states(model, n, x + k * h, construction)[1] for k in (-2, -1, 1, 2)]
    d2 = (d[0] - 8.0 * d[1] + 8.0 * d[2] - d[3]) / (12.0 * h)
    U = model.potential(x)
    r = -0.5 * d2 + (U - energies[:n, None]) * v
    return np.sqrt(np.trapezoid(r * r, x, axis=1) / np.trapezoid(v * v, x, axis=1))


def build_basis(params, size=10, halfwidth=8.0, spec=None, construction="auto"):
    """Build the orthonormal smart basis of `size` states.

    Parameters
    ----------
    params : DeformationParams
    size : int
        Total number of states, ``3 <= size <= 40``.
    halfwidth : float
        Truncation box ``[-L, L]`` for normalization quadrature; widened to
        ``sqrt(2 size) + 3.5`` when that is larger.
    construction : {'auto', 'printed', 'crum'}
        ``'auto'`` tries the printed mixing coefficient first and falls
        back to the Crum form when the Hamiltonian residual check fails.

    Raises
    ------
    ConstructionError
        If no construction passes the residual check.
    SingularPotentialError
        If the Wronskian vanishes inside the box.
    """
    if not 3 <= size <= 40:
        raise DomainError("basis size must be between 3 and 40")
    if spec is None:
        spec = DEFAULT_QUADRATURE
    # high oscillator states reach past a fixed box; widen it with the size
    halfwidth = max(float(halfwidth), math.sqrt(2.0 * size) + 3.5)
    if spec.halfwidth != halfwidth:
        spec = replace(spec, halfwidth=halfwidth)
    model = _model(params)
    model.potential(np.linspace(-halfwidth, halfwidth, 4001))  # singularity screen
    energies = spectrum(params, size)
    energies.setflags(write=False)

    candidates = {"auto": ("printed", "crum"), "printed": ("printed",), "crum": ("crum",)}
    if construction not in candidates:
        raise DomainError(f"unknown construction {construction!r}")
    worst = None
    for form in candidates[construction]:
        norms = integrate_line(lambda x: _raw_states(model, size, x, form)[0] ** 2, spec)
        scales = 1.0 / np.sqrt(norms)
        res = _residuals(model, size, form, scales, energies, halfwidth)
        worst = (form, float(res.max()))
        if worst[1] <= RESIDUAL_TOL:
            break
    else:
        raise ConstructionError(f"basis failed the Hamiltonian residual check ({worst[0]}: {worst[1]:.3g})")

    scales = scales * _sign_convention(model, size, form, halfwidth)
    scales.setflags(write=False)
    ground_analytic = norm_constants(params)[0]
    mismatch = abs(math.sqrt(norms[0]) / ground_analytic - 1.0)
    return BasisSet(params, size, energies, halfwidth, form, scales, model, mismatch)


def _sign_convention(model, n, form, halfwidth, grid_n=4001):
    """Ground state positive; excited states positive at the rightmost extremum."""
    x = np.linspace(-halfwidth, halfwidth, grid_n)
    v, d = _raw_states(model, n, x, form)
    signs = np.ones(n)
    signs[0] = np.sign(v[0, grid_n // 2])
    for k in range(1, n):
        turns = np.nonzero(np.sign(d[k, :-1]) * np.sign(d[k, 1:]) < 0)[0]
        i = turns[-1] if turns.size else int(np.argmax(np.abs(v[k])))
        signs[k] = np.sign(v[k, i]) or 1.0
    return signs
