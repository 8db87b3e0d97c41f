"""Acceptance criteria, one test per criterion.

Each test records a ``CRITERION k: PASS|FAIL: detail`` line, printed in the
pytest terminal summary, then asserts.  Run on its own with

    pytest tests/test_acceptance.py
    python3 tests/test_acceptance.py
"""

import math
import sys

import numpy as np
import pytest

from isowell.dynamics import PacketConfig, project, recurrence_time, region_overlap, well_probability
from isowell.floquet import DriveParams, ctd_frequency, dipole_matrix, floquet_spectrum
from isowell.model import DeformationParams, build_basis, classify_wells, seed_wronskian, spectrum
from isowell.numerics import DEFAULT_QUADRATURE, integrate_line
from isowell.perturb import DisturbanceParams, bump, diagonalize_perturbed, reconstruct_potential
from isowell.specfun import gamma

SYM = dict(nu=-3.0, mu=-3.02)
THREE = dict(nu=-0.02, mu=-1.0)
BUMPS = {0.25: DisturbanceParams(0.6, 1.86, 0.25), 0.5: DisturbanceParams(0.6, 1.86, 0.5)}
DRIVE = DriveParams(0.65, 0.9)

TABLE1 = {
    0.25: [-2.512, -2.466, 0.507, 1.515, 2.506, 3.501, 4.509, 5.509, 6.501, 7.509],
    0.5: [-2.511, -2.357, 0.525, 1.549, 2.526, 3.508, 4.529, 5.521, 6.510, 7.524],
}
TABLE2 = {
    0.25: ([0.8491, 0.5283, 0.0013, 0.0013, -0.0007], [0.5286, -0.849, 0.0059, 0.006, 0.003]),
    0.5: ([0.7558, 0.6548, 0.0013, 0.0012, 0.0005], [0.6544, -0.7555, 0.0205, 0.0197, 0.0087]),
}
SPLIT = {0.25: (0.046, 0.005), 0.5: (0.154, 0.01)}
TABLE3 = {
    1.0: [0.39038, 0.358714, 0.302197, -0.291837, -0.189549,
          0.181939, 0.181259, -0.119865, 0.0367728, 0.0299879],
    0.5: [0.389543, 0.358666, 0.30244, -0.291951, -0.188954,
          0.185352, 0.177982, -0.120192, 0.0377385, 0.0293748],
}
FLOQUET_SPLIT = {1.0: (6.8e-4, 0.25), 0.5: (7.37e-3, 0.15)}
CTD = {1.0: 0.802268, 0.5: 0.762012}


def _params(lam=1.0, **kw):
    return DeformationParams(**dict(SYM, **kw), lambda1=lam, lambda2=1.0)


def _record(log, k, checks):
    """`checks` is a list of (ok, text); records one line and returns overall ok."""
    ok = all(c for c, _ in checks)
    detail = "; ".join(f"{'ok' if c else 'MISS'} {t}" for c, t in checks)
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'}: {detail}"
    log.append((k, line))
    print(line)
    return ok


# ---- quantities shared by criteria 1-4 and their stability check ----

def perturbed_quantities(size=10, halfwidth=8.0, spec=None):
    basis = build_basis(_params(), size, halfwidth, spec=spec)
    out = {}
    for c, d in BUMPS.items():
        ps = diagonalize_perturbed(basis, d, spec=spec)
        out[c] = {
            "energies": np.array(ps.energies[:10]),
            "C0": ps.coefficients(0, "analytic")[:5],
            "C1": ps.coefficients(1, "analytic")[:5],
            "split": ps.splitting,
        }
    return out


def _signless(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return min(np.abs(a - b).max(), np.abs(a + b).max())


def _set_distance(values, ref, w):
    values = np.asarray(values)
    return max(float(np.min(np.minimum(np.abs(values - r), w - np.abs(values - r)))) for r in ref)


def floquet_quantities(size=10, halfwidth=8.0, spec=None, tol=1e-10):
    out = {}
    for lam in (1.0, 0.5):
        basis = build_basis(_params(lam), size, halfwidth, spec=spec)
        res = floquet_spectrum(basis, DRIVE, size, tol, spec)
        i, j, split = res.doublet
        out[lam] = {"eps": np.array(res.quasi_energies), "doublet": np.sort(res.quasi_energies[[i, j]]),
                    "split": split, "r": dipole_matrix(basis, size, spec)[0, 1]}
    return out


@pytest.fixture(scope="module")
def perturbed():
    return perturbed_quantities()


@pytest.fixture(scope="module")
def floquet():
    return floquet_quantities()


def criterion1_checks(q, tol=0.01):
    return [(np.abs(q[c]["energies"] - TABLE1[c]).max() <= tol,
             f"c={c} max|dE|={np.abs(q[c]['energies'] - TABLE1[c]).max():.4f} (tol {tol})") for c in TABLE1]


def criterion2_checks(q, tol=0.01):
    out = []
    for c, (r0, r1) in TABLE2.items():
        for n, ref in ((0, r0), (1, r1)):
            err = _signless(q[c][f"C{n}"], ref)
            out.append((err <= tol, f"c={c} state{n} max|dC|={err:.4f} (tol {tol})"))
    return out


def criterion3_checks(q, scale=1.0):
    return [(abs(q[c]["split"] - ref) <= tol * scale,
             f"c={c} Delta={q[c]['split']:.4f} vs {ref} (tol {tol * scale:g})")
            for c, (ref, tol) in SPLIT.items()]


def criterion4_checks(q, scale=1.0):
    out = []
    for lam, ref in TABLE3.items():
        dist = _set_distance(q[lam]["eps"], ref, DRIVE.w)
        out.append((dist <= 2e-3 * scale, f"Lambda={lam} set distance {dist:.2e} (tol {2e-3 * scale:g})"))
        target, rel = FLOQUET_SPLIT[lam]
        err = abs(q[lam]["split"] / target - 1)
        out.append((err <= rel * scale, f"Lambda={lam} Delta_F={q[lam]['split']:.3e} rel err {err:.3f} "
                                        f"(tol {rel * scale:g})"))
    return out


def test_criterion_1_table1_energies(perturbed, acceptance_log):
    assert _record(acceptance_log, 1, criterion1_checks(perturbed))


def test_criterion_2_table2_coefficients(perturbed, acceptance_log):
    assert _record(acceptance_log, 2, criterion2_checks(perturbed))


def test_criterion_3_perturbed_splittings(perturbed, acceptance_log):
    assert _record(acceptance_log, 3, criterion3_checks(perturbed))


def test_criterion_4_table3_quasi_energies(floquet, acceptance_log):
    assert _record(acceptance_log, 4, criterion4_checks(floquet))


def test_criterion_5_ctd_frequencies(floquet, acceptance_log):
    checks = []
    for lam, ref in CTD.items():
        w = ctd_frequency(DRIVE.S, floquet[lam]["r"])
        checks.append((abs(w - ref) <= 0.005, f"Lambda={lam} w={w:.6f} vs {ref} (tol 0.005)"))
    assert _record(acceptance_log, 5, checks)


def test_criterion_6_isospectrality(acceptance_log):
    checks = []
    ref = spectrum(_params(1.0), 10)
    for lam in (0.05, 0.5, 1.0, 5.0):
        p = _params(lam)
        same = np.array_equal(spectrum(p, 10), ref)
        b = build_basis(p, 10)

        def rq(x, b=b):
            v, d = b.evaluate(x)
            return 0.5 * d * d + b.potential(x) * v * v

        err = np.abs(integrate_line(rq, b.quadrature()) - ref).max()
        checks.append((same and err <= 1e-6, f"Lambda={lam} spectrum identical={same} "
                                             f"Rayleigh err {err:.1e} (tol 1e-6)"))
    assert _record(acceptance_log, 6, checks)


def _nodes(v):
    s = np.sign(v[np.abs(v) > 1e-8 * np.abs(v).max()])
    return int(np.sum(s[1:] != s[:-1]))


def test_criterion_7_basis_integrity(acceptance_log):
    b = build_basis(_params(), 10)
    gram = np.abs(b.gram() - np.eye(10)).max()
    res = float(np.max(b.hamiltonian_residuals()))
    v = b.values(np.linspace(-b.halfwidth, b.halfwidth, 4001))
    nodes = [_nodes(row) for row in v]
    x = np.linspace(-6, 6, 121)
    wr = []
    for order in (SYM["nu"], SYM["mu"]):
        target = 2 * math.sqrt(math.pi) / gamma(-order)
        wr.append(np.abs(seed_wronskian(order, x) / target - 1).max())
    checks = [
        (gram <= 1e-8, f"Gram residual {gram:.1e} (tol 1e-8)"),
        (res <= 1e-6, f"Hamiltonian residual {res:.1e} (tol 1e-6)"),
        (nodes == list(range(10)), f"node counts {nodes}"),
        (max(wr) <= 1e-9, f"seed Wronskian rel spread {max(wr):.1e} (tol 1e-9)"),
    ]
    assert _record(acceptance_log, 7, checks)


def test_criterion_8_dynamics(acceptance_log):
    checks = []
    period = 2 * math.pi / 0.02
    tau = np.linspace(0, period, 2001)
    for lam, want in ((1.0, "transfer"), (0.05, "confine")):
        p = _params(lam)
        b = build_basis(p, 10)
        wells = classify_wells(p)
        right = wells.regions(b.halfwidth)[-1]
        state = project(PacketConfig(0.75, wells.minima[-1][0]), b)
        pr = well_probability(state, right, tau)
        if want == "transfer":
            t = recurrence_time(state.truncated(2), right, 1.2 * period)
            rel = abs(t / period - 1) if t is not None else math.inf
            checks.append((rel <= 1e-6, f"two-level recurrence {t:.6f} vs 100pi rel {rel:.1e} (tol 1e-6)"))
            checks.append((pr.min() <= 0.05, f"Lambda=1 min P_R={pr.min():.4f} (<= 0.05)"))
        else:
            checks.append((pr.min() >= 0.5, f"Lambda=0.05 min P_R={pr.min():.4f} (>= 0.5)"))
    for lam in (1.0, 0.05):
        p = _params(lam, **THREE)
        b = build_basis(p, 3)
        centre = classify_wells(p).regions(b.halfwidth)[1]
        w0 = region_overlap(b, centre, 1)[0, 0]
        checks.append((w0 > 0.5, f"three-well Lambda={lam} central weight {w0:.3f} (> 0.5)"))
    assert _record(acceptance_log, 8, checks)


def test_criterion_9_reconstruction(acceptance_log):
    b = build_basis(_params(), 10)
    x = np.linspace(-3, 3, 601)
    free = diagonalize_perturbed(b, DisturbanceParams(0.0, 1.86, 0.25))
    err0 = np.nanmax(np.abs(reconstruct_potential(free, None, x) - b.potential(x)))
    d = BUMPS[0.25]
    ps = diagonalize_perturbed(b, d)
    err1 = np.nanmax(np.abs(reconstruct_potential(ps, None, x) - b.potential(x) - bump(d, x)))
    checks = [(err0 <= 1e-6, f"s=0 max err {err0:.1e} (tol 1e-6)"),
              (err1 <= 0.05, f"s=0.6 c=0.25 max err {err1:.3f} (tol 0.05)")]
    assert _record(acceptance_log, 9, checks)


def _shift(name, base, other, key, tol):
    a, b = base[key], other[key]
    err = float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
    return (err <= tol, f"{name} {key} shift {err:.1e} (tol {tol:g})")


def test_criterion_10_stability(perturbed, floquet, acceptance_log):
    tight = DEFAULT_QUADRATURE.tightened(100.0)
    variants = {
        "tight quadrature": (perturbed_quantities(spec=tight), floquet_quantities(spec=tight, tol=1e-12)),
        "L=10": (perturbed_quantities(halfwidth=10.0), floquet_quantities(halfwidth=10.0)),
        "larger basis": (perturbed_quantities(size=20), floquet_quantities(size=14)),
    }
    checks = []
    for name, (pq, fq) in variants.items():
        for c in BUMPS:
            checks.append(_shift(f"{name} c={c}", perturbed[c], pq[c], "energies", 0.005))
            for n in (0, 1):
                err = _signless(perturbed[c][f"C{n}"], pq[c][f"C{n}"])
                checks.append((err <= 0.005, f"{name} c={c} C{n} shift {err:.1e} (tol 0.005)"))
            checks.append(_shift(f"{name} c={c}", perturbed[c], pq[c], "split", SPLIT[c][1] / 2))
        for lam in (1.0, 0.5):
            dist = _set_distance(fq[lam]["eps"], floquet[lam]["eps"], DRIVE.w)
            checks.append((dist <= 1e-3, f"{name} Lambda={lam} set shift {dist:.1e} (tol 0.001)"))
            rel = abs(fq[lam]["split"] / floquet[lam]["split"] - 1)
            tol = FLOQUET_SPLIT[lam][1] / 2
            checks.append((rel <= tol, f"{name} Lambda={lam} Delta_F rel shift {rel:.3f} (tol {tol:g})"))
    assert _record(acceptance_log, 10, checks)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
