"""Independent oracles the test suite checks the package against.

Nothing here imports the package's numerical routines: the
characteristic polynomial is built by Faddeev-LeVerrier and rooted with
Durand-Kerner, the conversion dynamics come from the two-variable
reduction (intensity fraction + relative phase) of the symmetric-seeding
problem, and full-field reference integrations run through scipy.
"""
from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import linear_sum_assignment


def charpoly_coefficients(matrix: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial coefficients via Faddeev-LeVerrier."""
    a = np.asarray(matrix, dtype=complex)
    n = a.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[k - 1] * np.eye(n)
        coeffs[k] = -np.trace(a @ m) / k
    return coeffs


def durand_kerner_roots(coeffs: np.ndarray, iters: int = 500) -> np.ndarray:
    """All roots of a monic polynomial by simultaneous iteration."""
    c = np.asarray(coeffs, dtype=complex)
    n = len(c) - 1
    radius = 1.0 + max(abs(x) for x in c[1:]) if n else 1.0
    roots = radius * (0.4 + 0.9j) ** np.arange(1, n + 1)
    for _ in range(iters):
        new = roots.copy()
        for i in range(n):
            denom = np.prod([new[i] - new[j] for j in range(n) if j != i])
            new[i] = new[i] - np.polyval(c, new[i]) / denom
        if np.max(np.abs(new - roots)) < 1e-15 * radius:
            roots = new
            break
        roots = new
    return roots


def match_multisets(a: np.ndarray, b: np.ndarray) -> float:
    """Max pairwise distance under the best matching of two root multisets."""
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def reduced_rhs(_z, state, phase_on: bool, big_d: float):
    """Symmetric-seeding reduction: y = |E|^2 fraction, phi relative phase.

    Derived from the conservation laws: both pump intensities stay equal,
    both seed intensities stay equal, and their sum D is constant, so the
    eight real field equations collapse to (y, phi).
    """
    y, phi = state
    x = big_d - y
    dy = 2.0 * x * y * np.sin(phi) / big_d
    dphi = 2.0 * (x - y) * (np.cos(phi) + (1.0 if phase_on else 0.0)) / big_d
    return (dy, dphi)


def reduced_conversion(eps: float, phi0: float, phase_on: bool,
                       zeta_max: float | None = None):
    """(L, e) for symmetric seeding from the reduced system, event-detected."""
    big_d = 1.0 + eps
    if zeta_max is None:
        if phase_on:
            zeta_max = 3.0 * np.pi / (2.0 * np.sqrt(2.0 * eps * (1.0 + np.cos(phi0)))) + 20.0
        else:
            zeta_max = 1.5 * np.log(4.0 / (eps ** 2 * max(np.cos(phi0), 0.05))) + 20.0

    def turning(_z, state, *args):
        return np.sin(state[1])

    turning.direction = -1.0

    sol = solve_ivp(
        reduced_rhs,
        (0.0, zeta_max),
        (eps, phi0),
        args=(phase_on, big_d),
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
        events=turning,
        dense_output=True,
    )
    events = sol.t_events[0]
    if len(events) == 0:
        return None, None
    length = float(events[0])
    y_max = float(sol.sol(length)[0])
    # continue to the following minimum of y for the cycle window
    if len(events) > 1:
        end = float(events[1])
    else:
        end = sol.t[-1]
    zs = np.linspace(0.0, end, 4000)
    ys = sol.sol(zs)[0]
    x_max = big_d - ys.min()
    eff = float((ys.max() - ys.min()) / x_max)
    return length, eff


def full_field_rhs(_z, u, phase_on: bool):
    """Reference transcription of the coupled-mode equations (8 real ODEs)."""
    o1 = u[0] + 1j * u[1]
    o2 = u[2] + 1j * u[3]
    e1 = u[4] + 1j * u[5]
    e2 = u[6] + 1j * u[7]
    den = abs(o1) ** 2 + abs(e1) ** 2
    den2 = den * den
    d_e1 = -1j * (o1.conjugate() * o1 ** 2 * o2 * e2.conjugate()
                  - e1 ** 2 * e2 * o1.conjugate() * o2.conjugate()) / den2
    d_e2 = -1j * o1 * o2 * e1.conjugate() / den
    d_o1 = 1j * (o1 ** 2 * o2 * e1.conjugate() * e2.conjugate()
                 - abs(e1) ** 2 * e1 * e2 * o2.conjugate()) / den2
    d_o2 = -1j * e1 * e2 * o1.conjugate() / den
    if phase_on:
        bal = abs(o2) ** 2 - abs(e2) ** 2
        d_e1 += -1j * abs(o1) ** 2 * bal * e1 / den2
        d_e2 += 1j * abs(e1) ** 2 * e2 / den
        d_o1 += 1j * abs(e1) ** 2 * bal * o1 / den2
        d_o2 += 1j * abs(o1) ** 2 * o2 / den
    return [d_o1.real, d_o1.imag, d_o2.real, d_o2.imag,
            d_e1.real, d_e1.imag, d_e2.real, d_e2.imag]


def full_field_reference(initial: np.ndarray, zeta_grid: np.ndarray,
                         phase_on: bool) -> np.ndarray:
    """Four complex fields on zeta_grid via scipy DOP853 at tight tolerance."""
    u0 = np.concatenate([[z.real, z.imag] for z in initial])
    sol = solve_ivp(
        full_field_rhs,
        (zeta_grid[0], zeta_grid[-1]),
        u0,
        args=(phase_on,),
        method="DOP853",
        rtol=1e-12,
        atol=1e-14,
        dense_output=True,
    )
    u = sol.sol(zeta_grid)
    return (u[0::2] + 1j * u[1::2]).T
