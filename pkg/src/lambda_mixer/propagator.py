"""Field equations of motion and adaptive propagation along zeta.

Two families of right-hand sides are provided for the co-propagating
geometry, both in units Delta = kappa = 1 by default (lengths in
Delta/kappa, amplitudes in units of the reference pump):

* ``rhs_closed_form`` transcribes the explicit four-level equations of
  motion term by term.  The second line of each equation is the
  ac-Stark induced intensity-dependent phase term; ``include_phase_terms``
  drops those lines.  The Omega_1 phase term carries (|O2|^2 - |E2|^2),
  the sign demanded by dF/dzeta = -i kappa d(lambda_0)/dF*.
* ``rhs_eigen_gradient`` derives dF/dzeta = -i kappa dlambda/dF* from an
  eigenvalue: the second-order four- or five-level expression, or the
  exact ground branch tracked through the dense eigensolver.

The five-level model has no phase terms at second order, which is the
point of that scheme; its equations coincide with the four-level ones
with the phase lines removed.

``integrate`` is an embedded Dormand-Prince 4(5) pair with dense output;
samples are taken at fixed stride by interpolation so downstream event
detection is independent of the accepted-step grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import AmbiguousBranch, DegenerateDenominator, StepSizeUnderflow
from .levelsys import (
    FIELD_NAMES,
    FieldState,
    SystemParams,
    build_hamiltonian_4,
    build_hamiltonian_5,
    eig_exact,
    grad_lambda0_pert_4,
    grad_lambda0_pert_5,
    lambda0_pert_4,
    lambda0_pert_5,
    select_ground_branch,
)

__all__ = [
    "Model",
    "Method",
    "BackendSpec",
    "FieldDerivatives",
    "PropagationGrid",
    "TrajectorySample",
    "Trajectory",
    "rhs_closed_form",
    "rhs_eigen_gradient",
    "integrate",
]


class Model(str, Enum):
    FOUR_LEVEL = "four_level"
    FIVE_LEVEL = "five_level"


class Method(str, Enum):
    CLOSED_FORM = "closed_form"
    PERT_EIGEN_GRADIENT = "pert_eigen_gradient"
    EXACT_EIGEN_GRADIENT = "exact_eigen_gradient"


@dataclass(frozen=True)
class BackendSpec:
    """Which model and derivative route drive the propagation.

    ``include_phase_terms`` is meaningful only for the four-level model;
    the five-level equations have no phase terms to switch.
    """

    model: Model = Model.FOUR_LEVEL
    method: Method = Method.CLOSED_FORM
    include_phase_terms: bool = True

    def label(self) -> str:
        phase = "on" if self.effective_phase_terms() else "off"
        return f"{self.model.value}:{self.method.value}:phase_{phase}"

    def effective_phase_terms(self) -> bool:
        return self.model is Model.FOUR_LEVEL and self.include_phase_terms


@dataclass(frozen=True)
class FieldDerivatives:
    """dF/dzeta for the four fields, in units kappa*Omega_0/Delta."""

    d_omega1: complex
    d_omega2: complex
    d_e1: complex
    d_e2: complex

    def as_array(self) -> np.ndarray:
        return np.array(
            [self.d_omega1, self.d_omega2, self.d_e1, self.d_e2], dtype=complex
        )


@dataclass(frozen=True)
class PropagationGrid:
    """Integration window, tolerances and output stride."""

    zeta_max: float
    zeta_start: float = 0.0
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    sample_stride: float = 0.1

    def __post_init__(self):
        if not self.zeta_max > self.zeta_start:
            raise ValueError("zeta_max must exceed zeta_start")
        if not 1e-14 <= self.rel_tol <= 1e-3:
            raise ValueError("rel_tol must lie in [1e-14, 1e-3]")
        if self.abs_tol < 0:
            raise ValueError("abs_tol must be non-negative")
        if not self.sample_stride > 0:
            raise ValueError("sample_stride must be positive")


@dataclass(frozen=True)
class TrajectorySample:
    zeta: float
    state: FieldState
    invariants: "InvariantValues"
    lambda0: float


@dataclass(frozen=True)
class Trajectory:
    """Stride-sampled fields along zeta with diagnostic channels."""

    samples: list[TrajectorySample]
    backend: BackendSpec

    def zetas(self) -> np.ndarray:
        return np.array([s.zeta for s in self.samples])

    def intensity(self, name: str) -> np.ndarray:
        return np.array([abs(getattr(s.state, name)) ** 2 for s in self.samples])

    def states(self) -> list[FieldState]:
        return [s.state for s in self.samples]


def _unpack(state: FieldState):
    return state.omega1, state.omega2, state.e1, state.e2


def _check_denominator(o1: complex, e1: complex) -> float:
    den = abs(o1) ** 2 + abs(e1) ** 2
    if den < 1e-300:
        raise DegenerateDenominator(
            "|Omega_1|^2 + |E_1|^2 vanished during propagation"
        )
    return den


def rhs_closed_form(
    state: FieldState,
    params: SystemParams,
    include_phase_terms: bool,
) -> FieldDerivatives:
    """Explicit four-level equations of motion.

    First lines are the parametric mixing terms, second lines the
    ac-Stark phase terms (dropped when ``include_phase_terms`` is false).
    """
    o1, o2, e1, e2 = _unpack(state)
    den = _check_denominator(o1, e1)
    k = params.kappa / params.delta
    den2 = den * den

    d_e1 = -1j * k * (
        o1.conjugate() * o1 * o1 * o2 * e2.conjugate()
        - e1 * e1 * e2 * o1.conjugate() * o2.conjugate()
    ) / den2
    d_e2 = -1j * k * o1 * o2 * e1.conjugate() / den
    d_o1 = 1j * k * (
        o1 * o1 * o2 * e1.conjugate() * e2.conjugate()
        - abs(e1) ** 2 * e1 * e2 * o2.conjugate()
    ) / den2
    d_o2 = -1j * k * e1 * e2 * o1.conjugate() / den

    if include_phase_terms:
        balance = abs(o2) ** 2 - abs(e2) ** 2
        d_e1 += -1j * k * abs(o1) ** 2 * balance * e1 / den2
        d_e2 += 1j * k * abs(e1) ** 2 * e2 / den
        d_o1 += 1j * k * abs(e1) ** 2 * balance * o1 / den2
        d_o2 += 1j * k * abs(o1) ** 2 * o2 / den

    return FieldDerivatives(d_o1, d_o2, d_e1, d_e2)


def _exact_branch_lambda(
    fields: FieldState,
    params: SystemParams,
    model: Model,
    reference: np.ndarray | int,
) -> tuple[complex, np.ndarray]:
    build = build_hamiltonian_4 if model is Model.FOUR_LEVEL else build_hamiltonian_5
    pair = select_ground_branch(eig_exact(build(fields, params)), reference)
    return pair.value, pair.vector


def _grad_exact(
    state: FieldState,
    params: SystemParams,
    model: Model,
    reference: np.ndarray | int,
) -> tuple[complex, ...]:
    """Conjugate gradient of the tracked exact eigenvalue, by central FD.

    Fields are prescaled by omega_over_delta before entering the
    Hamiltonian; the chain rule restores code units, and the homogeneity
    degree 2 of the second-order eigenvalue makes the result scale-free
    up to the genuine higher-order corrections the exact backend exists
    to capture.
    """
    s = params.omega_over_delta
    grads = []
    for name in FIELD_NAMES:
        f0 = getattr(state, name)
        h = 1e-6 * max(1.0, abs(f0))

        def lam(dz: complex) -> complex:
            kwargs = {n: getattr(state, n) for n in FIELD_NAMES}
            kwargs[name] = f0 + dz
            shifted = FieldState(**kwargs).scaled(s)
            value, _ = _exact_branch_lambda(shifted, params, model, reference)
            return value

        d_re = (lam(h) - lam(-h)) / (2.0 * h)
        d_im = (lam(1j * h) - lam(-1j * h)) / (2.0 * h)
        grads.append(0.5 * (d_re + 1j * d_im) / (s * s))
    return tuple(grads)


def rhs_eigen_gradient(
    state: FieldState,
    params: SystemParams,
    spec: BackendSpec,
    reference: np.ndarray | int | None = None,
) -> FieldDerivatives:
    """dF/dzeta = -i kappa dlambda/dF* for the selected eigenvalue backend.

    A single coupling constant kappa is used for all four transitions.
    For the exact backend, ``reference`` selects the eigenbranch (default:
    the ground state |1>); callers doing continuation pass the previous
    eigenvector.
    """
    k = params.kappa
    if spec.method is Method.CLOSED_FORM:
        return rhs_closed_form(state, params, spec.effective_phase_terms())
    if spec.method is Method.PERT_EIGEN_GRADIENT:
        if spec.model is Model.FIVE_LEVEL or not spec.include_phase_terms:
            grads = grad_lambda0_pert_5(state, params.delta)
        else:
            grads = grad_lambda0_pert_4(state, params.delta)
    else:
        ref = 0 if reference is None else reference
        grads = _grad_exact(state, params, spec.model, ref)
    g_o1, g_o2, g_e1, g_e2 = grads
    return FieldDerivatives(
        -1j * k * g_o1, -1j * k * g_o2, -1j * k * g_e1, -1j * k * g_e2
    )


# Dormand-Prince 4(5) tableau, FSAL form, with the standard quartic
# dense-output interpolant.
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (  # b5 - b4
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)
_D = (
    -12715105075 / 11282082432,
    0.0,
    87487479700 / 32700410799,
    -10690763975 / 1880347072,
    701980252875 / 199316789632,
    -1453857185 / 822651844,
    69997945 / 29380423,
)


class _DenseSegment:
    """Quartic interpolant over one accepted step."""

    __slots__ = ("z0", "h", "r1", "r2", "r3", "r4", "r5")

    def __init__(self, z0, h, y0, y1, ks):
        self.z0 = z0
        self.h = h
        dy = y1 - y0
        self.r1 = y0
        self.r2 = dy
        self.r3 = h * ks[0] - dy
        self.r4 = dy - h * ks[6] - self.r3
        self.r5 = h * sum(d * k for d, k in zip(_D, ks))

    def __call__(self, z: float) -> np.ndarray:
        t = (z - self.z0) / self.h
        s = 1.0 - t
        return self.r1 + t * (self.r2 + s * (self.r3 + t * (self.r4 + s * self.r5)))


def _error_norm(err: np.ndarray, y0: np.ndarray, y1: np.ndarray, grid) -> float:
    sc = grid.abs_tol + grid.rel_tol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean((np.abs(err) / sc) ** 2)))


def _initial_step(f0: np.ndarray, y0: np.ndarray, grid: PropagationGrid) -> float:
    scale = np.linalg.norm(y0) + 1e-12
    rate = np.linalg.norm(f0) + 1e-12
    h = 0.01 * scale / rate
    return min(h, grid.max_step, grid.zeta_max - grid.zeta_start)


def integrate(
    initial: FieldState,
    params: SystemParams,
    spec: BackendSpec,
    grid: PropagationGrid,
) -> Trajectory:
    """Propagate the fields from zeta_start to zeta_max.

    Local error per step is held to rel_tol*|y| + abs_tol by the embedded
    pair; samples are emitted every ``sample_stride`` via dense output,
    each carrying freshly computed invariants and the generator
    eigenvalue.  The exact backend tracks its eigenbranch with the
    previous accepted step's eigenvector and halves the step on branch
    ambiguity (up to 40 times) before giving up.
    """
    from .analysis import invariants_of  # local import to avoid a cycle

    exact = spec.method is Method.EXACT_EIGEN_GRADIENT
    reference: np.ndarray | int = 0
    if exact:
        _, vec = _exact_branch_lambda(
            initial.scaled(params.omega_over_delta), params, spec.model, 0
        )
        reference = vec

    phase_on = spec.effective_phase_terms()

    def lambda0(state: FieldState) -> float:
        if phase_on:
            return lambda0_pert_4(state, params.delta)
        return lambda0_pert_5(state, params.delta)

    def f(y: np.ndarray) -> np.ndarray:
        state = FieldState.from_array(y)
        d = rhs_eigen_gradient(state, params, spec, reference if exact else None)
        return d.as_array()

    def make_sample(zeta: float, y: np.ndarray) -> TrajectorySample:
        state = FieldState.from_array(y)
        return TrajectorySample(zeta, state, invariants_of(state), lambda0(state))

    z = grid.zeta_start
    y = initial.as_array()
    samples = [make_sample(z, y)]
    next_sample = grid.zeta_start + grid.sample_stride

    k1 = f(y)
    h = _initial_step(k1, y, grid)
    ambiguous_halvings = 0

    while z < grid.zeta_max - 1e-14 * max(1.0, abs(grid.zeta_max)):
        h = min(h, grid.max_step, grid.zeta_max - z)
        if h < 1e-14 * max(1.0, abs(z)):
            raise StepSizeUnderflow(f"step {h:.3e} underflowed at zeta={z:.6g}")

        try:
            ks = [k1]
            for i in range(1, 7):
                yi = y + h * sum(a * k for a, k in zip(_A[i], ks))
                ks.append(f(yi))
            y1 = y + h * sum(b * k for b, k in zip(_B5, ks))
            err = h * sum(e * k for e, k in zip(_E, ks))
        except AmbiguousBranch:
            ambiguous_halvings += 1
            if ambiguous_halvings > 40:
                raise StepSizeUnderflow(
                    f"branch stayed ambiguous after 40 halvings at zeta={z:.6g}"
                )
            h *= 0.5
            continue

        norm = _error_norm(err, y, y1, grid)
        if norm <= 1.0:
            segment = _DenseSegment(z, h, y, y1, ks)
            z_new = z + h
            while next_sample <= z_new + 1e-14 * max(1.0, abs(z_new)):
                zs = min(next_sample, z_new)
                samples.append(make_sample(zs, segment(zs)))
                next_sample += grid.sample_stride
            z, y, k1 = z_new, y1, ks[6]
            ambiguous_halvings = 0
            if exact:
                _, reference = _exact_branch_lambda(
                    FieldState.from_array(y).scaled(params.omega_over_delta),
                    params,
                    spec.model,
                    reference,
                )
            factor = 5.0 if norm == 0.0 else min(5.0, max(0.2, 0.9 * norm ** -0.2))
        else:
            factor = max(0.2, 0.9 * norm ** -0.2)
        h *= factor

    if samples[-1].zeta < grid.zeta_max - 1e-12 * max(1.0, abs(grid.zeta_max)):
        samples.append(make_sample(z, y))
    return Trajectory(samples, spec)
