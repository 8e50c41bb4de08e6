"""Level-system core: interaction Hamiltonians and adiabatic eigenvalues.

Implements the single-atom complex interaction Hamiltonians of the
double-lambda four-level scheme and its hyperfine-split five-level
variant, together with the second-order (in field/detuning) eigenvalue
of the branch adiabatically connected to the ground state.  Everything
is expressed in units hbar = 1 with Rabi frequencies measured in units
of the reference pump amplitude.

Sign conventions are kept exactly as in the underlying model: the
four-level matrix enters with a global +hbar and negative field entries,
the five-level one with a global -hbar and positive field entries.  The
two conventions are intentionally not "fixed"; observable predictions do
not depend on them.

The five-level matrix distributes each split-transition coupling with a
1/sqrt(2) branching weight so that the summed oscillator strength of the
split pair equals that of the unsplit transition.  With that weight the
phase-free second-order eigenvalue (``lambda0_pert_5``) is the exact
second-order eigenvalue of the matrix; with unit weights it would come
out a factor 2 too large.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import AmbiguousBranch, ConvergenceFailure, DegenerateDenominator

__all__ = [
    "FieldState",
    "SystemParams",
    "EigenResult",
    "FIELD_NAMES",
    "build_hamiltonian_4",
    "build_hamiltonian_5",
    "eig_exact",
    "select_ground_branch",
    "lambda0_pert_4",
    "lambda0_pert_5",
    "grad_conjugate",
    "grad_lambda0_pert_4",
    "grad_lambda0_pert_5",
]

FIELD_NAMES = ("omega1", "omega2", "e1", "e2")

_SPLIT_WEIGHT = 1.0 / math.sqrt(2.0)


def _require_finite(name: str, z: complex) -> None:
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{name} must be finite, got {z!r}")


@dataclass(frozen=True)
class FieldState:
    """The four complex Rabi amplitudes at one propagation point.

    ``omega1``/``omega2`` are the pump fields, ``e1``/``e2`` the generated
    fields; the pair (omega1, e1) is on resonance, (omega2, e2) detuned.
    """

    omega1: complex
    omega2: complex
    e1: complex
    e2: complex

    def __post_init__(self):
        for name in FIELD_NAMES:
            _require_finite(name, getattr(self, name))

    def as_array(self) -> np.ndarray:
        return np.array([self.omega1, self.omega2, self.e1, self.e2], dtype=complex)

    @staticmethod
    def from_array(a: Sequence[complex]) -> "FieldState":
        return FieldState(complex(a[0]), complex(a[1]), complex(a[2]), complex(a[3]))

    def scaled(self, s: float) -> "FieldState":
        return FieldState(self.omega1 * s, self.omega2 * s, self.e1 * s, self.e2 * s)

    def resonant_intensity(self) -> float:
        """|Omega_1|^2 + |E_1|^2, the denominator of the adiabatic eigenvalue."""
        return abs(self.omega1) ** 2 + abs(self.e1) ** 2


@dataclass(frozen=True)
class SystemParams:
    """Atomic and propagation constants in internal units (Delta = kappa = 1).

    ``omega_over_delta`` sets the physical field scale Omega_0/Delta used
    only by the exact-eigenvalue backend, which is not scale invariant.
    """

    delta: float = 1.0
    gamma1: float = 0.01
    gamma2: float = 0.01
    kappa: float = 1.0
    omega_over_delta: float = 0.01

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.gamma1 < 0 or self.gamma2 < 0:
            raise ValueError("decay rates must be non-negative")
        if not self.kappa > 0:
            raise ValueError("kappa must be positive")
        if not 0 < self.omega_over_delta < 0.2:
            raise ValueError("omega_over_delta must lie in (0, 0.2)")


@dataclass(frozen=True)
class EigenResult:
    """One eigenpair of a small dense complex matrix."""

    value: complex
    vector: np.ndarray
    residual: float


def build_hamiltonian_4(fields: FieldState, params: SystemParams) -> np.ndarray:
    """4x4 complex interaction Hamiltonian in the basis (|1>,|2>,|3>,|4>).

    Off-diagonals carry -Omega/-E couplings, the diagonal is
    (0, 0, Delta - i*gamma2, -i*gamma1).
    """
    o1, o2, e1, e2 = fields.omega1, fields.omega2, fields.e1, fields.e2
    d, g1, g2 = params.delta, params.gamma1, params.gamma2
    return np.array(
        [
            [0.0, 0.0, -o2.conjugate(), -e1.conjugate()],
            [0.0, 0.0, -e2.conjugate(), -o1.conjugate()],
            [-o2, -e2, d - 1j * g2, 0.0],
            [-e1, -o1, 0.0, -1j * g1],
        ],
        dtype=complex,
    )


def build_hamiltonian_5(fields: FieldState, params: SystemParams) -> np.ndarray:
    """5x5 Hamiltonian of the hyperfine-split scheme, H = -(matrix).

    The detuned upper level is split into a pair at -Delta and +Delta and
    the second pump is tuned midway between them.  The E_2 coupling to the
    upper split level enters with opposite sign; each split coupling
    carries the 1/sqrt(2) branching weight (see module docstring).
    """
    o1 = fields.omega1
    e1 = fields.e1
    o2 = fields.omega2 * _SPLIT_WEIGHT
    e2 = fields.e2 * _SPLIT_WEIGHT
    d, g1, g2 = params.delta, params.gamma1, params.gamma2
    m = np.array(
        [
            [0.0, 0.0, o2.conjugate(), o2.conjugate(), e1.conjugate()],
            [0.0, 0.0, e2.conjugate(), -e2.conjugate(), o1.conjugate()],
            [o2, e2, -d - 1j * g2, 0.0, 0.0],
            [o2, -e2, 0.0, d - 1j * g2, 0.0],
            [e1, o1, 0.0, 0.0, -1j * g1],
        ],
        dtype=complex,
    )
    return -m


def eig_exact(m: np.ndarray) -> list[EigenResult]:
    """All eigenpairs of a small dense complex (non-Hermitian) matrix.

    Results are sorted by (Re, Im) of the eigenvalue for determinism.
    Raises ConvergenceFailure if any residual ||H v - lambda v|| exceeds
    1e-10 times the matrix norm.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in (4, 5):
        raise ValueError(f"expected a 4x4 or 5x5 matrix, got shape {m.shape}")
    scale = np.linalg.norm(m)
    try:
        values, vectors = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(f"dense eigensolver failed: {exc}") from exc
    results = []
    for i in range(m.shape[0]):
        v = vectors[:, i]
        v = v / np.linalg.norm(v)
        residual = float(np.linalg.norm(m @ v - values[i] * v))
        results.append(EigenResult(complex(values[i]), v, residual))
    bound = 1e-10 * max(scale, 1e-300)
    worst = max(r.residual for r in results)
    if worst > bound:
        raise ConvergenceFailure(
            f"eigenpair residual {worst:.3e} exceeds bound {bound:.3e}"
        )
    return sorted(results, key=lambda r: (r.value.real, r.value.imag))


def select_ground_branch(
    pairs: Sequence[EigenResult],
    reference: np.ndarray | int,
) -> EigenResult:
    """Pick the eigenpair adiabatically connected to the reference state.

    ``reference`` is either a basis index (initialization, e.g. 0 for the
    ground state |1>) or the previous step's eigenvector (continuation).
    Selection maximizes |<reference|vector>|; when the two best overlaps
    are closer than 1e-6 the tie is broken towards the branch with smaller
    |Im(lambda)|, and if that is degenerate too an AmbiguousBranch is
    raised so the caller can reduce its step.
    """
    if not pairs:
        raise ValueError("no eigenpairs supplied")
    dim = pairs[0].vector.shape[0]
    if isinstance(reference, (int, np.integer)):
        ref = np.zeros(dim, dtype=complex)
        ref[int(reference)] = 1.0
    else:
        ref = np.asarray(reference, dtype=complex)
        ref = ref / np.linalg.norm(ref)
    overlaps = [abs(np.vdot(ref, p.vector)) for p in pairs]
    order = sorted(range(len(pairs)), key=lambda i: -overlaps[i])
    best = order[0]
    if len(order) > 1 and overlaps[best] - overlaps[order[1]] < 1e-6:
        contenders = [i for i in order if overlaps[best] - overlaps[i] < 1e-6]
        ims = sorted(contenders, key=lambda i: abs(pairs[i].value.imag))
        if (
            len(ims) > 1
            and abs(pairs[ims[0]].value.imag) + 1e-12
            >= abs(pairs[ims[1]].value.imag)
        ):
            raise AmbiguousBranch(
                f"top overlaps differ by "
                f"{overlaps[best] - overlaps[order[1]]:.2e} (< 1e-6)"
            )
        best = ims[0]
    return pairs[best]


def _denominator(fields: FieldState) -> float:
    d = fields.resonant_intensity()
    if d < 1e-300:
        raise DegenerateDenominator(
            "|Omega_1|^2 + |E_1|^2 vanished; adiabatic eigenvalue undefined"
        )
    return d


def lambda0_pert_4(fields: FieldState, delta: float) -> float:
    """Second-order ground-branch eigenvalue of the four-level scheme.

    (1/Delta) * [ (O1 O2 E1* E2* + c.c.) - (|O1|^2|O2|^2 + |E1|^2|E2|^2) ]
    / (|O1|^2 + |E1|^2).  The first bracket is the four-wave mixing term,
    the second the ac-Stark shift.  Exactly real by construction.
    """
    o1, o2, e1, e2 = fields.omega1, fields.omega2, fields.e1, fields.e2
    den = _denominator(fields)
    mixing = 2.0 * (o1 * o2 * e1.conjugate() * e2.conjugate()).real
    stark = abs(o1) ** 2 * abs(o2) ** 2 + abs(e1) ** 2 * abs(e2) ** 2
    return (mixing - stark) / (den * delta)


def lambda0_pert_5(fields: FieldState, delta: float) -> float:
    """Second-order ground-branch eigenvalue of the five-level scheme.

    The mixing bracket of the four-level eigenvalue with no Stark term:
    the Stark shifts of the two oppositely detuned levels cancel.
    """
    o1, o2, e1, e2 = fields.omega1, fields.omega2, fields.e1, fields.e2
    den = _denominator(fields)
    mixing = 2.0 * (o1 * o2 * e1.conjugate() * e2.conjugate()).real
    return mixing / (den * delta)


def grad_conjugate(
    eigfn: Callable[[FieldState], complex],
    fields: FieldState,
    which: str,
) -> complex:
    """Wirtinger derivative d(eigfn)/dF* by central finite differences.

    For F = x + i y the conjugate derivative is (d/dx + i d/dy)/2,
    evaluated with step h = 1e-6 * max(1, |F|) on each real axis.
    """
    if which not in FIELD_NAMES:
        raise ValueError(f"unknown field selector {which!r}")
    f0 = getattr(fields, which)
    h = 1e-6 * max(1.0, abs(f0))

    def shifted(dz: complex) -> complex:
        kwargs = {name: getattr(fields, name) for name in FIELD_NAMES}
        kwargs[which] = f0 + dz
        return eigfn(FieldState(**kwargs))

    d_re = (shifted(h) - shifted(-h)) / (2.0 * h)
    d_im = (shifted(1j * h) - shifted(-1j * h)) / (2.0 * h)
    return 0.5 * (d_re + 1j * d_im)


def _mixing_stark_grads(fields: FieldState, delta: float):
    """Conjugate-Wirtinger gradients of the mixing and Stark brackets.

    Returns two 4-tuples ordered like FIELD_NAMES.  Organized by the
    quotient rule on num/den so it shares no algebra with the expanded
    closed-form equations of motion it is checked against.
    """
    o1, o2, e1, e2 = fields.omega1, fields.omega2, fields.e1, fields.e2
    den = _denominator(fields)
    prod = o1 * o2 * e1.conjugate() * e2.conjugate()
    mix_num = prod + prod.conjugate()
    stark_num = abs(o1) ** 2 * abs(o2) ** 2 + abs(e1) ** 2 * abs(e2) ** 2

    # d(num)/dF* for each field; denominator depends only on omega1, e1.
    mix_d = {
        "omega1": o2.conjugate() * e1 * e2,
        "omega2": o1.conjugate() * e1 * e2,
        "e1": o1 * o2 * e2.conjugate(),
        "e2": o1 * o2 * e1.conjugate(),
    }
    stark_d = {
        "omega1": abs(o2) ** 2 * o1,
        "omega2": abs(o1) ** 2 * o2,
        "e1": abs(e2) ** 2 * e1,
        "e2": abs(e1) ** 2 * e2,
    }
    den_d = {"omega1": o1, "omega2": 0.0, "e1": e1, "e2": 0.0}

    mix = tuple(
        (mix_d[n] * den - mix_num * den_d[n]) / (den * den * delta)
        for n in FIELD_NAMES
    )
    stark = tuple(
        (stark_d[n] * den - stark_num * den_d[n]) / (den * den * delta)
        for n in FIELD_NAMES
    )
    return mix, stark


def grad_lambda0_pert_4(fields: FieldState, delta: float) -> tuple[complex, ...]:
    """Closed-form conjugate gradient of lambda0_pert_4, ordered as FIELD_NAMES."""
    mix, stark = _mixing_stark_grads(fields, delta)
    return tuple(m - s for m, s in zip(mix, stark))


def grad_lambda0_pert_5(fields: FieldState, delta: float) -> tuple[complex, ...]:
    """Closed-form conjugate gradient of lambda0_pert_5, ordered as FIELD_NAMES."""
    mix, _ = _mixing_stark_grads(fields, delta)
    return mix
