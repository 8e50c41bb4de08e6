"""Equations of motion, backend agreement, and the adaptive integrator."""
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lambda_mixer.analysis import SeedSpec, invariants_of, make_initial_state, relative_phase
from lambda_mixer.errors import DegenerateDenominator, UndefinedPhase
from lambda_mixer.levelsys import FieldState, SystemParams, grad_conjugate, lambda0_pert_4
from lambda_mixer.propagator import (
    BackendSpec,
    Method,
    Model,
    PropagationGrid,
    integrate,
    rhs_closed_form,
    rhs_eigen_gradient,
)

from oracles import full_field_reference

PARAMS = SystemParams(gamma1=0.0, gamma2=0.0)


def spec(model=Model.FOUR_LEVEL, method=Method.CLOSED_FORM, phase=True):
    return BackendSpec(model, method, phase)


@st.composite
def field_states(draw, min_size=0.05, max_size=1.5):
    mods = [draw(st.floats(min_size, max_size)) for _ in range(4)]
    phs = [draw(st.floats(-math.pi, math.pi)) for _ in range(4)]
    return FieldState(*[m * complex(math.cos(p), math.sin(p)) for m, p in zip(mods, phs)])


class TestClosedForm:
    def test_seed_free_phase_terms_only(self):
        d = rhs_closed_form(FieldState(1, 1, 0, 0), PARAMS, True)
        assert d.d_e1 == 0
        assert d.d_e2 == 0
        assert d.d_omega1 == 0
        assert d.d_omega2 == pytest.approx(1j)

    def test_seed_free_stationary_without_phase_terms(self):
        d = rhs_closed_form(FieldState(1, 1, 0, 0), PARAMS, False)
        assert np.all(d.as_array() == 0)

    def test_matches_wirtinger_gradient_at_spec_state(self):
        amp = 0.1 * np.exp(1j * math.pi / 8)
        state = FieldState(1, 1, amp, amp)
        d = rhs_closed_form(state, PARAMS, True).as_array()
        oracle = np.array([
            -1j * grad_conjugate(lambda s: lambda0_pert_4(s, 1.0), state, name)
            for name in ("omega1", "omega2", "e1", "e2")
        ])
        np.testing.assert_allclose(d, oracle, atol=1e-10)

    def test_kappa_delta_scaling(self):
        state = FieldState(1, 1, 0.1, 0.2j)
        base = rhs_closed_form(state, PARAMS, True).as_array()
        scaled = rhs_closed_form(
            state, SystemParams(delta=2.0, gamma1=0, gamma2=0, kappa=3.0), True
        ).as_array()
        np.testing.assert_allclose(scaled, 1.5 * base, rtol=1e-14)

    def test_degenerate_denominator(self):
        with pytest.raises(DegenerateDenominator):
            rhs_closed_form(FieldState(0, 1, 0, 1), PARAMS, True)

    @given(field_states())
    def test_intensity_balance(self, state):
        """Differential form of the pairwise intensity conservation laws."""
        for phase in (True, False):
            d = rhs_closed_form(state, PARAMS, phase)
            pair1 = (state.omega1.conjugate() * d.d_omega1).real + (
                state.e1.conjugate() * d.d_e1
            ).real
            pair2 = (state.omega2.conjugate() * d.d_omega2).real + (
                state.e2.conjugate() * d.d_e2
            ).real
            scale = max(1.0, float(np.max(np.abs(d.as_array()))))
            assert abs(pair1) <= 1e-12 * scale
            assert abs(pair2) <= 1e-12 * scale


class TestEigenGradientBackends:
    def test_five_level_equals_no_phase_closed_form(self, rng):
        s5 = spec(Model.FIVE_LEVEL, Method.PERT_EIGEN_GRADIENT)
        for _ in range(25):
            mods = rng.uniform(0.05, 1.5, 4)
            phs = rng.uniform(-math.pi, math.pi, 4)
            state = FieldState(*(mods * np.exp(1j * phs)))
            a = rhs_eigen_gradient(state, PARAMS, s5).as_array()
            b = rhs_closed_form(state, PARAMS, False).as_array()
            assert np.max(np.abs(a - b)) <= 1e-12 * max(1.0, np.max(np.abs(b)))

    def test_four_level_pert_equals_closed_form(self, rng):
        s4 = spec(method=Method.PERT_EIGEN_GRADIENT)
        for _ in range(25):
            mods = rng.uniform(0.05, 1.5, 4)
            phs = rng.uniform(-math.pi, math.pi, 4)
            state = FieldState(*(mods * np.exp(1j * phs)))
            a = rhs_eigen_gradient(state, PARAMS, s4).as_array()
            b = rhs_closed_form(state, PARAMS, True).as_array()
            assert np.max(np.abs(a - b)) <= 1e-10 * max(1.0, np.max(np.abs(b)))

    def test_phase_flag_selects_mixing_only_gradient(self):
        state = FieldState(1, 1, 0.2, 0.1j)
        a = rhs_eigen_gradient(
            state, PARAMS, spec(method=Method.PERT_EIGEN_GRADIENT, phase=False)
        ).as_array()
        b = rhs_closed_form(state, PARAMS, False).as_array()
        np.testing.assert_allclose(a, b, atol=1e-14)

    @pytest.mark.parametrize("model", [Model.FOUR_LEVEL, Model.FIVE_LEVEL])
    def test_exact_backend_third_order_close(self, model):
        params = SystemParams(gamma1=0.0, gamma2=0.0, omega_over_delta=0.01)
        state = make_initial_state(SeedSpec(1e-2, math.pi / 4))
        exact = rhs_eigen_gradient(
            state, params, spec(model, Method.EXACT_EIGEN_GRADIENT)
        ).as_array()
        pert = rhs_eigen_gradient(
            state, params, spec(model, Method.PERT_EIGEN_GRADIENT)
        ).as_array()
        scale = float(np.max(np.abs(pert)))
        assert np.max(np.abs(exact - pert)) <= 0.05 * scale


class TestIntegrate:
    def test_seed_free_no_phase_is_stationary(self):
        grid = PropagationGrid(zeta_max=100.0, sample_stride=1.0)
        traj = integrate(FieldState(1, 1, 0, 0), PARAMS, spec(phase=False), grid)
        for s in traj.samples:
            assert abs(abs(s.state.omega1) ** 2 - 1.0) <= 1e-12
            assert abs(abs(s.state.omega2) ** 2 - 1.0) <= 1e-12
            assert abs(s.state.e1) == 0.0
            assert abs(s.state.e2) == 0.0

    def test_seed_free_with_phase_pure_rotation(self):
        grid = PropagationGrid(zeta_max=100.0, sample_stride=0.5)
        traj = integrate(FieldState(1, 1, 0, 0), PARAMS, spec(phase=True), grid)
        for s in traj.samples:
            assert abs(s.state.omega2) == pytest.approx(1.0, abs=1e-8)
            rotated = complex(math.cos(s.zeta), math.sin(s.zeta))
            assert abs(s.state.omega2 - rotated) < 1e-7

    def test_first_sample_is_exact_initial_condition(self):
        initial = make_initial_state(SeedSpec(1e-3, math.pi / 4))
        grid = PropagationGrid(zeta_max=1.0, sample_stride=0.1)
        traj = integrate(initial, PARAMS, spec(), grid)
        assert traj.samples[0].zeta == 0.0
        assert traj.samples[0].state == initial

    def test_samples_on_stride_grid_and_increasing(self):
        grid = PropagationGrid(zeta_max=3.0, sample_stride=0.25)
        traj = integrate(make_initial_state(SeedSpec(0.01, 0.5)), PARAMS, spec(), grid)
        zs = traj.zetas()
        assert np.all(np.diff(zs) > 0)
        expected = np.arange(0.0, 3.0 + 1e-9, 0.25)
        np.testing.assert_allclose(zs, expected, atol=1e-12)

    def test_matches_scipy_reference(self):
        initial = make_initial_state(SeedSpec(1e-2, math.pi / 4))
        grid = PropagationGrid(
            zeta_max=12.0, rel_tol=1e-11, abs_tol=1e-13, sample_stride=0.5
        )
        traj = integrate(initial, PARAMS, spec(phase=True), grid)
        zs = traj.zetas()
        reference = full_field_reference(initial.as_array(), zs, phase_on=True)
        ours = np.array([s.state.as_array() for s in traj.samples])
        assert np.max(np.abs(ours - reference)) < 1e-8

    def test_conservation_along_trajectory(self):
        initial = make_initial_state(SeedSpec(1e-3, math.pi / 4))
        grid = PropagationGrid(zeta_max=60.0, rel_tol=1e-10, sample_stride=0.05)
        traj = integrate(initial, PARAMS, spec(phase=True), grid)
        inv0 = traj.samples[0].invariants
        for s in traj.samples:
            assert abs(s.invariants.c1 - inv0.c1) <= 1e-8 * inv0.c1
            assert abs(s.invariants.c2 - inv0.c2) <= 1e-8 * inv0.c2
            assert abs(s.invariants.c3 - inv0.c3) <= 1e-8 * inv0.c1

    def test_no_phase_c4_conserved(self):
        initial = make_initial_state(SeedSpec(1e-3, math.pi / 4))
        grid = PropagationGrid(zeta_max=18.0, rel_tol=1e-10, sample_stride=0.02)
        traj = integrate(initial, PARAMS, spec(phase=False), grid)
        c4_0 = traj.samples[0].invariants.c4
        drift = max(abs(s.invariants.c4 - c4_0) for s in traj.samples)
        assert drift <= 1e-8 * abs(c4_0)

    def test_scale_invariance_binary_factors(self):
        """Scaling the fields by powers of two scales the trajectory exactly."""
        base = make_initial_state(SeedSpec(1e-2, math.pi / 4))
        grid = PropagationGrid(
            zeta_max=8.0, rel_tol=1e-9, abs_tol=0.0, sample_stride=0.25
        )
        reference = integrate(base, PARAMS, spec(), grid)
        for s in (0.5, 2.0):
            scaled = integrate(base.scaled(s), PARAMS, spec(), grid)
            for a, b in zip(reference.samples, scaled.samples):
                diff = np.max(np.abs(b.state.as_array() - s * a.state.as_array()))
                assert diff <= 1e-9 * s

    def test_backend_agreement_over_cycle(self):
        initial = make_initial_state(SeedSpec(1e-2, math.pi / 4))
        grid = PropagationGrid(zeta_max=10.0, rel_tol=1e-10, sample_stride=0.2)
        a = integrate(initial, PARAMS, spec(method=Method.CLOSED_FORM), grid)
        b = integrate(initial, PARAMS, spec(method=Method.PERT_EIGEN_GRADIENT), grid)
        for sa, sb in zip(a.samples, b.samples):
            assert np.max(np.abs(sa.state.as_array() - sb.state.as_array())) <= 1e-8

    def test_phase_jump_property_single_seed(self):
        """Single-seeded no-phase run: phi sits at +-pi/2 wherever defined."""
        initial = FieldState(1.0, 1.0, 0.1, 0.0)
        grid = PropagationGrid(zeta_max=12.0, rel_tol=1e-11, sample_stride=0.01)
        traj = integrate(initial, PARAMS, spec(phase=False), grid)
        checked = 0
        for s in traj.samples:
            amps = [abs(getattr(s.state, n)) for n in ("omega1", "omega2", "e1", "e2")]
            if min(amps) < 1e-3:  # cycle boundary, phase jumping
                continue
            phi = relative_phase(s.state)
            assert abs(abs(phi) - math.pi / 2) < 1e-5
            checked += 1
        assert checked > 100

    def test_exact_backend_short_trajectory_close_to_pert(self):
        initial = make_initial_state(SeedSpec(1e-2, math.pi / 4))
        params = SystemParams(gamma1=0.0, gamma2=0.0, omega_over_delta=0.01)
        grid = PropagationGrid(zeta_max=0.5, rel_tol=1e-8, sample_stride=0.1)
        exact = integrate(
            initial, params, spec(method=Method.EXACT_EIGEN_GRADIENT), grid
        )
        pert = integrate(
            initial, params, spec(method=Method.PERT_EIGEN_GRADIENT), grid
        )
        for sa, sb in zip(exact.samples, pert.samples):
            assert np.max(np.abs(sa.state.as_array() - sb.state.as_array())) < 2e-2

    def test_degenerate_initial_state_raises(self):
        grid = PropagationGrid(zeta_max=1.0, sample_stride=0.1)
        with pytest.raises(DegenerateDenominator):
            integrate(FieldState(0, 1, 0, 1), PARAMS, spec(), grid)

    def test_lambda0_channel_tracks_generator(self):
        initial = make_initial_state(SeedSpec(1e-2, math.pi / 4))
        grid = PropagationGrid(zeta_max=2.0, sample_stride=0.5)
        traj = integrate(initial, PARAMS, spec(phase=True), grid)
        for s in traj.samples:
            assert s.lambda0 == pytest.approx(lambda0_pert_4(s.state, 1.0))


class TestPropagationGrid:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"zeta_max": 0.0},
            {"zeta_max": 1.0, "rel_tol": 1e-2},
            {"zeta_max": 1.0, "rel_tol": 1e-15},
            {"zeta_max": 1.0, "sample_stride": 0.0},
            {"zeta_max": -1.0},
        ],
    )
    def test_invalid_rejected(self, kwargs):
        with pytest.raises(ValueError):
            PropagationGrid(**kwargs)


class TestRelativePhaseGuards:
    def test_undefined_phase_on_zero_amplitude(self):
        with pytest.raises(UndefinedPhase):
            relative_phase(FieldState(1, 1, 0.1, 0))

    def test_invariants_snapshot_matches_direct_call(self):
        initial = make_initial_state(SeedSpec(1e-2, 0.3))
        grid = PropagationGrid(zeta_max=1.0, sample_stride=0.25)
        traj = integrate(initial, PARAMS, spec(), grid)
        for s in traj.samples:
            assert s.invariants == invariants_of(s.state)
