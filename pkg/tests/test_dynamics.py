"""Time steppers against exact solutions and conservation laws."""

import numpy as np
import pytest

from dnlslab import (
    LatticeState,
    Trajectory,
    hamiltonian,
    integrate,
    l2_norm,
    step_rk4,
    step_splitstep,
)
from dnlslab.dynamics import NumericalBlowupError

from conftest import plane_wave, random_state


def exact_plane_wave(n, mode, a, nu, t):
    """u(t) = a e^{i omega g} e^{-i (2 cos omega - 2 + nu a^2) t}."""
    g = np.arange(n)
    omega = 2.0 * np.pi * mode / n
    phase = -(2.0 * np.cos(omega) - 2.0 + nu * a**2) * t
    return a * np.exp(1j * omega * g) * np.exp(1j * phase)


class TestExactness:
    def test_splitstep_exact_on_plane_waves(self):
        # both substeps act as the same phase rotation on a plane wave, so
        # Strang splitting is exact there for any tau
        n, mode, a, nu, tau = 16, 3, 0.8, 1, 0.37
        u = plane_wave(n, mode, a)
        for k in range(1, 6):
            u = step_splitstep(u, nu, tau)
            expected = exact_plane_wave(n, mode, a, nu, k * tau)
            assert np.max(np.abs(u.values - expected)) < 1e-13 * k

    def test_nu_zero_is_exact_linear_flow(self, rng):
        # with the nonlinearity off, one step is the exact Fourier phase flow
        u = random_state(rng, 32)
        tau = 0.51
        v = step_splitstep(u, 0, tau)
        omega = 2.0 * np.pi * np.fft.fftfreq(32)
        exact = np.fft.ifft(np.exp(4j * tau * np.sin(omega / 2.0) ** 2) * np.fft.fft(u.values))
        assert np.max(np.abs(v.values - exact)) < 1e-13


class TestOrders:
    def test_rk4_local_order(self, rng):
        # one-step error O(tau^5): halving tau shrinks it by ~32
        u = random_state(rng, 16)
        u = u.with_values(0.3 * u.values)  # stay well inside stability
        nu = 1

        def err(tau):
            ref = u
            for _ in range(1024):
                ref = step_rk4(ref, nu, tau / 1024)
            one = step_rk4(u, nu, tau)
            return np.max(np.abs(one.values - ref.values))

        e1, e2 = err(0.2), err(0.1)
        assert 20.0 < e1 / e2 < 45.0

    def test_splitstep_local_order(self, rng):
        # Strang is second order: one-step error O(tau^3), factor ~8
        u = random_state(rng, 16)
        u = u.with_values(0.3 * u.values)
        nu = -1

        def err(tau):
            ref = u
            for _ in range(512):
                ref = step_rk4(ref, nu, tau / 512)
            one = step_splitstep(u, nu, tau)
            return np.max(np.abs(one.values - ref.values))

        e1, e2 = err(0.2), err(0.1)
        assert 5.5 < e1 / e2 < 10.5

    def test_steppers_agree(self, rng):
        # independent integrators land on the same state at small tau
        u0 = random_state(rng, 16)
        tau, steps, nu = 1e-3, 200, 1
        a, b = u0, u0
        for _ in range(steps):
            a = step_splitstep(a, nu, tau)
            b = step_rk4(b, nu, tau)
        assert np.max(np.abs(a.values - b.values)) < 1e-5


class TestConservation:
    def test_l2_exact(self, rng):
        u = random_state(rng, 32)
        m0 = l2_norm(u)
        for _ in range(500):
            u = step_splitstep(u, 1, 1e-2)
        assert abs(l2_norm(u) - m0) < 1e-12 * m0

    def test_hamiltonian_drift_is_second_order(self, rng):
        u0 = random_state(rng, 16)
        nu = 1
        h0 = hamiltonian(u0, nu)

        def drift(tau, steps):
            u = u0
            for _ in range(steps):
                u = step_splitstep(u, nu, tau)
            return abs(hamiltonian(u, nu) - h0)

        d1 = drift(1e-2, 100)
        d2 = drift(5e-3, 200)
        assert 3.0 < d1 / d2 < 5.5

    def test_time_reversibility(self, rng):
        u0 = random_state(rng, 16)
        u = u0
        for _ in range(50):
            u = step_splitstep(u, -1, 1e-2)
        for _ in range(50):
            u = step_splitstep(u, -1, -1e-2)
        assert np.max(np.abs(u.values - u0.values)) < 1e-12

    def test_phase_equivariance(self, rng):
        # u -> e^{i theta} u commutes with the flow
        u = random_state(rng, 16)
        theta = 0.91
        a = step_splitstep(u.with_values(np.exp(1j * theta) * u.values), 1, 0.05)
        b = step_splitstep(u, 1, 0.05)
        assert np.max(np.abs(a.values - np.exp(1j * theta) * b.values)) < 1e-13


class TestIntegrate:
    def test_observer_series(self, rng):
        u = random_state(rng, 16)
        traj = integrate(u, 1, 1e-2, 0.5, {"l2": l2_norm}, record_every=10)
        assert traj.times[0] == 0.0
        assert traj.times[-1] == pytest.approx(0.5)
        series = traj.observables["l2"]
        assert series.shape == traj.times.shape
        np.testing.assert_allclose(series, l2_norm(u), rtol=1e-12)

    def test_keep_states(self, rng):
        u = random_state(rng, 16)
        traj = integrate(u, 1, 1e-2, 0.1, record_every=5, keep_states=True)
        assert len(traj.states) == traj.times.size
        assert np.array_equal(traj.states[0].values, u.values)

    def test_deterministic(self, rng):
        u = random_state(rng, 16)
        a = integrate(u, -1, 1e-2, 0.3, {"l2": l2_norm})
        b = integrate(u, -1, 1e-2, 0.3, {"l2": l2_norm})
        assert np.array_equal(a.observables["l2"], b.observables["l2"])

    def test_blowup_detected(self):
        # focusing RK4 with a huge state and large tau overflows fast
        n = 16
        u = LatticeState(np.full(n, 1e150, dtype=np.complex128))
        with pytest.raises(NumericalBlowupError):
            integrate(u, 1, 0.5, 5.0, stepper=step_rk4)

    def test_argument_validation(self, rng):
        u = random_state(rng, 16)
        with pytest.raises(ValueError):
            integrate(u, 1, -1e-2, 1.0)
        with pytest.raises(ValueError):
            integrate(u, 1, 1e-2, 1.0, record_every=0)
        with pytest.raises(ValueError):
            step_splitstep(u, 3, 1e-2)


class TestTrajectory:
    def test_validation(self):
        with pytest.raises(ValueError):
            Trajectory(times=np.array([0.0, 0.5, 0.5]), observables={})
        with pytest.raises(ValueError):
            Trajectory(times=np.array([0.1, 0.2]), observables={})
        with pytest.raises(ValueError):
            Trajectory(times=np.array([0.0, 0.1]), observables={"x": np.zeros(3)})
