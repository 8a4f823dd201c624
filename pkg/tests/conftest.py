import numpy as np
import pytest

from dnlslab import LatticeState, SpectralState
from dnlslab.spectral import idft, mode_grid


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_state(rng, n=32, stepsize=1.0):
    """Dense complex Gaussian state."""
    return LatticeState(rng.normal(size=n) + 1j * rng.normal(size=n), stepsize)


def random_bandlimited(rng, n=32, cutoff=None, l2_size=None):
    """Random state supported on modes |j| <= cutoff (default N/8)."""
    if cutoff is None:
        cutoff = n // 8
    coeffs = np.zeros(n, dtype=np.complex128)
    j = np.arange(-n // 2, n // 2)
    band = np.abs(j) <= cutoff
    coeffs[band] = rng.normal(size=band.sum()) + 1j * rng.normal(size=band.sum())
    u = idft(SpectralState(coeffs))
    if l2_size is not None:
        from dnlslab import l2_norm

        u = u.with_values(u.values * (l2_size / l2_norm(u)))
    return u


def plane_wave(n, mode, amplitude=1.0, stepsize=1.0):
    g = np.arange(n)
    return LatticeState(amplitude * np.exp(2j * np.pi * mode * g / n), stepsize)


def spike(n, amplitude=1.0, stepsize=1.0):
    values = np.zeros(n, dtype=np.complex128)
    values[0] = amplitude
    return LatticeState(values, stepsize)


def single_mode_spectral(n, mode, amplitude=1.0):
    coeffs = np.zeros(n, dtype=np.complex128)
    coeffs[mode + n // 2] = amplitude
    return SpectralState(coeffs)


__all__ = [
    "random_state",
    "random_bandlimited",
    "plane_wave",
    "spike",
    "single_mode_spectral",
    "mode_grid",
]
