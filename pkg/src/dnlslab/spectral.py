"""Discrete Fourier transform, Fourier symbols and Shannon interpolation.

Conventions (h = 1 throughout this module):

* modes are ``omega_j = 2*pi*j/N`` for ``j in {-N/2, ..., N/2 - 1}``, stored
  in increasing-j ("centered") order;
* the transform is ``uhat(omega_j) = sum_g u_g exp(+i g omega_j)``, inverted
  by ``u_g = (1/N) sum_j uhat_j exp(-i g omega_j)``;
* integrals over [-pi, pi) are approximated by the rectangle rule with
  weight 2*pi/N per mode.  This quadrature is *exact* for trigonometric
  polynomials of degree < N, which covers every symbol used downstream, so
  the algebraic identities of the energy machinery hold to rounding error
  rather than to discretisation error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import LatticeState


@dataclass(frozen=True)
class SpectralState:
    """Fourier coefficients uhat_j on the centered mode grid."""

    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        object.__setattr__(self, "coeffs", coeffs)
        if coeffs.ndim != 1 or coeffs.size < 8 or coeffs.size % 2 != 0:
            raise ValueError("spectral coefficients must be a 1-d array of even length >= 8")

    @property
    def n_points(self) -> int:
        return self.coeffs.size

    @property
    def modes(self) -> np.ndarray:
        return mode_grid(self.n_points)


def mode_grid(n: int) -> np.ndarray:
    """Centered mode grid omega_j = 2*pi*j/N, j = -N/2 .. N/2 - 1."""
    return 2.0 * np.pi * np.arange(-n // 2, n // 2) / n


def dft(u: LatticeState) -> SpectralState:
    """uhat(omega_j) = sum_g u_g exp(+i g omega_j).

    numpy's ifft uses the +i kernel, so the transform is N * ifft followed by
    a shift into centered mode order.
    """
    n = u.n_points
    return SpectralState(np.fft.fftshift(n * np.fft.ifft(u.values)))


def idft(v: SpectralState, stepsize: float = 1.0) -> LatticeState:
    """Inverse of :func:`dft`: u_g = (1/N) sum_j uhat_j exp(-i g omega_j)."""
    n = v.n_points
    return LatticeState(np.fft.fft(np.fft.ifftshift(v.coeffs)) / n, stepsize)


def linear_symbol(n: int) -> np.ndarray:
    """Fourier symbol of the discrete Laplacian: 2*cos(omega) - 2 = -4 sin^2(omega/2)."""
    return 2.0 * np.cos(mode_grid(n)) - 2.0


def symbol_norm(v: SpectralState, n: int) -> float:
    """Discrete Sobolev norm from the Fourier side.

    ||u||_{Hdot n}^2 = (1/2pi) int (2 sin(omega/2))^{2n} |uhat|^2 domega,
    realised with the rectangle rule (weight 2*pi/N per mode).
    """
    if n < 0:
        raise ValueError("Sobolev order must be nonnegative")
    sym = (2.0 * np.sin(np.abs(v.modes) / 2.0)) ** (2 * n)
    return float(np.sqrt(np.sum(sym * np.abs(v.coeffs) ** 2) / v.n_points))


def continuous_sobolev(v: SpectralState, n: int) -> float:
    """Norm ||d^n/dx^n Iu||_{L2(R)} of the Shannon interpolant.

    Equals ((1/2pi) int omega^{2n} |uhat|^2 domega)^{1/2} because the
    interpolant is band-limited to [-pi, pi].
    """
    if n < 0:
        raise ValueError("Sobolev order must be nonnegative")
    return float(np.sqrt(np.sum(np.abs(v.modes) ** (2 * n) * np.abs(v.coeffs) ** 2) / v.n_points))


def shannon_eval(u: LatticeState, x, n_periods: int = 3):
    """Shannon interpolant Iu(x) = sum_g u_g sinc(pi (x - g)), periodised.

    The infinite sum over Z is replaced by a sum over the grid and its
    ``n_periods`` nearest periodic images on each side.  At integer x the
    result is exact (the sinc kernel vanishes on all other lattice points);
    off the lattice the truncation error decays like 1/(n_periods * N).
    """
    x = np.asarray(x, dtype=np.float64)
    scalar = x.ndim == 0
    xs = np.atleast_1d(x)
    n = u.n_points
    g = np.arange(n)
    shifts = n * np.arange(-n_periods, n_periods + 1)
    # offsets[i, g, p] = x_i - g - p*N
    offsets = xs[:, None, None] - g[None, :, None] - shifts[None, None, :]
    kernel = np.sinc(offsets).sum(axis=2)  # np.sinc(t) = sin(pi t)/(pi t)
    out = kernel @ u.values
    return complex(out[0]) if scalar else out


def nonlinear_symbol(v: SpectralState) -> SpectralState:
    """Transform of the cubic nonlinearity |u|^2 u via circular convolution.

    On the line the transform of |u|^2 u is the aliased triple convolution
    uhat * conj-uhat * uhat with shifts 2*pi*k, k in {-1, 0, 1}.  On the
    N-point grid those shifts are exactly the wraparound of mod-N index
    arithmetic, so the circular convolution absorbs the aliasing sum: an
    index sum j1 - j2 + j3 that leaves [-N/2, N/2) re-enters from the other
    side, which is the grid image of omega + 2*pi*k.
    """
    n = v.n_points
    a = np.fft.ifftshift(v.coeffs)  # uhat in fft index order
    b = np.conj(a[(-np.arange(n)) % n])  # transform of conj(u): conj(uhat(-omega))
    # circular convolution of three length-N sequences via the convolution
    # theorem, then 1/N^2 to match dft(|u|^2 u)
    conv = np.fft.ifft(np.fft.fft(a) * np.fft.fft(b) * np.fft.fft(a))
    return SpectralState(np.fft.fftshift(conv / n**2))


def dnls_rhs_spectral(v: SpectralState, nu: int) -> SpectralState:
    """Fourier-side right-hand side: d/dt uhat with i*duhat/dt = symbol*uhat + nu*NL.

    Returns duhat/dt = -i * [(2 cos omega - 2) uhat + nu * F(|u|^2 u)].
    """
    nl = nonlinear_symbol(v).coeffs
    return SpectralState(-1j * (linear_symbol(v.n_points) * v.coeffs + nu * nl))
