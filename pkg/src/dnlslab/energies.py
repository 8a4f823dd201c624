"""Modified-energy machinery: weight functions, resonant multipliers and
the multilinear spectral functionals.

A point of the resonant set V_m is a tuple (w_1..w_m, w_{-1}..w_{-m}) with
sum(w_j - w_{-j}) = 0 mod 2*pi.  The functional Lambda_m integrates a
multiplier against products of Fourier coefficients over V_m.  On the
N-point mode grid the free variables are w_1..w_m, w_{-1}..w_{-(m-1)}; the
last one is determined by resonance and folded back into [-pi, pi), which
realises the aliasing shifts of the continuous theory.

Measure convention.  The quadrature weight is ``2*pi / N**(2m-1)``: one
factor 2*pi/N for the first variable and 1/N for every further one.  This is
the unique normalisation for which the Hamiltonian identity

    2*pi*H(u) = 1/2 int (2 sin(w/2))^2 |uhat|^2 dw - (nu/4) Lambda_2(1, uhat)

and the derivative identity

    i d/dt Lambda_m(mu, uhat) = 2 Lambda_m(mu * D_m cos, uhat)
                                + nu Lambda_{m+1}(S_m mu, uhat)

hold exactly (to rounding error) on the grid; it pins down the measure on
V_m that the continuous formulas presuppose.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.special import comb, eval_chebyu

from .lattice import LatticeState, _check_nu, hamiltonian  # noqa: F401  (hamiltonian re-exported for identity checks)
from .spectral import SpectralState, dft, dnls_rhs_spectral, mode_grid

TWO_PI = 2.0 * np.pi

LAMBDA3_DEFAULT_MAX_N = 32  # the Lambda_3 sum is O(N^5)


class BudgetError(RuntimeError):
    """A resonant sum was refused because it exceeds its cost budget."""


# ---------------------------------------------------------------------------
# weight functions f_n
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OddCosineSeries:
    """Trigonometric polynomial 1 + sum_k beta_k cos((2k+1) w).

    These series are even around 0 and, up to the constant, odd around pi/2;
    f(0) = 0 is enforced by 1 + sum(beta) = 0.  ``alpha`` is the equivalence
    constant min_{(0, pi]} f(w)/w^(2 order), so that
    alpha * w^(2 order) <= f(w) on [-pi, pi].
    """

    order: int
    constant: float
    beta: np.ndarray
    alpha: float

    def __post_init__(self):
        beta = np.asarray(self.beta, dtype=np.float64)
        object.__setattr__(self, "beta", beta)
        if beta.size != self.order:
            raise ValueError("need exactly `order` odd-cosine coefficients")
        if abs(self.constant - 1.0) > 1e-13:
            raise ValueError("series is normalised to f(pi/2) = 1")
        if abs(self.constant + beta.sum()) > 1e-12:
            raise ValueError("coefficients must satisfy f(0) = 0")

    @property
    def mu_sup_bound(self) -> float:
        """Pointwise bound for the multiplier built on this series:
        |mu| <= (1/4) sum |beta_k| (2k+1)^3."""
        k = np.arange(self.order)
        return 0.25 * float(np.sum(np.abs(self.beta) * (2 * k + 1) ** 3))


def fn_product_form(n: int, omega) -> np.ndarray:
    """Closed form f_n(w) = 1 - cos(w) sum_{k<n} (C(2k,k)/4^k) sin^{2k}(w).

    Near w = 0 the subtraction cancels catastrophically (f_n ~ w^{2n} falls
    below double epsilon for n >= 4 at w ~ 1e-2), so where cos(w) > 0 and
    sin^2(w) <= 1/2 the complement is summed instead: the partial sum is cut
    from the generating series sum_k (C(2k,k)/4^k) x^k = (1 - x)^{-1/2}, whose
    value at x = sin^2(w) is 1/cos(w), hence

        f_n(w) = cos(w) * sum_{k>=n} (C(2k,k)/4^k) sin^{2k}(w).

    The tail terms decay at least geometrically with ratio 1/2 there.
    """
    omega = np.asarray(omega, dtype=np.float64)
    k = np.arange(n)
    coeff = comb(2 * k, k) / 4.0**k
    s2 = np.sin(omega)[..., None] ** (2 * k)
    direct = 1.0 - np.cos(omega) * (s2 @ coeff)

    c = np.cos(omega)
    x = np.sin(omega) ** 2
    small = (c > 0.0) & (x <= 0.5)
    x = np.where(small, x, 0.0)
    term = float(comb(2 * n, n)) / 4.0**n * x**n
    tail = np.zeros_like(term)
    for j in range(n, n + 60):  # ratio <= 1/2 per term: 60 terms reach ~1e-18
        tail = tail + term
        term = term * x * (2 * j + 1) / (2 * j + 2)
    return np.where(small, c * tail, direct)


@lru_cache(maxsize=None)
def build_fn(n: int) -> OddCosineSeries:
    """Expand f_n into odd cosines and compute its equivalence constant.

    The coefficients are extracted by discrete Fourier projection on an
    equispaced sample, which is exact for trigonometric polynomials of the
    degree at hand (2n - 1).
    """
    if n < 1 or n > 8:
        raise ValueError(f"weight order must be in [1, 8] (got {n})")
    m = 16 * n  # comfortably above the 4n Nyquist requirement
    theta = TWO_PI * np.arange(m) / m
    samples = fn_product_form(n, theta)
    spectrum = np.fft.rfft(samples) / m
    beta = 2.0 * spectrum.real[1 : 2 * n : 2][:n]
    constant = float(spectrum.real[0])

    # equivalence constant of f_n with w^{2n}: dense sampling of the ratio on
    # (0, pi] plus the exact small-w limit C(2n,n)/4^n
    w = np.linspace(1e-4, np.pi, 200_001)
    ratio = fn_product_form(n, w) / w ** (2 * n)
    small_w_limit = float(comb(2 * n, n) / 4.0**n)
    alpha = float(min(ratio.min(), small_w_limit))
    return OddCosineSeries(order=n, constant=constant, beta=beta, alpha=alpha)


def eval_fn(f: OddCosineSeries, omega) -> np.ndarray:
    omega = np.asarray(omega, dtype=np.float64)
    k = np.arange(f.order)
    return f.constant + np.cos(np.multiply.outer(omega, 2 * k + 1)) @ f.beta


# ---------------------------------------------------------------------------
# resonant points and the D_m / S_m transforms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ResonancePoint:
    """A tuple w in V_m, stored as [w_1..w_m, w_{-1}..w_{-m}].

    ``alias_index`` is the integer j with sum(w_+ ) - sum(w_-) = 2*pi*j.
    """

    w: np.ndarray
    alias_index: int

    def __post_init__(self):
        w = np.asarray(self.w, dtype=np.float64)
        object.__setattr__(self, "w", w)
        if w.ndim != 1 or w.size % 2 != 0 or w.size < 2:
            raise ValueError("resonance point must hold 2m frequencies")
        m = w.size // 2
        defect = w[:m].sum() - w[m:].sum() - TWO_PI * self.alias_index
        if abs(defect) > 1e-12:
            raise ValueError(f"not resonant: sum(w_+) - sum(w_-) - 2 pi j = {defect:g}")

    @property
    def m(self) -> int:
        return self.w.size // 2

    @classmethod
    def from_free(cls, w_plus, w_minus_free) -> "ResonancePoint":
        """Build a V_m point from w_1..w_m and w_{-1}..w_{-(m-1)}; the last
        negative frequency is fixed by resonance and folded into [-pi, pi)."""
        w_plus = np.asarray(w_plus, dtype=np.float64)
        w_minus_free = np.atleast_1d(np.asarray(w_minus_free, dtype=np.float64))
        raw = w_plus.sum() - w_minus_free.sum()
        last = fold_to_band(raw)
        j = int(round((raw - last) / TWO_PI))
        return cls(np.concatenate([w_plus, w_minus_free, [last]]), j)


def fold_to_band(x):
    """Fold frequencies into [-pi, pi)."""
    return (np.asarray(x) + np.pi) % TWO_PI - np.pi


def d_m(f: Callable, point: ResonancePoint) -> float:
    """D_m f(w) = sum_j f(w_j) - f(w_{-j})."""
    m = point.m
    return float(np.sum(f(point.w[:m])) - np.sum(f(point.w[m:])))


def s_m(mu: Callable, m: int) -> Callable:
    """Lift a V_m multiplier to V_{m+1}.

    S_m mu(w) = sum_{k=1..m} mu(core + d e_k) - mu(core - d e_{-k}) with
    d = w_{m+1} - w_{-(m+1)} and core the inner 2m frequencies.  Each shifted
    argument is again resonant, so ``mu`` only ever sees resonant tuples.
    """

    def lifted(w: np.ndarray) -> np.ndarray:
        w = np.asarray(w)
        if w.shape[-1] != 2 * m + 2:
            raise ValueError(f"expected V_{m + 1} points with {2 * m + 2} entries")
        plus = w[..., :m]
        minus = w[..., m + 1 : 2 * m + 1]
        core = np.concatenate([plus, minus], axis=-1)
        delta = w[..., m] - w[..., 2 * m + 1]
        total = 0.0
        for k in range(m):
            shifted = core.copy()
            shifted[..., k] = shifted[..., k] + delta
            total = total + mu(shifted)
            shifted = core.copy()
            shifted[..., m + k] = shifted[..., m + k] - delta
            total = total - mu(shifted)
        return total

    return lifted


# ---------------------------------------------------------------------------
# the resonant multiplier mu_n
# ---------------------------------------------------------------------------


def mu_multiplier(f: OddCosineSeries, nu: int) -> Callable:
    """Singularity-free evaluator of mu = (nu/4) D_2 f / D_2 cos on V_2.

    Writing Z = (w_1 + w_2)/2 and the quarter-difference variables

        A = (w_1 - w_2 + w_{-1} - w_{-2} + 2 pi j) / 4,
        B = (w_{-1} - w_{-2} - w_1 + w_2 + 2 pi j) / 4,

    each D_2 cos_k factorises as 4 cos_k(Z) sin_k(A) sin_k(B) with
    cos_k(x) = cos((2k+1)x).  Dividing by D_2 cos = 4 cos(Z) sin(A) sin(B)
    term by term leaves Dirichlet-kernel ratios, which are Chebyshev
    polynomials of the second kind:

        sin((2k+1)x)/sin(x) = U_{2k}(cos x),
        cos((2k+1)x)/cos(x) = (-1)^k U_{2k}(sin x).

    No division occurs, so the result is finite on all of V_2, including the
    zero set of D_2 cos, and satisfies |mu| <= (1/4) sum |beta_k| (2k+1)^3.
    The aliasing index j is recovered from the point itself, so the evaluator
    is 2*pi periodic in each variable and accepts the shifted arguments
    produced by S_2.
    """
    _check_nu(nu)
    beta = f.beta

    def mu(w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=np.float64)
        sigma = w[..., 0] + w[..., 1] - w[..., 2] - w[..., 3]
        two_pi_j = TWO_PI * np.rint(sigma / TWO_PI)
        z = 0.5 * (w[..., 0] + w[..., 1])
        a = 0.25 * (w[..., 0] - w[..., 1] + w[..., 2] - w[..., 3] + two_pi_j)
        b = 0.25 * (w[..., 2] - w[..., 3] - w[..., 0] + w[..., 1] + two_pi_j)
        sin_z, cos_a, cos_b = np.sin(z), np.cos(a), np.cos(b)
        total = 0.0
        for k, beta_k in enumerate(beta):
            term = (
                (-1) ** k
                * eval_chebyu(2 * k, sin_z)
                * eval_chebyu(2 * k, cos_a)
                * eval_chebyu(2 * k, cos_b)
            )
            total = total + beta_k * term
        return 0.25 * nu * total

    return mu


def mu_eval(f: OddCosineSeries, point: ResonancePoint, nu: int) -> float:
    """Evaluate mu_n at a single V_2 point."""
    if point.m != 2:
        raise ValueError("mu is defined on V_2")
    return float(mu_multiplier(f, nu)(point.w))


def d2_cos(w: np.ndarray) -> np.ndarray:
    """D_2 cos on (..., 4)-shaped tuples; vanishes on the resonant zero set."""
    w = np.asarray(w, dtype=np.float64)
    return np.cos(w[..., 0]) + np.cos(w[..., 1]) - np.cos(w[..., 2]) - np.cos(w[..., 3])


def d2_series(f: OddCosineSeries, w: np.ndarray) -> np.ndarray:
    """D_2 f on (..., 4)-shaped tuples (direct evaluation, no factorisation)."""
    w = np.asarray(w, dtype=np.float64)
    vals = eval_fn(f, w)
    return vals[..., 0] + vals[..., 1] - vals[..., 2] - vals[..., 3]


# ---------------------------------------------------------------------------
# the multilinear functionals Lambda_m
# ---------------------------------------------------------------------------


def _quad_weight(m: int, n: int) -> float:
    return TWO_PI / float(n) ** (2 * m - 1)


def _check_lambda3_budget(n: int, max_n: int, allow_large: bool) -> None:
    if n > max_n and not allow_large:
        raise BudgetError(
            f"Lambda_3 at N={n} needs an O(N^5) = {n**5:.2e}-term sum; "
            f"budget is N <= {max_n} (pass allow_large=True to override)"
        )


def _lambda_sum(mu, plus, minus, n: int) -> complex:
    """Core resonant sum with per-slot coefficient arrays.

    ``plus``/``minus`` are lists of m centered coefficient arrays; minus-slot
    arrays are conjugated here.  The last minus index is determined by
    resonance mod N, which is exactly the fold of the last frequency into
    [-pi, pi).
    """
    m = len(plus)
    omega = mode_grid(n)
    half = n // 2

    if m == 1:
        w = np.stack([omega, omega], axis=-1)
        vals = mu(w) * plus[0] * np.conj(minus[0])
        return complex(_quad_weight(1, n) * vals.sum())

    if m == 2:
        j = np.arange(n) - half
        j1 = j[:, None, None]
        j2 = j[None, :, None]
        jm1 = j[None, None, :]
        jm2 = (j1 + j2 - jm1 + half) % n - half
        w = np.empty((n, n, n, 4))
        w[..., 0] = TWO_PI * j1 / n
        w[..., 1] = TWO_PI * j2 / n
        w[..., 2] = TWO_PI * jm1 / n
        w[..., 3] = TWO_PI * jm2 / n
        vals = (
            mu(w)
            * plus[0][:, None, None]
            * plus[1][None, :, None]
            * np.conj(minus[0])[None, None, :]
            * np.conj(minus[1])[jm2 + half]
        )
        return complex(_quad_weight(2, n) * vals.sum())

    if m == 3:
        j = np.arange(n) - half
        j2 = j[:, None, None, None]
        j3 = j[None, :, None, None]
        jm1 = j[None, None, :, None]
        jm2 = j[None, None, None, :]
        base_block = (
            plus[1][:, None, None, None]
            * plus[2][None, :, None, None]
            * np.conj(minus[0])[None, None, :, None]
            * np.conj(minus[1])[None, None, None, :]
        )
        w = np.empty((n, n, n, n, 6))
        w[..., 1] = TWO_PI * j2 / n
        w[..., 2] = TWO_PI * j3 / n
        w[..., 3] = TWO_PI * jm1 / n
        w[..., 4] = TWO_PI * jm2 / n
        total = 0.0 + 0.0j
        # chunk over the outermost index; fixed iteration order keeps the
        # reduction deterministic
        for a1 in range(n):
            j1 = a1 - half
            jm3 = (j1 + j2 + j3 - jm1 - jm2 + half) % n - half
            w[..., 0] = TWO_PI * j1 / n
            w[..., 5] = TWO_PI * jm3 / n
            vals = mu(w) * base_block * plus[0][a1] * np.conj(minus[2])[jm3 + half]
            total += vals.sum()
        return complex(_quad_weight(3, n) * total)

    raise ValueError(f"Lambda_m implemented for m in {{1, 2, 3}} (got {m})")


def lambda_m(
    mu: Callable,
    v: SpectralState,
    m: int,
    lambda3_max_n: int = LAMBDA3_DEFAULT_MAX_N,
    allow_large: bool = False,
) -> complex:
    """Lambda_m(mu, vhat) = int_{V_m} mu(w) prod vhat(w_j) conj(vhat(w_{-j})) dw.

    ``mu`` must accept arrays of shape (..., 2m) holding
    [w_1..w_m, w_{-1}..w_{-m}].  The result is real (to rounding) whenever mu
    is real and symmetric under swapping the + and - blocks.
    """
    if m == 3:
        _check_lambda3_budget(v.n_points, lambda3_max_n, allow_large)
    coeffs = v.coeffs
    return _lambda_sum(mu, [coeffs] * m, [coeffs] * m, v.n_points)


def lambda_time_derivative(
    mu: Callable,
    u: LatticeState,
    nu: int,
    m: int,
    lambda3_max_n: int = LAMBDA3_DEFAULT_MAX_N,
    allow_large: bool = False,
) -> complex:
    """Exact chain-rule derivative of Lambda_m(mu, uhat) along the DNLS flow.

    d/dt uhat is substituted from the Fourier-side equation into each slot of
    the product; no time stepping is involved.
    """
    if m == 3:
        _check_lambda3_budget(u.n_points, lambda3_max_n, allow_large)
    v = dft(u)
    dv = dnls_rhs_spectral(v, nu).coeffs
    coeffs = v.coeffs
    n = u.n_points
    total = 0.0 + 0.0j
    for k in range(m):
        plus = [coeffs] * m
        plus[k] = dv
        total += _lambda_sum(mu, plus, [coeffs] * m, n)
        minus = [coeffs] * m
        minus[k] = dv
        total += _lambda_sum(mu, [coeffs] * m, minus, n)
    return total


# ---------------------------------------------------------------------------
# the modified energy E_n
# ---------------------------------------------------------------------------


def quadratic_part(n: int, v: SpectralState) -> float:
    """int f_n(w) |vhat(w)|^2 dw with the grid quadrature."""
    f = build_fn(n)
    return float(TWO_PI / v.n_points * np.sum(eval_fn(f, v.modes) * np.abs(v.coeffs) ** 2))


def modified_energy(n: int, u: LatticeState, nu: int) -> float:
    """E_n(u) = int f_n |uhat|^2 dw + Lambda_2(mu_n, uhat).

    E_1 reproduces 2*pi*H exactly (f_1 = 2 sin^2(w/2) up to the trigonometric
    identity, and mu_1 = -nu/4 is constant).
    """
    _check_nu(nu)
    v = dft(u)
    mu = mu_multiplier(build_fn(n), nu)
    correction = lambda_m(mu, v, 2)
    return quadratic_part(n, v) + correction.real


def energy_derivative_direct(
    n: int,
    u: LatticeState,
    nu: int,
    lambda3_max_n: int = LAMBDA3_DEFAULT_MAX_N,
    allow_large: bool = False,
) -> float:
    """dE_n/dt along the flow: -i nu Lambda_3(S_2 mu_n, uhat).

    For n = 1 the multiplier is constant, S_2 annihilates it, and the
    derivative vanishes identically (E_1 is conserved).
    """
    _check_nu(nu)
    mu = mu_multiplier(build_fn(n), nu)
    lifted = s_m(mu, 2)
    val = -1j * nu * lambda_m(lifted, dft(u), 3, lambda3_max_n, allow_large)
    return val.real
