"""B-bit ADC model and quantized-Gaussian likelihood kernels.

The quantizer is uniform mid-rise with 2^B intervals per real dimension:
interior thresholds at step * (i - 2^(B-1)) for i = 1..2^B-1, unbounded outer
intervals. An observation keeps, per entry and per real dimension, the lower
and upper thresholds of the interval the sample fell into; everything the
estimator sees flows through Gaussian box probabilities of these intervals.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import erf, log_ndtr, ndtr

from nfcfgs.errors import ConfigurationError

__all__ = [
    "NOISE_SIGMA_PER_DIM",
    "QuantizerSpec",
    "QuantizedObservation",
    "BoxDerivatives",
    "optimal_step_factor",
    "design_quantizer",
    "quantize",
    "box_loglik",
    "box_loglik_arrays",
    "log_likelihood",
    "gain_gradient",
]

# Combining with unitary-column analog networks keeps the noise circularly
# symmetric with unit variance, so each real dimension has std 1/sqrt(2).
NOISE_SIGMA_PER_DIM = 1.0 / np.sqrt(2.0)

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)
_MAX_BITS = 12


@dataclass(frozen=True)
class QuantizerSpec:
    """Uniform mid-rise quantizer: bit depth, step, and the std it was scaled to."""

    bits: int
    step: float
    per_dim_sigma: float

    def __post_init__(self):
        if not 1 <= self.bits <= _MAX_BITS:
            raise ConfigurationError(f"bits must lie in 1..{_MAX_BITS}")
        if self.step <= 0 or self.per_dim_sigma <= 0:
            raise ConfigurationError("step and per_dim_sigma must be positive")

    @property
    def levels(self) -> int:
        return 2**self.bits

    def interior_thresholds(self) -> np.ndarray:
        """The 2^B - 1 finite thresholds; outermost intervals are unbounded."""
        i = np.arange(1, self.levels)
        return self.step * (i - self.levels // 2)


@dataclass(frozen=True)
class QuantizedObservation:
    """ADC output codes plus the per-entry complex interval boundaries.

    ``codes`` packs the real-part interval index into the real part and the
    imaginary-part index into the imaginary part. ``lo``/``up`` hold the
    matching thresholds as extended reals (outer intervals reach +-inf).
    """

    codes: np.ndarray
    lo: np.ndarray
    up: np.ndarray
    quantizer: QuantizerSpec

    def __post_init__(self):
        if not (np.all(self.lo.real < self.up.real) and np.all(self.lo.imag < self.up.imag)):
            raise ValueError("interval boundaries must satisfy lo < up per real dimension")

    def __len__(self) -> int:
        return self.codes.shape[0]


@dataclass(frozen=True)
class BoxDerivatives:
    """log P(lo <= X <= up) for X ~ N(mu, sigma^2) and its first two mu-derivatives."""

    logp: float
    d1: float
    d2: float


@lru_cache(maxsize=None)
def optimal_step_factor(bits: int) -> float:
    """MSE-optimal uniform step for a standard Gaussian quantized at ``bits`` bits.

    Reconstruction sits at interval midpoints (outer intervals at the last
    threshold +- step/2); the distortion is evaluated in closed form from
    Gaussian interval moments and minimized over the step.
    """
    if not 1 <= bits <= _MAX_BITS:
        raise ConfigurationError(f"bits must lie in 1..{_MAX_BITS}")
    levels = 2**bits

    def _phi(x):
        xf = np.where(np.isfinite(x), x, 0.0)
        return np.where(np.isfinite(x), np.exp(-0.5 * xf * xf) / np.sqrt(2 * np.pi), 0.0)

    def _xphi(x):
        return np.where(np.isfinite(x), x, 0.0) * _phi(x)

    def mse(step):
        t = step * (np.arange(1, levels) - levels // 2)
        lo = np.concatenate(([-np.inf], t))
        up = np.concatenate((t, [np.inf]))
        rec = np.empty(levels)
        rec[1:-1] = 0.5 * (lo[1:-1] + up[1:-1])
        rec[0] = t[0] - step / 2
        rec[-1] = t[-1] + step / 2
        i0 = ndtr(up) - ndtr(lo)
        i1 = _phi(lo) - _phi(up)
        i2 = i0 + _xphi(lo) - _xphi(up)
        return float(np.sum(i2 - 2.0 * rec * i1 + rec**2 * i0))

    res = minimize_scalar(mse, bounds=(1e-4, 4.0), method="bounded", options={"xatol": 1e-10})
    return float(res.x)


def design_quantizer(bits: int, per_dim_sigma: float) -> QuantizerSpec:
    """Scale the MSE-optimal unit-Gaussian step by the per-dimension std."""
    if not 1 <= bits <= _MAX_BITS:
        raise ConfigurationError(f"bits must lie in 1..{_MAX_BITS}")
    if per_dim_sigma <= 0:
        raise ConfigurationError("per_dim_sigma must be positive")
    return QuantizerSpec(bits=bits, step=optimal_step_factor(bits) * per_dim_sigma, per_dim_sigma=per_dim_sigma)


def _pack_complex(re, im):
    # 1j * inf would produce nan; fill the parts directly instead
    out = np.empty(np.broadcast(re, im).shape, dtype=complex)
    out.real = re
    out.imag = im
    return out


def _codes_to_bounds(codes: np.ndarray, spec: QuantizerSpec):
    half = spec.levels // 2
    lo = spec.step * (codes - half)
    up = spec.step * (codes + 1 - half)
    lo = np.where(codes == 0, -np.inf, lo)
    up = np.where(codes == spec.levels - 1, np.inf, up)
    return lo, up


def quantize(y: np.ndarray, spec: QuantizerSpec) -> QuantizedObservation:
    """Quantize a complex vector element-wise per real dimension.

    A value exactly on a threshold is assigned to the upper interval, which
    is what flooring the scaled sample gives.
    """
    y = np.asarray(y, dtype=complex)
    if not np.all(np.isfinite(y.real) & np.isfinite(y.imag)):
        raise ValueError("quantize requires finite input")
    half = spec.levels // 2
    code_re = np.clip(np.floor(y.real / spec.step).astype(int) + half, 0, spec.levels - 1)
    code_im = np.clip(np.floor(y.imag / spec.step).astype(int) + half, 0, spec.levels - 1)
    lo_re, up_re = _codes_to_bounds(code_re, spec)
    lo_im, up_im = _codes_to_bounds(code_im, spec)
    codes = _pack_complex(code_re.astype(float), code_im.astype(float))
    lo = _pack_complex(lo_re, lo_im)
    up = _pack_complex(up_re, up_im)
    for arr in (codes, lo, up):
        arr.setflags(write=False)
    return QuantizedObservation(codes=codes, lo=lo, up=up, quantizer=spec)


def _log_phi(x):
    return -0.5 * x * x - _LOG_SQRT_2PI


def box_loglik_arrays(lo, up, mu, sigma, want_derivs: bool = True):
    """Vectorized log box probability of N(mu, sigma^2) with mu-derivatives.

    Returns (logp, d1, d2); d1/d2 are None when ``want_derivs`` is false.
    The log probability is formed from log-domain normal CDFs on the tail
    side and an erf difference when the box straddles the mean, and the
    derivative ratios are anchored with expm1 so they stay accurate many
    sigmas into the tails instead of cancelling or underflowing.
    """
    lo = np.asarray(lo, dtype=float)
    up = np.asarray(up, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if not np.all(lo < up):
        raise ValueError("box bounds must satisfy lo < up")
    sigma = float(sigma)
    if sigma <= 0:
        raise ValueError("sigma must be positive")

    with np.errstate(all="ignore"):
        a = (lo - mu) / sigma
        b = (up - mu) / sigma

        # log probability, reflected so the two-sided tail case has b <= 0
        flip = (a + b) > 0  # NaN (doubly infinite box) compares false
        aa = np.where(flip, -b, a)
        bb = np.where(flip, -a, b)
        straddle = bb >= 0
        p_mid = 0.5 * (erf(np.where(straddle, bb, 0.0) / np.sqrt(2)) - erf(np.where(straddle, aa, 0.0) / np.sqrt(2)))
        log_mid = np.log(p_mid)
        lb = log_ndtr(np.where(straddle, -1.0, bb))
        la = log_ndtr(np.where(straddle, -2.0, aa))
        log_tail = lb + np.log(-np.expm1(la - lb))
        logp = np.where(straddle, log_mid, log_tail)

        if not want_derivs:
            return logp, None, None

        lo_inf = np.isinf(a)
        up_inf = np.isinf(b)
        af = np.where(lo_inf, 0.0, a)
        bf = np.where(up_inf, 0.0, b)

        # one-sided ratios phi(.)/P computed as exp of log differences
        ratio_a = np.exp(_log_phi(af) - logp)
        ratio_b = np.exp(_log_phi(bf) - logp)

        # two-sided differences (phi(a)-phi(b))/P and (a phi(a)-b phi(b))/P,
        # anchored at the larger density so expm1 arguments are <= 0
        anchor_a = np.abs(af) <= np.abs(bf)
        e_a = np.expm1(0.5 * (af * af - bf * bf))
        e_b = np.expm1(0.5 * (bf * bf - af * af))
        r1_two = np.where(anchor_a, -ratio_a * e_a, ratio_b * e_b)
        rz_two = np.where(
            anchor_a,
            ratio_a * ((af - bf) - bf * e_a),
            ratio_b * ((af - bf) + af * e_b),
        )

        r1 = np.where(lo_inf & up_inf, 0.0, np.where(lo_inf, -ratio_b, np.where(up_inf, ratio_a, r1_two)))
        rz = np.where(lo_inf & up_inf, 0.0, np.where(lo_inf, -bf * ratio_b, np.where(up_inf, af * ratio_a, rz_two)))

        d1 = r1 / sigma
        d2 = (rz - r1 * r1) / sigma**2
    return logp, d1, d2


def box_loglik(lo: float, up: float, mu: float, sigma: float) -> BoxDerivatives:
    """Scalar convenience wrapper around box_loglik_arrays."""
    if not lo < up:
        raise ValueError("box bounds must satisfy lo < up")
    logp, d1, d2 = box_loglik_arrays(np.array([lo]), np.array([up]), np.array([mu]), sigma)
    return BoxDerivatives(logp=float(logp[0]), d1=float(d1[0]), d2=float(d2[0]))


def observation_stats(obs: QuantizedObservation, rows, mean, want_derivs: bool = True):
    """Per-row likelihood pieces for complex means over selected rows.

    Returns (total logp, w, d2_re, d2_im) where w = d1_re + 1j * d1_im packs
    the real and imaginary first derivatives of the per-entry box log
    probabilities; d2_* are their second derivatives. Derivative slots are
    None when ``want_derivs`` is false.
    """
    lo = obs.lo[rows]
    up = obs.up[rows]
    mean = np.asarray(mean, dtype=complex)
    lp_re, d1_re, d2_re = box_loglik_arrays(lo.real, up.real, mean.real, NOISE_SIGMA_PER_DIM, want_derivs)
    lp_im, d1_im, d2_im = box_loglik_arrays(lo.imag, up.imag, mean.imag, NOISE_SIGMA_PER_DIM, want_derivs)
    total = float(np.sum(lp_re) + np.sum(lp_im))
    if not want_derivs:
        return total, None, None, None
    return total, d1_re + 1j * d1_im, d2_re, d2_im


def log_likelihood(x, atoms, obs: QuantizedObservation, rows) -> float:
    """Quantized log-likelihood of gains ``x`` over the selected rows.

    The per-entry mean is (atoms @ x); real and imaginary parts contribute
    independent box log probabilities with noise std 1/sqrt(2) per dimension.
    Concave in x.
    """
    atoms = np.asarray(atoms)
    x = np.asarray(x, dtype=complex)
    if atoms.ndim != 2 or atoms.shape[1] != x.shape[0]:
        raise ValueError("atoms must be 2-D with one column per gain")
    if atoms.shape[0] != len(obs):
        raise ValueError("atoms row count must match the observation length")
    mean = atoms[rows] @ x
    total, _, _, _ = observation_stats(obs, rows, mean, want_derivs=False)
    return total


def gain_gradient(x, atoms, obs: QuantizedObservation, rows) -> np.ndarray:
    """Complex gradient of log_likelihood in x, coordinate j = d/dRe + 1j * d/dIm.

    Its real and imaginary parts are exactly the partial derivatives with
    respect to the real and imaginary parts of each gain, so the maximizer of
    the concave log-likelihood is characterized by a vanishing gradient.
    """
    atoms = np.asarray(atoms)
    x = np.asarray(x, dtype=complex)
    if atoms.ndim != 2 or atoms.shape[1] != x.shape[0]:
        raise ValueError("atoms must be 2-D with one column per gain")
    if atoms.shape[0] != len(obs):
        raise ValueError("atoms row count must match the observation length")
    sub = atoms[rows]
    mean = sub @ x
    _, w, _, _ = observation_stats(obs, rows, mean)
    return sub.conj().T @ w
