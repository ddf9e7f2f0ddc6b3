"""Physical layer: ULA response, raised-cosine pulse, random multipath channels.

A channel is a sum of paths, each a (gain, angle, delay, user) tuple. The
tap-domain channel vector stacks the per-tap, per-user antenna responses
user-major within each tap, taps outermost, so an index decomposes as
``(tap * K + user) * M + antenna``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ArraySpec",
    "PulseSpec",
    "PathParams",
    "ChannelRealization",
    "steering",
    "steering_curvature",
    "rc_pulse",
    "rc_pulse_deriv",
    "rc_pulse_deriv2",
    "draw_paths",
    "assemble_channel",
    "path_matrix",
    "taps_from_vector",
    "vector_from_taps",
]


@dataclass(frozen=True)
class ArraySpec:
    """Uniform linear array. ``spacing`` is in wavelengths (half-wavelength default)."""

    antennas: int
    spacing: float = 0.5

    def __post_init__(self):
        if self.antennas < 1:
            raise ValueError("antennas must be >= 1")
        if self.spacing <= 0:
            raise ValueError("spacing must be positive")


@dataclass(frozen=True)
class PulseSpec:
    """Raised-cosine pulse: roll-off, sample period in seconds, and tap count."""

    rolloff: float = 0.35
    sample_period: float = 1.0
    taps: int = 1

    def __post_init__(self):
        if not 0.0 <= self.rolloff <= 1.0:
            raise ValueError("rolloff must lie in [0, 1]")
        if self.sample_period <= 0:
            raise ValueError("sample_period must be positive")
        if self.taps < 1:
            raise ValueError("taps must be >= 1")

    @property
    def max_delay(self) -> float:
        """Largest representable path delay, (taps - 1) * sample_period."""
        return (self.taps - 1) * self.sample_period


@dataclass(frozen=True)
class PathParams:
    """One propagation path: complex gain, angle of arrival, delay, user index."""

    gain: complex
    aoa: float
    delay: float
    user: int

    def __post_init__(self):
        if not -np.pi / 2 <= self.aoa <= np.pi / 2:
            raise ValueError("aoa must lie in [-pi/2, pi/2]")
        if self.delay < 0:
            raise ValueError("delay must be non-negative")
        if self.user < 0:
            raise ValueError("user must be non-negative")


@dataclass
class ChannelRealization:
    """Paths (grouped by user) and the assembled tap-domain vector of length M*K*D."""

    paths: list[PathParams]
    h: np.ndarray


def steering(theta: float, antennas: int, spacing: float = 0.5):
    """ULA response a(theta) and its exact theta-derivative.

    Entry m is exp(j * 2*pi*spacing * m * sin(theta)), phase-referenced to
    antenna 0; with half-wavelength spacing this is exp(j*pi*m*sin(theta)).
    """
    if not -np.pi / 2 <= theta <= np.pi / 2:
        raise ValueError("theta must lie in [-pi/2, pi/2]")
    m = np.arange(antennas)
    wav = 2.0 * np.pi * spacing
    a = np.exp(1j * wav * m * np.sin(theta))
    da = 1j * wav * m * np.cos(theta) * a
    return a, da


def steering_curvature(theta: float, antennas: int, spacing: float = 0.5) -> np.ndarray:
    """Exact second theta-derivative of the ULA response."""
    a, _ = steering(theta, antennas, spacing)
    m = np.arange(antennas)
    wav = 2.0 * np.pi * spacing
    return (-1j * wav * m * np.sin(theta) - (wav * m * np.cos(theta)) ** 2) * a


def _sinc_parts(u):
    """sin(u)/u and its first two u-derivatives, series-stabilized near u = 0."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 1e-2
    ug = np.where(small, 1.0, u)  # dummy value; small lanes are overwritten
    sin_u, cos_u = np.sin(ug), np.cos(ug)
    s_g = sin_u / ug
    ds_g = (ug * cos_u - sin_u) / ug**2
    d2s_g = ((2.0 - ug**2) * sin_u - 2.0 * ug * cos_u) / ug**3
    u2 = u * u
    s_s = 1.0 - u2 / 6.0 * (1.0 - u2 / 20.0 * (1.0 - u2 / 42.0 * (1.0 - u2 / 72.0)))
    ds_s = -u / 3.0 * (1.0 - u2 / 10.0 * (1.0 - u2 / 28.0 * (1.0 - u2 / 54.0)))
    d2s_s = -1.0 / 3.0 + u2 / 10.0 - u2 * u2 / 168.0 + u2 * u2 * u2 / 6480.0
    return (
        np.where(small, s_s, s_g),
        np.where(small, ds_s, ds_g),
        np.where(small, d2s_s, d2s_g),
    )


def _rc_parts(x, beta):
    """Raised cosine and first two derivatives in normalized time x = t / T_s.

    Factors p = sincn(x) * q(x) with q = cos(pi*beta*x) / (1 - (2*beta*x)^2).
    q is rewritten through sin(pi*beta*h)/h near its removable singularities
    at x = +-1/(2*beta) so that values and derivatives stay exact there.
    """
    x = np.asarray(x, dtype=float)
    pi = np.pi
    s, ds, d2s = _sinc_parts(pi * x)
    sn, dsn, d2sn = s, pi * ds, pi * pi * d2s

    if beta == 0.0:
        q = np.ones_like(x)
        dq = np.zeros_like(x)
        d2q = np.zeros_like(x)
    else:
        x0 = 1.0 / (2.0 * beta)
        near_p = np.abs(x - x0) < 1e-4
        near_m = np.abs(x + x0) < 1e-4
        near = near_p | near_m

        xg = np.where(near, 0.0, x)  # keeps generic lanes finite
        w = 1.0 - (2.0 * beta * xg) ** 2
        dw = -8.0 * beta**2 * xg
        d2w = -8.0 * beta**2
        cosf = np.cos(pi * beta * xg)
        sinf = np.sin(pi * beta * xg)
        q_g = cosf / w
        dq_g = (-pi * beta * sinf - q_g * dw) / w
        d2q_g = (-((pi * beta) ** 2) * cosf - 2.0 * dq_g * dw - q_g * d2w) / w

        sgn = np.where(near_p, 1.0, -1.0)
        h = x - sgn * x0
        s2, ds2, d2s2 = _sinc_parts(pi * beta * h)
        den = 1.0 + sgn * beta * h
        g = 0.25 / den
        dg = -0.25 * sgn * beta / den**2
        d2g = 0.5 * beta**2 / den**3
        q_n = pi * s2 * g
        dq_n = pi * (pi * beta * ds2 * g + s2 * dg)
        d2q_n = pi * ((pi * beta) ** 2 * d2s2 * g + 2.0 * pi * beta * ds2 * dg + s2 * d2g)

        q = np.where(near, q_n, q_g)
        dq = np.where(near, dq_n, dq_g)
        d2q = np.where(near, d2q_n, d2q_g)

    p = sn * q
    dp = dsn * q + sn * dq
    d2p = d2sn * q + 2.0 * dsn * dq + sn * d2q
    return p, dp, d2p


def _match_input(t, arr):
    return float(arr) if np.isscalar(t) or np.ndim(t) == 0 else arr


def rc_pulse(t, spec: PulseSpec):
    """Raised-cosine pulse value, with analytic limits at the removable points."""
    p, _, _ = _rc_parts(np.asarray(t, dtype=float) / spec.sample_period, spec.rolloff)
    return _match_input(t, p)


def rc_pulse_deriv(t, spec: PulseSpec):
    """Exact time derivative of the raised-cosine pulse."""
    _, dp, _ = _rc_parts(np.asarray(t, dtype=float) / spec.sample_period, spec.rolloff)
    return _match_input(t, dp / spec.sample_period)


def rc_pulse_deriv2(t, spec: PulseSpec):
    """Exact second time derivative of the raised-cosine pulse."""
    _, _, d2p = _rc_parts(np.asarray(t, dtype=float) / spec.sample_period, spec.rolloff)
    return _match_input(t, d2p / spec.sample_period**2)


def draw_paths(num_users: int, paths_per_user, pulse: PulseSpec, rng_seed) -> list[PathParams]:
    """Draw i.i.d. paths: CN(0,1) gains, uniform angles, uniform delays.

    ``paths_per_user`` is an int or a per-user sequence. Deterministic given
    the seed: draws are batched per user as gains, angles, delays in order.
    """
    if np.isscalar(paths_per_user):
        counts = [int(paths_per_user)] * num_users
    else:
        counts = [int(c) for c in paths_per_user]
    if len(counts) != num_users or any(c < 1 for c in counts):
        raise ValueError("need one path count >= 1 per user")
    rng = np.random.default_rng(rng_seed)
    out = []
    for k, count in enumerate(counts):
        re = rng.standard_normal(count)
        im = rng.standard_normal(count)
        theta = rng.uniform(-np.pi / 2, np.pi / 2, count)
        tau = rng.uniform(0.0, pulse.max_delay, count)
        for ell in range(count):
            gain = (re[ell] + 1j * im[ell]) / np.sqrt(2.0)
            out.append(PathParams(gain, theta[ell], tau[ell], k))
    return out


def _path_fields(path):
    """Accept PathParams or a bare (theta, tau, user) triple."""
    if isinstance(path, PathParams):
        return path.aoa, path.delay, path.user
    theta, tau, user = path
    return float(theta), float(tau), int(user)


def path_matrix(paths, array: ArraySpec, pulse: PulseSpec, num_users: int) -> np.ndarray:
    """Dense tap-domain dictionary: one unit-gain column per path, (M*K*D, len(paths))."""
    m_ant, d_taps = array.antennas, pulse.taps
    cols = np.zeros((d_taps, num_users, m_ant, len(paths)), dtype=complex)
    tap_times = np.arange(d_taps) * pulse.sample_period
    for j, path in enumerate(paths):
        theta, tau, user = _path_fields(path)
        if not 0 <= user < num_users:
            raise ValueError(f"user index {user} outside 0..{num_users - 1}")
        if tau > pulse.max_delay:
            raise ValueError("delay exceeds (taps - 1) * sample_period")
        a, _ = steering(theta, m_ant, array.spacing)
        pd = rc_pulse(tap_times - tau, pulse)
        cols[:, user, :, j] = pd[:, None] * a[None, :]
    return cols.reshape(d_taps * num_users * m_ant, len(paths))


def assemble_channel(paths, array: ArraySpec, pulse: PulseSpec, num_users: int) -> ChannelRealization:
    """Sum unit-pulse-shaped steering responses weighted by path gains.

    Tap d of user k receives gain * p(d*T_s - tau) * a(theta) from each of the
    user's paths; the result is stacked user-major within tap, taps outer.
    """
    m_ant, d_taps = array.antennas, pulse.taps
    h = np.zeros((d_taps, num_users, m_ant), dtype=complex)
    tap_times = np.arange(d_taps) * pulse.sample_period
    for path in paths:
        if not isinstance(path, PathParams):
            raise ValueError("assemble_channel expects PathParams with gains")
        if not 0 <= path.user < num_users:
            raise ValueError(f"user index {path.user} outside 0..{num_users - 1}")
        if path.delay > pulse.max_delay:
            raise ValueError("delay exceeds (taps - 1) * sample_period")
        a, _ = steering(path.aoa, m_ant, array.spacing)
        pd = rc_pulse(tap_times - path.delay, pulse)
        h[:, path.user, :] += (path.gain * pd)[:, None] * a[None, :]
    grouped = sorted(paths, key=lambda p: p.user)
    return ChannelRealization(paths=grouped, h=h.reshape(-1))


def taps_from_vector(h: np.ndarray, antennas: int, num_users: int, taps: int) -> np.ndarray:
    """Reshape a stacked channel vector to (taps, users, antennas)."""
    if h.size != antennas * num_users * taps:
        raise ValueError("channel vector length does not match dimensions")
    return h.reshape(taps, num_users, antennas)


def vector_from_taps(taps: np.ndarray) -> np.ndarray:
    """Inverse of taps_from_vector."""
    return np.asarray(taps).reshape(-1)
