"""Symbol-level link simulator used as a statistical oracle.

The relay recursion is run literally with its processing delay:

    r[n]   = H_SR V s[n] + H_RR x_R[n] + n_R[n]
    x_R[n] = Q r[n - tau]

No self-interference cancellation is assumed; if Q H_RR Q != 0 the
loopback term feeds back and the recursion is only stable when the
spectral radius of Q H_RR is below one.  The simulator propagates the
symbol-driven and noise-driven components separately (the system is
linear) so destination signal and noise covariances can be measured
without cross terms.
"""

from dataclasses import dataclass

import numpy as np

from .channels import ChannelSet, complex_gaussian
from .config import SystemConfig
from .exceptions import UnstableLoopError
from .metrics import Precoders, _check_dims


@dataclass(frozen=True)
class SignalFrame:
    """Raw per-symbol sequences of one simulated burst (arrays are time-major)."""

    s: np.ndarray        # (length, d) unit-variance symbols
    n_r: np.ndarray      # (length, n_r) relay noise
    n_d: np.ndarray      # (length, n_d) destination noise
    x_r: np.ndarray      # (length, n_t) relay transmit signal
    y_d: np.ndarray      # (length, n_d) destination observations
    length: int


@dataclass(frozen=True)
class LinkMeasurement:
    """Empirical destination covariances, split by origin."""

    frame: SignalFrame
    signal_cov: np.ndarray   # covariance of the symbol-driven component of y_d
    noise_cov: np.ndarray    # covariance of relay-noise + destination-noise component
    sinr: float              # matched-filter SINR estimate (meaningful for d = 1)


def simulate_link(
    p: Precoders,
    ch: ChannelSet,
    config: SystemConfig,
    length: int,
    seed: int,
) -> LinkMeasurement:
    """Run the delayed relay recursion and measure destination covariances.

    The matched filter for the SINR estimate is the closed-form effective
    channel h = H_RD Q H_SR V (single column for d = 1).
    """
    _check_dims(p, ch, config)
    if length < 10_000:
        raise ValueError(f"length must be >= 10000 for stable statistics, got {length}")

    loop = p.q @ ch.h_rr  # feedback map of the stride-tau recursion
    radius = float(np.max(np.abs(np.linalg.eigvals(loop)))) if loop.size else 0.0
    if radius >= 1.0:
        raise UnstableLoopError(
            f"relay loop spectral radius {radius:.6f} >= 1; recursion diverges"
        )

    rng = np.random.default_rng(seed)
    tau = config.tau
    s = complex_gaussian(rng, (length, config.d))
    n_r = complex_gaussian(rng, (length, config.n_r), variance=config.sigma_r2)
    n_d = complex_gaussian(rng, (length, config.n_d), variance=config.sigma_d2)

    # Forward drives, computed in one shot: u_sig[n] = Q H_SR V s[n - tau],
    # u_noise[n] = Q n_R[n - tau]; zero for n < tau.
    qsv = p.q @ ch.h_sr @ p.v
    u_sig = np.zeros((length, config.n_t), dtype=complex)
    u_noise = np.zeros((length, config.n_t), dtype=complex)
    u_sig[tau:] = s[:-tau] @ qsv.T
    u_noise[tau:] = n_r[:-tau] @ p.q.T

    x_sig = np.zeros((length, config.n_t), dtype=complex)
    x_noise = np.zeros((length, config.n_t), dtype=complex)
    loop_t = loop.T
    for n in range(tau, length):
        x_sig[n] = u_sig[n] + x_sig[n - tau] @ loop_t
        x_noise[n] = u_noise[n] + x_noise[n - tau] @ loop_t

    y_sig = x_sig @ ch.h_rd.T
    y_noise = x_noise @ ch.h_rd.T + n_d
    y_d = y_sig + y_noise

    frame = SignalFrame(s=s, n_r=n_r, n_d=n_d, x_r=x_sig + x_noise, y_d=y_d, length=length)

    burn = min(16 * tau, length // 10)  # zero-state transient
    ys = y_sig[burn:]
    yn = y_noise[burn:]
    m = ys.shape[0]
    # rows are samples: sum_n y[n] y[n]^H == Y^T conj(Y)
    signal_cov = ys.T @ ys.conj() / m
    noise_cov = yn.T @ yn.conj() / m

    h = (ch.h_rd @ qsv)[:, 0]  # matched filter along the first stream
    hn = np.linalg.norm(h)
    if hn > 0:
        num = float(np.real(h.conj() @ signal_cov @ h))
        den = float(np.real(h.conj() @ noise_cov @ h))
        sinr = num / den if den > 0 else np.inf
    else:
        sinr = 0.0

    return LinkMeasurement(frame=frame, signal_cov=signal_cov, noise_cov=noise_cov, sinr=sinr)
