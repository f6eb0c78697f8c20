"""Exact rate, power and feasibility metrics for a candidate design."""

from dataclasses import dataclass

import numpy as np

from .channels import ChannelSet
from .config import SystemConfig


@dataclass(frozen=True)
class Precoders:
    """A candidate solution: source beamformer v (n_s x d) and relay map q (n_t x n_r)."""

    v: np.ndarray
    q: np.ndarray


@dataclass(frozen=True)
class FeasibilityReport:
    source_power: float
    relay_power: float
    si_residual_inf: float
    tol_power: float
    tol_si: float
    source_ok: bool
    relay_ok: bool
    si_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.source_ok and self.relay_ok and self.si_ok


def _check_dims(p: Precoders, ch: ChannelSet, config: SystemConfig) -> None:
    ch.check_dims(config)
    if p.v.shape != (config.n_s, config.d):
        raise ValueError(f"v has shape {p.v.shape}, expected {(config.n_s, config.d)}")
    if p.q.shape != (config.n_t, config.n_r):
        raise ValueError(f"q has shape {p.q.shape}, expected {(config.n_t, config.n_r)}")


def rate(p: Precoders, ch: ChannelSet, config: SystemConfig) -> float:
    """End-to-end achievable rate in nats.

    log det(I + H_RD Q H_SR V V^H H_SR^H Q^H H_RD^H
            (sigma_R^2 H_RD Q Q^H H_RD^H + sigma_D^2 I)^{-1})

    evaluated as logdet(noise + signal) - logdet(noise); both matrices are
    Hermitian positive definite because sigma_d2 > 0.
    """
    _check_dims(p, ch, config)
    hq = ch.h_rd @ p.q
    a = hq @ ch.h_sr @ p.v
    noise = config.sigma_r2 * (hq @ hq.conj().T) + config.sigma_d2 * np.eye(config.n_d)
    signal = a @ a.conj().T
    _, ld_full = np.linalg.slogdet(noise + signal)
    _, ld_noise = np.linalg.slogdet(noise)
    return float(ld_full - ld_noise)


def rate_bits(p: Precoders, ch: ChannelSet, config: SystemConfig) -> float:
    return rate(p, ch, config) / float(np.log(2.0))


def source_power(p: Precoders) -> float:
    """trace(V V^H)."""
    return float(np.sum(np.abs(p.v) ** 2))


def relay_power(p: Precoders, ch: ChannelSet, config: SystemConfig) -> float:
    """trace(Q H_SR V V^H H_SR^H Q^H) + sigma_R^2 trace(Q Q^H)."""
    _check_dims(p, ch, config)
    qsv = p.q @ ch.h_sr @ p.v
    return float(np.sum(np.abs(qsv) ** 2) + config.sigma_r2 * np.sum(np.abs(p.q) ** 2))


def si_residual_inf(p: Precoders, ch: ChannelSet) -> float:
    """Entrywise infinity norm of Q H_RR Q (the self-interference residual)."""
    return float(np.max(np.abs(p.q @ ch.h_rr @ p.q))) if p.q.size else 0.0


def feasibility_report(
    p: Precoders,
    ch: ChannelSet,
    config: SystemConfig,
    tol_power: float = 1e-9,
    tol_si: float = 1e-9,
) -> FeasibilityReport:
    """Check the two power budgets (relative slack) and the SI null (absolute)."""
    _check_dims(p, ch, config)
    ps = source_power(p)
    pr = relay_power(p, ch, config)
    si = si_residual_inf(p, ch)
    return FeasibilityReport(
        source_power=ps,
        relay_power=pr,
        si_residual_inf=si,
        tol_power=tol_power,
        tol_si=tol_si,
        source_ok=ps <= config.p_s * (1.0 + tol_power),
        relay_ok=pr <= config.p_r * (1.0 + tol_power),
        si_ok=si <= tol_si,
    )
