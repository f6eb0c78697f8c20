"""Rayleigh channel draws for the source-relay-destination link."""

from dataclasses import dataclass

import numpy as np

from .config import SystemConfig


@dataclass(frozen=True)
class ChannelSet:
    """The three channel matrices of one fading block.

    h_sr: relay-receive x source (n_r x n_s)
    h_rd: destination x relay-transmit (n_d x n_t)
    h_rr: residual self-interference, relay-receive x relay-transmit (n_r x n_t)
    """

    h_sr: np.ndarray
    h_rd: np.ndarray
    h_rr: np.ndarray

    def check_dims(self, config: SystemConfig) -> None:
        expected = {
            "h_sr": (config.n_r, config.n_s),
            "h_rd": (config.n_d, config.n_t),
            "h_rr": (config.n_r, config.n_t),
        }
        for name, shape in expected.items():
            actual = getattr(self, name).shape
            if actual != shape:
                raise ValueError(f"{name} has shape {actual}, expected {shape}")


def complex_gaussian(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """CN(0, variance) entries: real and imaginary parts i.i.d. N(0, variance/2)."""
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def generate_channels(config: SystemConfig, seed: int) -> ChannelSet:
    """Draw one i.i.d. Rayleigh fading block, deterministic in (config, seed).

    h_sr and h_rd entries are CN(0, 1); h_rr entries are CN(0, sigma_rr2).
    The draw order (h_sr, h_rd, h_rr) is part of the determinism contract.
    """
    rng = np.random.default_rng(seed)
    h_sr = complex_gaussian(rng, (config.n_r, config.n_s))
    h_rd = complex_gaussian(rng, (config.n_d, config.n_t))
    h_rr = complex_gaussian(rng, (config.n_r, config.n_t), variance=config.sigma_rr2)
    return ChannelSet(h_sr=h_sr, h_rd=h_rd, h_rr=h_rr)
