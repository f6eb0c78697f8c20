"""System-level parameters of the full-duplex MIMO AF relay link."""

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class SystemConfig:
    """Antenna counts, stream count, power budgets and noise levels.

    All powers and variances are linear (watts). ``tau`` is the relay
    processing delay in symbols; it only affects the symbol-level
    simulator, never the closed-form rate.
    """

    n_s: int = 2          # source antennas
    n_r: int = 2          # relay receive antennas
    n_t: int = 2          # relay transmit antennas
    n_d: int = 2          # destination antennas
    d: int = 1            # data streams
    p_s: float = 10.0     # max source power
    p_r: float = 10.0     # max relay power
    sigma_r2: float = 1.0  # relay noise variance
    sigma_d2: float = 1.0  # destination noise variance
    sigma_rr2: float = 0.01  # residual self-interference channel variance
    tau: int = 1          # relay processing delay (symbols)

    def __post_init__(self):
        for name in ("n_s", "n_r", "n_t", "n_d"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be >= 2, got {getattr(self, name)}")
        if not 1 <= self.d <= min(self.n_s, self.n_r, self.n_t, self.n_d):
            raise ValueError(f"d must be in [1, min antenna count], got {self.d}")
        for name in ("p_s", "p_r", "sigma_r2", "sigma_d2", "sigma_rr2"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.tau < 1:
            raise ValueError(f"tau must be >= 1, got {self.tau}")

    @property
    def snr_db(self) -> float:
        """10*log10(P/sigma^2) with P = p_s and sigma^2 = sigma_d2."""
        return 10.0 * np.log10(self.p_s / self.sigma_d2)

    def with_snr_db(self, snr_db: float) -> "SystemConfig":
        """Copy with p_s = p_r set so that 10*log10(P/sigma_d2) = snr_db."""
        p = self.sigma_d2 * 10.0 ** (snr_db / 10.0)
        return replace(self, p_s=p, p_r=p)

    def max_streams(self) -> int:
        return min(self.n_s, self.n_r, self.n_t, self.n_d)


def nats_to_bits(rate_nats: float) -> float:
    """Convert a rate in nats to bits/s/Hz."""
    return rate_nats / np.log(2.0)
