import numpy as np
import pytest

from fdrelay import (
    Precoders,
    SystemConfig,
    generate_channels,
    gradient_ascent,
    simulate_link,
)
from fdrelay.exceptions import UnstableLoopError


def test_zero_relay_gives_pure_destination_noise():
    cfg = SystemConfig(d=1)
    ch = generate_channels(cfg, 0)
    p = Precoders(v=np.ones((2, 1), dtype=complex), q=np.zeros((2, 2), dtype=complex))
    meas = simulate_link(p, ch, cfg, length=100_000, seed=3)
    target = cfg.sigma_d2 * np.eye(cfg.n_d)
    assert np.linalg.norm(meas.noise_cov - target) <= 0.05 * np.linalg.norm(target)
    assert np.linalg.norm(meas.signal_cov) <= 1e-12


def test_symbol_stream_unit_variance():
    cfg = SystemConfig(d=2)
    ch = generate_channels(cfg, 1)
    p = Precoders(v=np.eye(2, 2, dtype=complex), q=np.zeros((2, 2), dtype=complex))
    meas = simulate_link(p, ch, cfg, length=100_000, seed=5)
    var = np.mean(np.abs(meas.frame.s) ** 2, axis=0)
    assert np.all(np.abs(var - 1.0) <= 0.05)


def test_rank1_sinr_matches_closed_form():
    cfg = SystemConfig(d=1)
    for seed in (0, 1):
        ch = generate_channels(cfg, seed)
        sol = gradient_ascent(ch, cfg, seed=seed)
        meas = simulate_link(Precoders(v=sol.v, q=sol.q), ch, cfg, length=100_000, seed=seed + 9)
        assert abs(meas.sinr - sol.achieved_sinr) <= 0.05 * sol.achieved_sinr


def test_delay_invariance_under_exact_zero_forcing():
    base = SystemConfig(d=1, tau=1)
    ch = generate_channels(base, 4)
    sol = gradient_ascent(ch, base, seed=4)
    p = Precoders(v=sol.v, q=sol.q)
    m1 = simulate_link(p, ch, base, length=100_000, seed=11)
    cfg3 = SystemConfig(d=1, tau=3)
    m3 = simulate_link(p, ch, cfg3, length=100_000, seed=11)
    rel = np.linalg.norm(m1.signal_cov - m3.signal_cov) / np.linalg.norm(m1.signal_cov)
    assert rel <= 0.01
    rel_n = np.linalg.norm(m1.noise_cov - m3.noise_cov) / np.linalg.norm(m1.noise_cov)
    assert rel_n <= 0.01


def test_instability_guard_names_radius():
    cfg = SystemConfig(d=1)
    ch = generate_channels(cfg, 6)
    rng = np.random.default_rng(0)
    q0 = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    radius = np.max(np.abs(np.linalg.eigvals(q0 @ ch.h_rr)))
    q = q0 * (1.05 / radius)
    with pytest.raises(UnstableLoopError, match="spectral radius"):
        simulate_link(Precoders(v=np.ones((2, 1)), q=q), ch, cfg, length=10_000, seed=0)


def test_minimum_length_enforced():
    cfg = SystemConfig(d=1)
    ch = generate_channels(cfg, 0)
    p = Precoders(v=np.ones((2, 1), dtype=complex), q=np.zeros((2, 2), dtype=complex))
    with pytest.raises(ValueError, match="length"):
        simulate_link(p, ch, cfg, length=100, seed=0)
