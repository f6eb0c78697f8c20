import numpy as np
import pytest

from fdrelay import (
    Precoders,
    SystemConfig,
    generate_channels,
    gradient_ascent,
    lambda_max,
    lambda_max_gradient,
    projection_pi,
    rank1_objective,
    recover_solution,
    relay_power,
    rzf,
    source_power,
    tzf,
)
from fdrelay.channels import ChannelSet, complex_gaussian
from fdrelay.exceptions import DegenerateDirectionError, DegenerateEigengapError
from fdrelay.rank1 import (
    GradientAscentOptions,
    ascend_from,
    objective_gradient,
    stacked_real_gradient,
)


def _unit(rng, n):
    x = complex_gaussian(rng, (n,))
    return x / np.linalg.norm(x)


def _cfg(n, d=1, **kw):
    return SystemConfig(n_s=n, n_r=n, n_t=n, n_d=n, d=d, **kw)


class TestProjection:
    def test_identity_channel(self):
        pi = projection_pi(np.array([1.0 + 0j, 0.0]), np.eye(2, dtype=complex))
        expected = np.diag([0.0, 1.0]).astype(complex)
        assert np.allclose(pi, expected, atol=1e-14)

    def test_idempotent_and_hermitian(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            h_rr = complex_gaussian(rng, (3, 3), variance=0.01)
            x = _unit(rng, 3)
            pi = projection_pi(x, h_rr)
            assert np.linalg.norm(pi @ pi - pi) <= 1e-12
            assert np.linalg.norm(pi - pi.conj().T) <= 1e-13

    def test_annihilates_coupled_direction(self):
        rng = np.random.default_rng(1)
        h_rr = complex_gaussian(rng, (3, 3))
        x = _unit(rng, 3)
        pi = projection_pi(x, h_rr)
        assert np.linalg.norm(pi @ (h_rr.conj().T @ x)) <= 1e-12

    def test_degenerate_direction_raises(self):
        # rank-1 loopback whose left null space contains x_r
        u = np.array([1.0, 0.0, 0.0], dtype=complex)
        w = np.array([0.3, -0.2, 0.5 + 0.1j])
        h_rr = np.outer(u, w.conj())
        x = np.array([0.0, 1.0, 0.0], dtype=complex)  # u^H x = 0
        with pytest.raises(DegenerateDirectionError):
            projection_pi(x, h_rr)


class TestLambdaMax:
    def test_rank1_projector_trace_identity_nt2(self):
        rng = np.random.default_rng(2)
        for _ in range(10):
            h_rr = complex_gaussian(rng, (2, 2), variance=0.01)
            h_rd = complex_gaussian(rng, (3, 2))
            x = _unit(rng, 2)
            lam, _ = lambda_max(x, h_rr, h_rd)
            w = h_rr.conj().T @ x
            closed = np.real(np.trace(h_rd.conj().T @ h_rd)) - np.sum(
                np.abs(h_rd @ w) ** 2
            ) / np.sum(np.abs(w) ** 2)
            assert lam == pytest.approx(closed, rel=1e-10)

    def test_identity_rd_channel(self):
        h_rr = np.eye(2, dtype=complex)
        x = np.array([1.0 + 0j, 0.0])
        lam, _ = lambda_max(x, h_rr, np.eye(2, dtype=complex))
        assert lam == pytest.approx(1.0)

    def test_against_power_iteration(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            h_rr = complex_gaussian(rng, (4, 4), variance=0.01)
            h_rd = complex_gaussian(rng, (4, 4))
            x = _unit(rng, 4)
            lam, _ = lambda_max(x, h_rr, h_rd)
            pi = projection_pi(x, h_rr)
            m = h_rd @ pi @ h_rd.conj().T
            v = _unit(rng, 4)
            for _ in range(4000):
                v = m @ v
                v = v / np.linalg.norm(v)
            lam_pi = float(np.real(v.conj() @ m @ v))
            assert lam == pytest.approx(lam_pi, rel=1e-8)

    def test_eigenvalue_sandwich(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            h_rr = complex_gaussian(rng, (3, 3), variance=0.01)
            h_rd = complex_gaussian(rng, (3, 3))
            x = _unit(rng, 3)
            lam, _ = lambda_max(x, h_rr, h_rd)
            eigs = np.linalg.eigvalsh(h_rd.conj().T @ h_rd)
            assert eigs[-2] - 1e-9 <= lam <= eigs[-1] + 1e-9


class TestLambdaGradient:
    def test_finite_differences(self):
        rng = np.random.default_rng(5)
        h = 1e-6
        checked = 0
        while checked < 20:
            h_rr = complex_gaussian(rng, (4, 4), variance=0.01)
            h_rd = complex_gaussian(rng, (4, 4))
            x = _unit(rng, 4)
            try:
                g = lambda_max_gradient(x, h_rr, h_rd)
            except DegenerateEigengapError:
                continue
            gr = stacked_real_gradient(g)
            fd = np.zeros(8)
            for i in range(4):
                for which in (0, 1):
                    dx = np.zeros(4, dtype=complex)
                    dx[i] = h if which == 0 else 1j * h
                    fp, _ = lambda_max(x + dx, h_rr, h_rd)
                    fm, _ = lambda_max(x - dx, h_rr, h_rd)
                    fd[i + 4 * which] = (fp - fm) / (2 * h)
            assert np.linalg.norm(fd - gr) <= 1e-5 * np.linalg.norm(fd)
            checked += 1

    def test_scale_invariance_direction(self):
        rng = np.random.default_rng(6)
        h_rr = complex_gaussian(rng, (3, 3), variance=0.01)
        h_rd = complex_gaussian(rng, (3, 3))
        x = _unit(rng, 3)
        g = lambda_max_gradient(x, h_rr, h_rd)
        # lambda depends only on the direction of x, so the derivative along x vanishes
        directional = 2.0 * np.real(g.conj() @ x)
        assert abs(directional) <= 1e-8
        g2 = lambda_max_gradient(2.0 * x, h_rr, h_rd)
        assert np.allclose(g2, g / 2.0, atol=1e-10)

    def test_degenerate_gap_raises(self):
        # H_RD = I makes H_RD Pi H_RD^H = Pi whose top eigenvalue 1 is repeated
        rng = np.random.default_rng(7)
        h_rr = complex_gaussian(rng, (3, 3), variance=0.01)
        with pytest.raises(DegenerateEigengapError):
            lambda_max_gradient(_unit(rng, 3), h_rr, np.eye(3, dtype=complex))

    def test_flat_case_zero_gradient(self):
        # orthogonal-column H_RD (2x2 scaled unitary): lambda is constant in x_r
        rng = np.random.default_rng(8)
        u, _ = np.linalg.qr(complex_gaussian(rng, (2, 2)))
        h_rd = 1.7 * u
        h_rr = complex_gaussian(rng, (2, 2), variance=0.01)
        g = lambda_max_gradient(_unit(rng, 2), h_rr, h_rd)
        assert np.linalg.norm(g) <= 1e-6


class TestObjective:
    def test_scale_invariance(self):
        cfg = _cfg(3)
        ch = generate_channels(cfg, 0)
        rng = np.random.default_rng(9)
        x = _unit(rng, 3)
        f = rank1_objective(x, ch, cfg)
        for c in (0.5, 2.0, np.exp(1j * np.pi / 3)):
            assert abs(rank1_objective(c * x, ch, cfg) - f) <= 1e-10 * abs(f)

    def test_zero_source_channel(self):
        cfg = _cfg(2)
        ch0 = generate_channels(cfg, 0)
        ch = ChannelSet(h_sr=np.zeros_like(ch0.h_sr), h_rd=ch0.h_rd, h_rr=ch0.h_rr)
        rng = np.random.default_rng(10)
        assert rank1_objective(_unit(rng, 2), ch, cfg) == pytest.approx(0.0, abs=1e-15)

    def test_matches_explicit_sinr_at_recovery(self):
        cfg = _cfg(3)
        for seed in range(5):
            ch = generate_channels(cfg, seed)
            rng = np.random.default_rng(seed + 50)
            x = _unit(rng, 3)
            sol = recover_solution(x, ch, cfg)
            assert sol.achieved_sinr == pytest.approx(rank1_objective(x, ch, cfg), rel=1e-8)

    def test_full_gradient_finite_differences(self):
        cfg = _cfg(4)
        rng = np.random.default_rng(11)
        h = 1e-6
        for seed in range(5):
            ch = generate_channels(cfg, seed)
            x = _unit(rng, 4)
            g = stacked_real_gradient(objective_gradient(x, ch, cfg))
            fd = np.zeros(8)
            for i in range(4):
                for which in (0, 1):
                    dx = np.zeros(4, dtype=complex)
                    dx[i] = h if which == 0 else 1j * h
                    fd[i + 4 * which] = (
                        rank1_objective(x + dx, ch, cfg) - rank1_objective(x - dx, ch, cfg)
                    ) / (2 * h)
            assert np.linalg.norm(fd - g) <= 1e-5 * np.linalg.norm(fd)


class TestRecovery:
    def test_invariants(self):
        cfg = _cfg(3, d=2)
        for seed in range(5):
            ch = generate_channels(cfg, seed)
            rng = np.random.default_rng(seed)
            sol = recover_solution(complex_gaussian(rng, (3,)), ch, cfg)
            assert np.linalg.norm(sol.x_t) == pytest.approx(1.0, rel=1e-12)
            assert source_power(Precoders(v=sol.v, q=sol.q)) == pytest.approx(cfg.p_s, rel=1e-9)
            assert relay_power(Precoders(v=sol.v, q=sol.q), ch, cfg) == pytest.approx(
                cfg.p_r, rel=1e-9
            )
            zf = abs(sol.x_r.conj() @ ch.h_rr @ sol.x_t)
            assert zf <= 1e-9 * np.linalg.norm(ch.h_rr)
            assert sol.achieved_rate == pytest.approx(np.log1p(sol.achieved_sinr))
            # d > 1: single active column, remaining columns zero
            assert np.linalg.norm(sol.v[:, 1:]) == 0.0


class TestGradientAscent:
    def test_traces_monotone(self):
        cfg = _cfg(2)
        ch = generate_channels(cfg, 1)
        _, info = gradient_ascent(ch, cfg, seed=0, full_output=True)
        for trace in info.objective_traces:
            diffs = np.diff(np.asarray(trace))
            assert np.all(diffs >= -1e-12)

    def test_stationary_at_global_optimum(self):
        from fdrelay import global_search_2x2

        cfg = _cfg(2)
        ch = generate_channels(cfg, 2)
        glob = global_search_2x2(ch, cfg)
        x0 = glob.x_r / np.linalg.norm(glob.x_r)
        x, trace, iters = ascend_from(x0, ch, cfg, GradientAscentOptions())
        assert len(trace) <= 10
        assert trace[-1] >= glob.achieved_sinr * (1 - 1e-9)

    def test_matches_global_on_2x2(self):
        from fdrelay import global_search_2x2

        cfg = _cfg(2)
        hits = 0
        for seed in range(10):
            ch = generate_channels(cfg, seed)
            sol = gradient_ascent(ch, cfg, seed=seed)
            glob = global_search_2x2(ch, cfg)
            if abs(np.log1p(sol.achieved_sinr) - np.log1p(glob.achieved_sinr)) <= 1e-3:
                hits += 1
        assert hits >= 9


class TestLowComplexity:
    def test_zero_forcing_holds(self):
        cfg = _cfg(3)
        for seed in range(5):
            ch = generate_channels(cfg, seed)
            for sol in (tzf(ch, cfg), rzf(ch, cfg)):
                assert abs(sol.x_r.conj() @ ch.h_rr @ sol.x_t) <= 1e-9 * np.linalg.norm(ch.h_rr)

    def test_tzf_handles_invisible_xt(self):
        cfg = _cfg(3)
        ch0 = generate_channels(cfg, 3)
        vals, vecs = np.linalg.eigh(ch0.h_rd.conj().T @ ch0.h_rd)
        x_t = vecs[:, -1]
        rng = np.random.default_rng(0)
        z = complex_gaussian(rng, (3,))
        z = z - (x_t.conj() @ z) * x_t  # orthogonal to x_t
        h_rr = np.outer(complex_gaussian(rng, (3,)), z.conj())  # H_RR x_t = 0
        ch = ChannelSet(h_sr=ch0.h_sr, h_rd=ch0.h_rd, h_rr=h_rr)
        sol = tzf(ch, cfg)
        assert np.isfinite(sol.achieved_sinr)

    def test_symmetric_system_tzf_rzf_close(self):
        cfg = _cfg(2)
        diffs = []
        for seed in range(500):
            ch = generate_channels(cfg, seed)
            diffs.append(tzf(ch, cfg).achieved_sinr - rzf(ch, cfg).achieved_sinr)
        diffs = np.asarray(diffs)
        stderr = diffs.std(ddof=1) / np.sqrt(len(diffs))
        assert abs(diffs.mean()) <= 4 * stderr

    def test_tzf_si_sweep_bounded_by_matched_two_hop(self):
        # TZF is invariant to the loopback channel's scale (only the nulled
        # direction matters), so the variance sweep is flat and sits below the
        # unconstrained matched value, which is attained exactly at H_RR = 0.
        cfg = _cfg(3)
        base = generate_channels(cfg, 8)
        s_top = float(np.linalg.eigvalsh(base.h_sr @ base.h_sr.conj().T)[-1])
        lam_top = float(np.linalg.eigvalsh(base.h_rd.conj().T @ base.h_rd)[-1])
        alpha = cfg.p_s * s_top
        matched = alpha * lam_top / (
            cfg.sigma_r2 * lam_top + cfg.sigma_d2 / cfg.p_r * (alpha + cfg.sigma_r2)
        )
        sinrs = []
        for var in (1e-8, 1e-4, 1e-2, 1.0):
            scale = np.sqrt(var / cfg.sigma_rr2)
            ch = ChannelSet(h_sr=base.h_sr, h_rd=base.h_rd, h_rr=scale * base.h_rr)
            sinrs.append(tzf(ch, cfg).achieved_sinr)
        assert all(a >= b - 1e-9 for a, b in zip(sinrs, sinrs[1:]))
        assert all(s <= matched * (1 + 1e-9) for s in sinrs)
        zero = ChannelSet(h_sr=base.h_sr, h_rd=base.h_rd, h_rr=np.zeros_like(base.h_rr))
        assert tzf(zero, cfg).achieved_sinr == pytest.approx(matched, rel=1e-9)
