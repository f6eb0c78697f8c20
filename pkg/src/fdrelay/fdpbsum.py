"""Penalty-BSUM instance for the full-duplex relay design.

The rate problem is rewritten over the variable set
(Q, V, S, S~, Q~, V~, R) with equality couplings

    sigma_R Q = Q~,  S = S~,  V = V~,
    R^H Q = 0,  R^H = Q H_RR,  Q H_SR V~ = S~,

so that the two power budgets become separable ball constraints and every
block update of the penalized objective is available in closed form.  The
rate term is lower-bounded through the weighted-MMSE identity: with the
MMSE receiver U and weight W = (I - U^H H_RD S)^{-1},

    R(S, Q) = log det(W) - tr(W E(U, S, Q)) + d

holds with equality, giving a locally tight surrogate whose S and Q blocks
are quadratic.  Setting ``include_si=False`` drops R and the two
self-interference couplings; that variant is the no-SI benchmark whose
rate, halved, is the half-duplex baseline.
"""

import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from .channels import ChannelSet, complex_gaussian
from .config import SystemConfig, nats_to_bits
from .exceptions import MonotonicityError
from .metrics import Precoders, rate, relay_power, si_residual_inf
from .pbsum import BlockProblem, PenaltySchedule, SolveTrace, pbsum_solve
from .rank1 import recover_solution

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class PBsumState:
    """All primal blocks plus the receiver auxiliaries of one iterate."""

    q: np.ndarray          # (n_t, n_r) relay map
    v: np.ndarray          # (n_s, d) source beamformer
    s: np.ndarray          # (n_t, d) effective relay-output signal
    s_tilde: np.ndarray    # (n_t, d)
    q_tilde: np.ndarray    # (n_t, n_r)
    v_tilde: np.ndarray    # (n_s, d)
    r: np.ndarray | None   # (n_t, n_t) SI splitting variable; None in the no-SI variant
    u_bar: np.ndarray      # (n_d, d) MMSE receiver
    w_bar: np.ndarray      # (d, d) Hermitian weight
    rho: float


def project_ball(x: np.ndarray, radius: float) -> np.ndarray:
    """Frobenius-ball projection r*X/(||X|| + max(0, r - ||X||))."""
    n = float(np.linalg.norm(x))
    return x * (radius / (n + max(0.0, radius - n)))


def project_omega1(q_target: np.ndarray, s_target: np.ndarray, p_r: float):
    """Joint projection of the stacked pair onto tr(S~S~^H) + tr(Q~Q~^H) <= P_R."""
    n = float(np.sqrt(np.sum(np.abs(q_target) ** 2) + np.sum(np.abs(s_target) ** 2)))
    r = np.sqrt(p_r)
    scale = r / (n + max(0.0, r - n))
    return q_target * scale, s_target * scale


def omega1_block_minimizer(q_target: np.ndarray, s_target: np.ndarray, p_r: float):
    """Exact (Q~, S~) block minimizer on the relay power ball.

    The block objective after completing the square is
    ||Q~ - a||^2 + 2 ||S~ - b||^2 with a = sigma_R Q and b the midpoint of S
    and Q H_SR V~; the factor 2 comes from S~ appearing in two penalty
    terms.  On the boundary the minimizer is a *weighted* shrinkage
    Q~ = a/(1+lam), S~ = 2b/(2+lam) with lam >= 0 solving
    ||a||^2/(1+lam)^2 + 4||b||^2/(2+lam)^2 = P_R; an equal-weight ball
    projection of (a, b) is feasible but not optimal and can increase the
    merit, so it is not used here.
    """
    na2 = float(np.sum(np.abs(q_target) ** 2))
    nb2 = float(np.sum(np.abs(s_target) ** 2))
    if na2 + nb2 <= p_r:
        return q_target, s_target

    def radius2(lam: float) -> float:
        return na2 / (1.0 + lam) ** 2 + 4.0 * nb2 / (2.0 + lam) ** 2

    lo, hi = 0.0, 1.0
    while radius2(hi) > p_r:
        hi *= 2.0
    lam = brentq(lambda t: radius2(t) - p_r, lo, hi, xtol=1e-15, rtol=8.9e-16)
    return q_target / (1.0 + lam), s_target * (2.0 / (2.0 + lam))


def project_omega2(v_tilde: np.ndarray, p_s: float) -> np.ndarray:
    """Projection onto tr(V V^H) <= P_S."""
    return project_ball(v_tilde, np.sqrt(p_s))


def update_receiver(q: np.ndarray, s: np.ndarray, ch: ChannelSet, config: SystemConfig):
    """MMSE receiver and weight for the current (Q, S).

    U = (H_RD S S^H H_RD^H + sigma_R^2 H_RD Q Q^H H_RD^H + sigma_D^2 I)^{-1} H_RD S,
    W = (I - U^H H_RD S)^{-1}; W is Hermitian with eigenvalues >= 1.
    """
    g = ch.h_rd @ s
    hq = ch.h_rd @ q
    cov = (
        g @ g.conj().T
        + config.sigma_r2 * (hq @ hq.conj().T)
        + config.sigma_d2 * np.eye(config.n_d)
    )
    u = np.linalg.solve(cov, g)
    w = np.linalg.inv(np.eye(s.shape[1]) - u.conj().T @ g)
    w = 0.5 * (w + w.conj().T)
    return u, w


def update_r(q: np.ndarray, ch: ChannelSet) -> np.ndarray:
    """R = (I + Q Q^H)^{-1} H_RR^H Q^H, the exact minimizer of its two penalty terms."""
    n_t = q.shape[0]
    return np.linalg.solve(np.eye(n_t) + q @ q.conj().T, ch.h_rr.conj().T @ q.conj().T)


def _kron_sum(a: np.ndarray, b: np.ndarray, n_t: int, n_r: int) -> np.ndarray:
    """kron(I_nr, a) + kron(b.T, I_nt) without np.kron's overhead."""
    k = np.zeros((n_r, n_t, n_r, n_t), dtype=complex)
    idx = np.arange(n_r)
    k[idx, :, idx, :] = a
    k += b.T[:, None, :, None] * np.eye(n_t)[None, :, None, :]
    return k.reshape(n_r * n_t, n_r * n_t)


def _zf_rank_k(q: np.ndarray, h_rr: np.ndarray, k: int) -> np.ndarray | None:
    """Squeeze Q onto subspaces (U, W) with W^H H_RR U = 0, keeping rank k.

    Alternating null-space projections starting from Q's top singular
    subspaces; the resulting P_U Q P_W satisfies Q H_RR Q = 0 exactly.
    Returns None when the pair does not converge.
    """
    u0, _, vh0 = np.linalg.svd(q)
    xt = u0[:, :k]
    xr = vh0[:k].conj().T
    scale = np.linalg.norm(h_rr)
    for _ in range(60):
        a = xr.conj().T @ h_rr  # want a @ xt = 0
        gram = a @ a.conj().T
        gram[np.diag_indices_from(gram)] += 1e-14 * scale**2
        xt = xt - a.conj().T @ np.linalg.solve(gram, a @ xt)
        xt, _ = np.linalg.qr(xt)
        m = h_rr @ xt  # want m^H @ xr = 0
        gram = m.conj().T @ m
        gram[np.diag_indices_from(gram)] += 1e-14 * scale**2
        xr = xr - m @ np.linalg.solve(gram, m.conj().T @ xr)
        xr, _ = np.linalg.qr(xr)
        if np.linalg.norm(xr.conj().T @ h_rr @ xt) <= 1e-13 * max(scale, 1.0):
            break
    else:
        return None
    return xt @ ((xt.conj().T @ q @ xr) @ xr.conj().T)


def _sylvester_solve(a, b, c, n_t: int, n_r: int) -> np.ndarray:
    """Solve A Q + Q B = C by vectorization, with a residual contract check."""
    k = _kron_sum(a, b, n_t, n_r)
    rhs = c.flatten(order="F")
    try:
        q_vec = np.linalg.solve(k, rhs)
    except np.linalg.LinAlgError:  # cannot happen for PD A, PSD B; belt and braces
        warnings.warn("stacked Q system singular; regularizing by 1e-12 I")
        q_vec = np.linalg.solve(k + 1e-12 * np.eye(k.shape[0]), rhs)
    q = q_vec.reshape((n_t, n_r), order="F")
    resid = np.linalg.norm(a @ q + q @ b - c)
    if resid > 1e-8 * (np.linalg.norm(c) + 1.0):
        raise np.linalg.LinAlgError(f"Q update residual {resid:.3e} too large")
    return q


def update_q(
    u_bar: np.ndarray,
    w_bar: np.ndarray,
    q_tilde: np.ndarray,
    s_tilde: np.ndarray,
    v_tilde: np.ndarray,
    r: np.ndarray | None,
    ch: ChannelSet,
    config: SystemConfig,
    rho: float,
) -> np.ndarray:
    """Solve the Sylvester-form stationarity condition A Q + Q B = C for Q.

    A collects the receiver-weighted noise curvature plus the SI splitting,
    B the loopback and source couplings; the equation is vectorized into an
    (n_t n_r)-dimensional dense solve.  A is positive definite and B
    positive semidefinite, so the stacked system is nonsingular.
    """
    hu = ch.h_rd.conj().T @ u_bar
    a = (config.sigma_r2 / rho) * (hu @ w_bar @ hu.conj().T) + config.sigma_r2 * np.eye(
        config.n_t
    )
    hv = ch.h_sr @ v_tilde
    b = hv @ hv.conj().T
    c = np.sqrt(config.sigma_r2) * q_tilde + s_tilde @ hv.conj().T
    if r is not None:
        a = a + r @ r.conj().T
        b = b + ch.h_rr @ ch.h_rr.conj().T
        c = c + r.conj().T @ ch.h_rr.conj().T
    return _sylvester_solve(a, b, c, config.n_t, config.n_r)


def update_s(
    u_bar: np.ndarray,
    w_bar: np.ndarray,
    s_tilde: np.ndarray,
    ch: ChannelSet,
    rho: float,
) -> np.ndarray:
    """S = (rho I + H_RD^H U W U^H H_RD)^{-1} (rho S~ + H_RD^H U W)."""
    hu = ch.h_rd.conj().T @ u_bar
    m = hu @ w_bar @ hu.conj().T
    n_t = s_tilde.shape[0]
    return np.linalg.solve(rho * np.eye(n_t) + m, rho * s_tilde + hu @ w_bar)


def update_v_tilde(
    q: np.ndarray, v: np.ndarray, s_tilde: np.ndarray, ch: ChannelSet
) -> np.ndarray:
    """V~ = (I + H_SR^H Q^H Q H_SR)^{-1} (V + H_SR^H Q^H S~)."""
    qh = q @ ch.h_sr
    n_s = v.shape[0]
    return np.linalg.solve(
        np.eye(n_s) + qh.conj().T @ qh, v + qh.conj().T @ s_tilde
    )


def rate_decoupled(s: np.ndarray, q: np.ndarray, ch: ChannelSet, config: SystemConfig) -> float:
    """R(S, Q) in nats, with S standing in for Q H_SR V."""
    g = ch.h_rd @ s
    hq = ch.h_rd @ q
    noise = config.sigma_r2 * (hq @ hq.conj().T) + config.sigma_d2 * np.eye(config.n_d)
    _, ld_full = np.linalg.slogdet(noise + g @ g.conj().T)
    _, ld_noise = np.linalg.slogdet(noise)
    return float(ld_full - ld_noise)


def mse_matrix(
    u: np.ndarray, s: np.ndarray, q: np.ndarray, ch: ChannelSet, config: SystemConfig
) -> np.ndarray:
    """E(U, S, Q): the d x d error covariance of the receiver U."""
    g = ch.h_rd @ s
    hq = ch.h_rd @ q
    i_d = np.eye(s.shape[1])
    t = i_d - u.conj().T @ g
    return (
        t @ t.conj().T
        + config.sigma_r2 * (u.conj().T @ hq) @ (u.conj().T @ hq).conj().T
        + config.sigma_d2 * (u.conj().T @ u)
    )


def wmmse_bound(u, w, s, q, ch: ChannelSet, config: SystemConfig) -> float:
    """log det(W) - tr(W E(U,S,Q)) + d; equals R(S,Q) at the MMSE (U, W)."""
    _, ld = np.linalg.slogdet(w)
    e = mse_matrix(u, s, q, ch, config)
    return float(ld - np.real(np.trace(w @ e)) + s.shape[1])


def _penalty_blocks(state: PBsumState, ch: ChannelSet, config: SystemConfig) -> list:
    """The six (or four, no-SI) equality residual matrices, unweighted."""
    blocks = [
        np.sqrt(config.sigma_r2) * state.q - state.q_tilde,
        state.s - state.s_tilde,
        state.v - state.v_tilde,
        state.q @ ch.h_sr @ state.v_tilde - state.s_tilde,
    ]
    if state.r is not None:
        blocks.insert(3, state.r.conj().T @ state.q)
        blocks.insert(4, state.r.conj().T - state.q @ ch.h_rr)
    return blocks


def merit_e_rho(state: PBsumState, ch: ChannelSet, config: SystemConfig, rho: float) -> float:
    """tr(W E(U,S,Q)) + rho * sum of squared penalty norms, at the stored (U, W)."""
    e = mse_matrix(state.u_bar, state.s, state.q, ch, config)
    pen = sum(float(np.sum(np.abs(b) ** 2)) for b in _penalty_blocks(state, ch, config))
    return float(np.real(np.trace(state.w_bar @ e))) + rho * pen


def init_state(
    ch: ChannelSet, config: SystemConfig, seed: int, include_si: bool = True
) -> PBsumState:
    """Feasible starting point: orthonormal V at full source power, Q scaled
    to 90% relay power, tildes copying their coupled counterparts."""
    ch.check_dims(config)
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(complex_gaussian(rng, (config.n_s, config.n_s)))
    v = np.sqrt(config.p_s / config.d) * basis[:, : config.d]

    q_raw = complex_gaussian(rng, (config.n_t, config.n_r))
    p_raw = relay_power(Precoders(v=v, q=q_raw), ch, config)
    q = q_raw * np.sqrt(0.9 * config.p_r / p_raw)

    s = q @ ch.h_sr @ v
    u, w = update_receiver(q, s, ch, config)
    return PBsumState(
        q=q,
        v=v,
        s=s,
        s_tilde=s.copy(),
        q_tilde=np.sqrt(config.sigma_r2) * q,
        v_tilde=v.copy(),
        r=update_r(q, ch) if include_si else None,
        u_bar=u,
        w_bar=w,
        rho=np.nan,
    )


class FdRelayProblem(BlockProblem):
    """BlockProblem wiring for the (optionally no-SI) relay design.

    The instance's h(x) absorbs a sqrt(2) factor per block so that the
    framework merit f + (rho/2)||h||^2 equals the penalized objective with
    plain rho-weighted squared norms.
    """

    def __init__(
        self,
        ch: ChannelSet,
        config: SystemConfig,
        seed: int = 0,
        include_si: bool = True,
        validate: bool = False,
        monotone_slack: float = 1e-9,
    ):
        ch.check_dims(config)
        self.ch = ch
        self.config = config
        self.seed = seed
        self.include_si = include_si
        self.validate = validate
        self.monotone_slack = monotone_slack
        # Channel constants reused every cycle.
        self._hsr_h = ch.h_sr.conj().T
        self._hrd_h = ch.h_rd.conj().T
        self._hrr_h = ch.h_rr.conj().T
        self._hrr_gram = ch.h_rr @ self._hrr_h
        self._eye_nt = np.eye(config.n_t)
        self._eye_nr = np.eye(config.n_r)
        self._eye_nd = np.eye(config.n_d)
        self._eye_ns = np.eye(config.n_s)
        self._eye_d = np.eye(config.d)
        self._sigma_r = np.sqrt(config.sigma_r2)

    def initial_state(self) -> PBsumState:
        return init_state(self.ch, self.config, self.seed, self.include_si)

    def objective(self, state: PBsumState) -> float:
        g = self.ch.h_rd @ state.s
        hq = self.ch.h_rd @ state.q
        noise = self.config.sigma_r2 * (hq @ hq.conj().T) + self.config.sigma_d2 * self._eye_nd
        _, ld_full = np.linalg.slogdet(noise + g @ g.conj().T)
        _, ld_noise = np.linalg.slogdet(noise)
        return float(ld_noise - ld_full)

    def residual_blocks(self, state: PBsumState) -> list:
        return [_SQRT2 * b for b in _penalty_blocks(state, self.ch, self.config)]

    def penalty_norm2(self, state: PBsumState) -> float:
        # ||h||^2 with the sqrt(2) factor folded in as a plain factor 2.
        return 2.0 * sum(
            float(np.vdot(b, b).real) for b in _penalty_blocks(state, self.ch, self.config)
        )

    def feasible_proposals(self, state: PBsumState, rho: float) -> list:
        """Exactly self-interference-feasible candidates near the iterate.

        One candidate per admissible rank k <= min(n_t, n_r)/2 (the largest
        rank the zero-forcing null allows), built by squeezing Q onto a
        subspace pair annihilating the loopback, plus the fully optimized
        single-stream design aligned with Q's dominant direction.  Every
        candidate has all equality residuals at zero, so once the drifting
        iterate's merit falls behind, adoption terminates the run at once.
        """
        if not self.include_si:
            return []
        out = []
        try:
            _, _, vh = np.linalg.svd(state.q)
            sol = recover_solution(vh[0, :].conj(), self.ch, self.config)
            out.append(self._feasible_state(sol.q, sol.v, rho))
        except (ValueError, np.linalg.LinAlgError):
            pass
        for k in range(2, min(self.config.n_t, self.config.n_r) // 2 + 1):
            q_k = _zf_rank_k(state.q, self.ch.h_rr, k)
            if q_k is None:
                continue
            p = relay_power(Precoders(v=state.v, q=q_k), self.ch, self.config)
            if p <= 0:
                continue
            out.append(self._feasible_state(q_k * np.sqrt(self.config.p_r / p), state.v, rho))
        return out

    def _feasible_state(self, q: np.ndarray, v: np.ndarray, rho: float) -> PBsumState:
        s = q @ self.ch.h_sr @ v
        u, w = update_receiver(q, s, self.ch, self.config)
        return PBsumState(
            q=q,
            v=v.copy(),
            s=s,
            s_tilde=s.copy(),
            q_tilde=self._sigma_r * q,
            v_tilde=v.copy(),
            r=update_r(q, self.ch),
            u_bar=u,
            w_bar=w,
            rho=rho,
        )

    def state_to_vec(self, state: PBsumState) -> np.ndarray:
        parts = [state.q, state.v, state.s, state.s_tilde, state.q_tilde, state.v_tilde]
        if state.r is not None:
            parts.append(state.r)
        return np.concatenate([p.ravel().view(np.float64) for p in parts])

    def vec_to_state(self, vec: np.ndarray, template: PBsumState, rho: float) -> PBsumState:
        cfg = self.config
        shapes = [
            (cfg.n_t, cfg.n_r),
            (cfg.n_s, cfg.d),
            (cfg.n_t, cfg.d),
            (cfg.n_t, cfg.d),
            (cfg.n_t, cfg.n_r),
            (cfg.n_s, cfg.d),
        ]
        if template.r is not None:
            shapes.append((cfg.n_t, cfg.n_t))
        arrays = []
        pos = 0
        for shape in shapes:
            n = 2 * shape[0] * shape[1]
            arrays.append(vec[pos : pos + n].view(np.complex128).reshape(shape))
            pos += n
        q, v, s, s_t, q_t, v_t = arrays[:6]
        r = arrays[6] if template.r is not None else None
        # Restore membership of the two power balls before any merit check.
        q_t, s_t = project_omega1(q_t, s_t, cfg.p_r)
        v = project_omega2(v, cfg.p_s)
        return PBsumState(
            q=q, v=v, s=s, s_tilde=s_t, q_tilde=q_t, v_tilde=v_t, r=r,
            u_bar=template.u_bar, w_bar=template.w_bar, rho=rho,
        )

    def inner_cycle(self, state: PBsumState, rho: float) -> PBsumState:
        if self.validate:
            return self._inner_cycle_checked(state, rho)
        ch, config = self.ch, self.config
        sr2 = config.sigma_r2
        q0, s0, vt0 = state.q, state.s, state.v_tilde

        # Receiver refresh (steps 2-3).
        g = ch.h_rd @ s0
        hq = ch.h_rd @ q0
        cov = g @ g.conj().T + sr2 * (hq @ hq.conj().T) + config.sigma_d2 * self._eye_nd
        u = np.linalg.solve(cov, g)
        w = np.linalg.inv(self._eye_d - u.conj().T @ g)
        w = 0.5 * (w + w.conj().T)

        # Relay-ball block (step 4) and source-ball block (step 5).
        q_t, s_t = omega1_block_minimizer(
            self._sigma_r * q0, 0.5 * (s0 + q0 @ (ch.h_sr @ vt0)), config.p_r
        )
        v = project_omega2(vt0, config.p_s)

        # SI splitting variable (step 6).
        r = (
            np.linalg.solve(self._eye_nt + q0 @ q0.conj().T, self._hrr_h @ q0.conj().T)
            if self.include_si
            else None
        )

        # Relay map (step 7): A Q + Q B = C via the stacked dense solve.
        hu = self._hrd_h @ u
        huw = hu @ w
        m = huw @ hu.conj().T
        a = (sr2 / rho) * m + sr2 * self._eye_nt
        hv = ch.h_sr @ vt0
        b = hv @ hv.conj().T
        c = self._sigma_r * q_t + s_t @ hv.conj().T
        if r is not None:
            a = a + r @ r.conj().T
            b = b + self._hrr_gram
            c = c + r.conj().T @ self._hrr_h
        q = _sylvester_solve(a, b, c, config.n_t, config.n_r)

        # Effective signal (step 8) and source auxiliary (step 9).
        s = np.linalg.solve(rho * self._eye_nt + m, rho * s_t + huw)
        qh = q @ ch.h_sr
        v_t = np.linalg.solve(
            self._eye_ns + qh.conj().T @ qh, v + qh.conj().T @ s_t
        )
        return PBsumState(
            q=q, v=v, s=s, s_tilde=s_t, q_tilde=q_t, v_tilde=v_t, r=r,
            u_bar=u, w_bar=w, rho=rho,
        )

    def _inner_cycle_checked(self, state: PBsumState, rho: float) -> PBsumState:
        """Same cycle, asserting after each block that E_rho did not increase."""
        ch, config = self.ch, self.config
        state = replace(state, rho=rho)

        u, w = update_receiver(state.q, state.s, ch, config)
        state = replace(state, u_bar=u, w_bar=w)

        q_t, s_t = omega1_block_minimizer(
            np.sqrt(config.sigma_r2) * state.q,
            0.5 * (state.s + state.q @ ch.h_sr @ state.v_tilde),
            config.p_r,
        )
        state = self._checked("omega1_block", state, replace(state, q_tilde=q_t, s_tilde=s_t))

        state = self._checked(
            "project_omega2", state, replace(state, v=project_omega2(state.v_tilde, config.p_s))
        )

        if self.include_si:
            state = self._checked("update_r", state, replace(state, r=update_r(state.q, ch)))

        q_new = update_q(
            state.u_bar, state.w_bar, state.q_tilde, state.s_tilde,
            state.v_tilde, state.r, ch, config, rho,
        )
        state = self._checked("update_q", state, replace(state, q=q_new))

        s_new = update_s(state.u_bar, state.w_bar, state.s_tilde, ch, rho)
        state = self._checked("update_s", state, replace(state, s=s_new))

        vt_new = update_v_tilde(state.q, state.v, state.s_tilde, ch)
        state = self._checked("update_v_tilde", state, replace(state, v_tilde=vt_new))
        return state

    def _checked(self, name: str, old: PBsumState, new: PBsumState) -> PBsumState:
        before = merit_e_rho(old, self.ch, self.config, old.rho)
        after = merit_e_rho(new, self.ch, self.config, new.rho)
        if after > before + self.monotone_slack:
            raise MonotonicityError(
                f"block '{name}' increased E_rho: {before:.12e} -> {after:.12e}"
            )
        return new


@dataclass
class FdSolveResult:
    """Terminal iterate of one P-BSUM run, reported through the exact metrics."""

    precoders: Precoders
    rate_nats: float
    rate_bits: float
    residual_inf: float
    si_residual_inf: float
    trace: SolveTrace
    state: PBsumState
    polished_rate_nats: float | None = None

    @property
    def converged(self) -> bool:
        return self.trace.converged


def _rank1_polish(
    q: np.ndarray, v: np.ndarray, ch: ChannelSet, config: SystemConfig
) -> float | None:
    """Rate after snapping Q to its best rank-1 approximation and rescaling
    the receive side to full relay power.  Diagnostic for small relays."""
    if max(config.n_t, config.n_r) > 3:
        return None
    uu, sv, vh = np.linalg.svd(q)
    x_t = uu[:, 0]
    x_r = sv[0] * vh[0, :].conj()
    p = Precoders(v=v, q=np.outer(x_t, x_r.conj()))
    pw = relay_power(p, ch, config)
    if pw <= 0:
        return None
    x_r = x_r * np.sqrt(config.p_r / pw)
    return rate(Precoders(v=v, q=np.outer(x_t, x_r.conj())), ch, config)


def _solve(problem: FdRelayProblem, sched: PenaltySchedule | None) -> FdSolveResult:
    from .pbsum import residual_inf as _residual_inf

    state, trace = pbsum_solve(problem, sched, monotone_slack=problem.monotone_slack)
    p = Precoders(v=state.v, q=state.q)
    r_nats = rate(p, problem.ch, problem.config)
    return FdSolveResult(
        precoders=p,
        rate_nats=r_nats,
        rate_bits=nats_to_bits(r_nats),
        residual_inf=_residual_inf(problem, state),
        si_residual_inf=si_residual_inf(p, problem.ch),
        trace=trace,
        state=state,
        polished_rate_nats=_rank1_polish(state.q, state.v, problem.ch, problem.config),
    )


def solve_fd_pbsum(
    ch: ChannelSet,
    config: SystemConfig,
    sched: PenaltySchedule | None = None,
    seed: int = 0,
    validate: bool = False,
) -> FdSolveResult:
    """Joint design under the zero-forcing SI constraint."""
    return _solve(FdRelayProblem(ch, config, seed=seed, validate=validate), sched)


def solve_upper_bound_no_si(
    ch: ChannelSet,
    config: SystemConfig,
    sched: PenaltySchedule | None = None,
    seed: int = 0,
    validate: bool = False,
) -> FdSolveResult:
    """Benchmark upper bound: same solve with the SI couplings removed.

    Half of the returned rate is the half-duplex baseline.
    """
    return _solve(
        FdRelayProblem(ch, config, seed=seed, include_si=False, validate=validate), sched
    )
