"""Single-stream (rank-1) joint source-relay design.

With Q = x_t x_r^H the self-interference null reduces to x_r^H H_RR x_t = 0
and the whole design collapses to an unconstrained problem in x_r alone:
the best x_t for a given x_r is the leading eigenvector of Pi H_RD^H H_RD Pi,
where Pi projects out the direction H_RR^H x_r.  This module implements the
objective, its Wirtinger gradient, multi-start gradient ascent with Armijo
backtracking, the solution recovery (V, x_t, x_r scaling), and the two
low-complexity eigenvector designs (TZF and RZF).
"""

from dataclasses import dataclass

import numpy as np

from .channels import ChannelSet, complex_gaussian
from .config import SystemConfig
from .exceptions import DegenerateDirectionError, DegenerateEigengapError

_DEGENERATE_DIR_TOL = 1e-12
_EIGENGAP_TOL = 1e-9


@dataclass(frozen=True)
class Rank1Solution:
    """Recovered (x_t, x_r, V) triple with its achieved SINR and rate (nats)."""

    x_t: np.ndarray
    x_r: np.ndarray
    v: np.ndarray
    achieved_sinr: float
    achieved_rate: float

    @property
    def q(self) -> np.ndarray:
        """Relay amplification matrix x_t x_r^H."""
        return np.outer(self.x_t, self.x_r.conj())


@dataclass(frozen=True)
class GradientAscentOptions:
    starts: int = 5
    max_iters: int = 5000
    grad_tol: float = 1e-6
    initial_step: float = 1.0
    shrink: float = 0.5
    sufficient_increase: float = 1e-4
    min_step: float = 1e-14


@dataclass
class GradientAscentInfo:
    """Diagnostics of one multi-start run."""

    objective_traces: list  # one non-decreasing trace per start
    best_start: int
    total_iterations: int


def projection_pi(x_r: np.ndarray, h_rr: np.ndarray) -> np.ndarray:
    """Pi = I - (H_RR^H x_r x_r^H H_RR) / ||H_RR^H x_r||^2 (n_t x n_t)."""
    w = h_rr.conj().T @ x_r
    nw2 = float(np.real(w.conj() @ w))
    if np.sqrt(nw2) < _DEGENERATE_DIR_TOL:
        raise DegenerateDirectionError(
            "H_RR^H x_r is numerically zero; perturb x_r and retry"
        )
    n_t = h_rr.shape[1]
    return np.eye(n_t) - np.outer(w, w.conj()) / nw2


def lambda_max(x_r: np.ndarray, h_rr: np.ndarray, h_rd: np.ndarray):
    """Largest eigenvalue of H_RD Pi H_RD^H and its unit eigenvector."""
    pi = projection_pi(x_r, h_rr)
    m = h_rd @ pi @ h_rd.conj().T
    vals, vecs = np.linalg.eigh(m)
    return float(vals[-1]), vecs[:, -1]


def _lambda_eigengap(x_r, h_rr, h_rd):
    pi = projection_pi(x_r, h_rr)
    m = h_rd @ pi @ h_rd.conj().T
    vals, vecs = np.linalg.eigh(m)
    gap = float(vals[-1] - vals[-2]) if len(vals) > 1 else np.inf
    return float(vals[-1]), vecs[:, -1], gap


def lambda_max_gradient(x_r: np.ndarray, h_rr: np.ndarray, h_rd: np.ndarray) -> np.ndarray:
    """Wirtinger gradient (w.r.t. conj(x_r)) of the top eigenvalue.

    With u1 the top eigenvector and w = H_RR^H x_r:

        grad = -a (a^H x_r)/||w||^2 + |a^H x_r|^2 (H_RR w)/||w||^4,
        a = H_RR H_RD^H u1.

    Requires a simple top eigenvalue; raises otherwise.
    """
    _, u1, gap = _lambda_eigengap(x_r, h_rr, h_rd)
    if gap < _EIGENGAP_TOL:
        raise DegenerateEigengapError(
            f"top eigenvalue gap {gap:.3e} < {_EIGENGAP_TOL}; perturb x_r and retry"
        )
    w = h_rr.conj().T @ x_r
    nw2 = float(np.real(w.conj() @ w))
    a = h_rr @ (h_rd.conj().T @ u1)
    ax = complex(a.conj() @ x_r)
    return -a * ax / nw2 + (abs(ax) ** 2) * (h_rr @ w) / nw2**2


def rank1_objective(x_r: np.ndarray, ch: ChannelSet, config: SystemConfig) -> float:
    """SINR of the unconstrained single-stream problem (scale-invariant in x_r)."""
    if np.linalg.norm(x_r) == 0:
        raise ValueError("x_r must be nonzero")
    lam, _ = lambda_max(x_r, ch.h_rr, ch.h_rd)
    return _objective_given_lambda(x_r, lam, ch, config)


def _objective_given_lambda(x_r, lam, ch, config):
    alpha = config.p_s * float(np.sum(np.abs(ch.h_sr.conj().T @ x_r) ** 2))
    beta = config.sigma_r2 * float(np.real(x_r.conj() @ x_r))
    k = config.sigma_d2 / config.p_r
    return alpha * lam / (beta * lam + k * (alpha + beta))


def objective_gradient(x_r: np.ndarray, ch: ChannelSet, config: SystemConfig) -> np.ndarray:
    """Wirtinger gradient of the full single-stream SINR objective.

    Quotient rule over alpha(x) lam(x) / (beta(x) lam(x) + k (alpha + beta)),
    with the eigenvalue gradient supplied by :func:`lambda_max_gradient`.
    """
    lam, _ = lambda_max(x_r, ch.h_rr, ch.h_rd)
    g_lam = lambda_max_gradient(x_r, ch.h_rr, ch.h_rd)

    hs = ch.h_sr @ ch.h_sr.conj().T
    alpha = config.p_s * float(np.real(x_r.conj() @ hs @ x_r))
    beta = config.sigma_r2 * float(np.real(x_r.conj() @ x_r))
    g_alpha = config.p_s * (hs @ x_r)
    g_beta = config.sigma_r2 * x_r
    k = config.sigma_d2 / config.p_r

    num = alpha * lam
    den = beta * lam + k * (alpha + beta)
    g_num = g_alpha * lam + alpha * g_lam
    g_den = g_beta * lam + beta * g_lam + k * (g_alpha + g_beta)
    return (g_num * den - num * g_den) / den**2


def stacked_real_gradient(g: np.ndarray) -> np.ndarray:
    """Map a Wirtinger gradient to the gradient over stacked (Re, Im) coordinates."""
    return np.concatenate([2.0 * g.real, 2.0 * g.imag])


def recover_solution(x_r: np.ndarray, ch: ChannelSet, config: SystemConfig) -> Rank1Solution:
    """Recover the feasible triple from an (unscaled) x_r.

    V gets the single column sqrt(P_S) H_SR^H x_r / ||H_SR^H x_r|| (remaining
    columns zero when d > 1), x_t is the unit leading eigenvector of
    Pi H_RD^H H_RD Pi, and x_r is scaled so the relay power equals P_R.
    When H_RR^H x_r vanishes the null constraint is vacuous and Pi = I.
    """
    try:
        pi = projection_pi(x_r, ch.h_rr)
    except DegenerateDirectionError:
        pi = np.eye(ch.h_rr.shape[1])
    g = ch.h_rd @ pi
    vals, vecs = np.linalg.eigh(g.conj().T @ g)
    x_t = vecs[:, -1]

    hsx = ch.h_sr.conj().T @ x_r
    nhsx = np.linalg.norm(hsx)
    if nhsx == 0:
        raise ValueError("H_SR^H x_r is zero; the source cannot reach the relay")
    v = np.zeros((config.n_s, config.d), dtype=complex)
    v[:, 0] = np.sqrt(config.p_s) * hsx / nhsx

    alpha = config.p_s * float(nhsx**2)
    beta = config.sigma_r2 * float(np.real(x_r.conj() @ x_r))
    x_r_star = np.sqrt(config.p_r / (alpha + beta)) * x_r

    # SINR of the recovered triple, in its explicit two-hop form.
    c2 = float(np.sum(np.abs(x_r_star.conj() @ ch.h_sr @ v) ** 2))
    g2 = float(np.sum(np.abs(ch.h_rd @ x_t) ** 2))
    nr2 = float(np.real(x_r_star.conj() @ x_r_star))
    sinr = c2 * g2 / (config.sigma_r2 * nr2 * g2 + config.sigma_d2)
    return Rank1Solution(
        x_t=x_t, x_r=x_r_star, v=v, achieved_sinr=sinr, achieved_rate=float(np.log1p(sinr))
    )


def ascend_from(x0: np.ndarray, ch: ChannelSet, config: SystemConfig,
                opts: GradientAscentOptions | None = None):
    """Armijo-backtracked gradient ascent from one start; returns (x, trace, iters).

    The trace holds the objective value at the start and after every
    accepted step, so it is non-decreasing by the line-search contract.
    The backtracking starts from a Barzilai-Borwein estimate of the local
    curvature once two gradients are available; plain steepest ascent with
    a fixed unit step crawls badly on the ill-conditioned ridges that
    appear at larger antenna counts.
    """
    opts = opts or GradientAscentOptions()
    x = x0 / np.linalg.norm(x0)
    f = rank1_objective(x, ch, config)
    trace = [f]
    rng = np.random.default_rng(0xA5CE4D)
    iters = 0
    prev_x = None
    prev_g = None
    for _ in range(opts.max_iters):
        try:
            g = objective_gradient(x, ch, config)
        except DegenerateEigengapError:
            # Ties occur with probability zero; nudge off the tie and retry.
            x = x + 1e-6 * complex_gaussian(rng, x.shape)
            x = x / np.linalg.norm(x)
            f = rank1_objective(x, ch, config)
            prev_x = prev_g = None
            continue
        iters += 1
        g_norm2 = float(np.real(g.conj() @ g))
        if 2.0 * np.sqrt(g_norm2) <= opts.grad_tol:
            break
        step = opts.initial_step
        if prev_g is not None:
            s = x - prev_x
            y = g - prev_g
            sy = float(np.real(s.conj() @ y))
            if sy < 0:  # curvature consistent with a local maximum
                bb = float(np.real(s.conj() @ s)) / (-sy)
                step = min(max(bb, opts.min_step), 1e6)
        # Ascent along the conjugate gradient; directional derivative is 2||g||^2.
        accepted = False
        while step >= opts.min_step:
            x_new = x + step * g
            f_new = rank1_objective(x_new, ch, config)
            if f_new >= f + opts.sufficient_increase * step * 2.0 * g_norm2:
                accepted = True
                break
            step *= opts.shrink
        if not accepted:
            break
        prev_x, prev_g = x, g
        x = x_new / np.linalg.norm(x_new)
        f = f_new
        trace.append(f)
    return x, trace, iters


def gradient_ascent(
    ch: ChannelSet,
    config: SystemConfig,
    opts: GradientAscentOptions | None = None,
    seed: int = 0,
    full_output: bool = False,
):
    """Multi-start gradient ascent on the single-stream objective.

    Returns the best :class:`Rank1Solution` over ``opts.starts`` random
    complex-Gaussian initializations (``full_output=True`` adds diagnostics).
    """
    opts = opts or GradientAscentOptions()
    rng = np.random.default_rng(seed)
    best_x, best_f, best_idx = None, -np.inf, -1
    traces = []
    total_iters = 0
    for i in range(opts.starts):
        x0 = complex_gaussian(rng, (config.n_r,))
        x, trace, iters = ascend_from(x0, ch, config, opts)
        traces.append(trace)
        total_iters += iters
        if trace[-1] > best_f:
            best_x, best_f, best_idx = x, trace[-1], i
    sol = recover_solution(best_x, ch, config)
    if full_output:
        return sol, GradientAscentInfo(
            objective_traces=traces, best_start=best_idx, total_iterations=total_iters
        )
    return sol


def tzf(ch: ChannelSet, config: SystemConfig) -> Rank1Solution:
    """Transmit-side zero forcing: fix x_t first, null x_r against it.

    x_t is the unit leading eigenvector of H_RD^H H_RD; x_r maximizes
    ||x_r^H H_SR||^2/||x_r||^2 subject to x_r^H H_RR x_t = 0.
    """
    vals, vecs = np.linalg.eigh(ch.h_rd.conj().T @ ch.h_rd)
    x_t = vecs[:, -1]
    w = ch.h_rr @ x_t
    nw = np.linalg.norm(w)
    n_r = ch.h_rr.shape[0]
    if nw < _DEGENERATE_DIR_TOL * max(1.0, np.linalg.norm(ch.h_rr)):
        pi_r = np.eye(n_r)  # x_t already invisible to the loopback channel
    else:
        pi_r = np.eye(n_r) - np.outer(w, w.conj()) / nw**2
    m = pi_r @ ch.h_sr @ ch.h_sr.conj().T @ pi_r
    _, uvecs = np.linalg.eigh(m)
    x_r = uvecs[:, -1]
    return recover_solution(x_r, ch, config)


def rzf(ch: ChannelSet, config: SystemConfig) -> Rank1Solution:
    """Receive-side zero forcing: x_r is the leading eigenvector of H_SR H_SR^H."""
    _, vecs = np.linalg.eigh(ch.h_sr @ ch.h_sr.conj().T)
    return recover_solution(vecs[:, -1], ch, config)
