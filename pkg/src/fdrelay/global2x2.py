"""Global single-stream solver for two relay transmit/receive antennas.

When n_t = 2 the projector Pi has rank one, so the top eigenvalue is the
trace and the eigenvalue constraint becomes a quadratic null condition:
fixing lambda_1 turns the design into maximizing a ratio of Hermitian
quadratic forms on the cone {x : x^H A_3 x = 0}.  For n_r = 2 that cone is
a one-parameter family (a phase), the ratio is monotone in the cosine of
that phase, and the fixed-lambda value v(lambda_1) is available in closed
form.  A one-dimensional grid over lambda_1 with local refinement then
yields the global solution.
"""

from dataclasses import dataclass

import numpy as np

from .channels import ChannelSet
from .config import SystemConfig
from .rank1 import Rank1Solution, recover_solution

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class QuadRatioInstance:
    """Fixed-lambda quadratic ratio problem: max x^H a1 x / x^H a2 x on x^H a3 x = 0."""

    a1: np.ndarray
    a2: np.ndarray
    a3: np.ndarray
    lambda1: float
    lambda1_tilde: float


def build_quad_ratio_instance(
    lambda1_tilde: float, ch: ChannelSet, config: SystemConfig
) -> QuadRatioInstance:
    m_rd = ch.h_rd.conj().T @ ch.h_rd
    lambda1 = float(np.real(np.trace(m_rd))) - lambda1_tilde
    hs = ch.h_sr @ ch.h_sr.conj().T
    n_r = hs.shape[0]
    a1 = lambda1 * config.p_s * hs
    a2 = (
        config.sigma_r2 * (lambda1 + config.sigma_d2 / config.p_r) * np.eye(n_r)
        + (config.sigma_d2 * config.p_s / config.p_r) * hs
    )
    a3 = ch.h_rr @ (m_rd - lambda1_tilde * np.eye(m_rd.shape[0])) @ ch.h_rr.conj().T
    return QuadRatioInstance(a1=a1, a2=a2, a3=a3, lambda1=lambda1, lambda1_tilde=lambda1_tilde)


def _ratio(x: np.ndarray, inst: QuadRatioInstance) -> float:
    num = float(np.real(x.conj() @ inst.a1 @ x))
    den = float(np.real(x.conj() @ inst.a2 @ x))
    return num / den


def solve_fixed_lambda(inst: QuadRatioInstance):
    """Closed-form v(lambda_1) and a maximizing x_r, or None for skipped points.

    Indefinite a3: eigendecompose a3 = U diag(s1, s2) U^H with s1 >= s2,
    put mu1 = |s1|, mu2 = |s2|; the constraint pins |x2| = sqrt(mu1/mu2)|x1|
    and the ratio is monotone in z = cos(angle(x1) - angle(a12)), so the
    optimum sits at z = +-1.  (Near-)positive-semidefinite a3: the only
    admissible direction is the zero eigenvector.
    """
    vals, vecs = np.linalg.eigh(inst.a3)
    s2, s1 = float(vals[0]), float(vals[1])  # ascending from eigh
    u = vecs[:, ::-1]  # columns ordered descending
    scale = max(abs(s1), abs(s2), 1e-300)

    if s2 >= -1e-12 * scale:
        # PSD (grid endpoint): admissible set is the zero eigenvector.
        x = vecs[:, 0] if abs(s2) <= abs(s1) else vecs[:, 1]
        return _ratio(x, inst), x
    if s1 <= 1e-12 * scale:
        return None  # a3 negative semidefinite cannot occur on the grid; skip

    mu1, mu2 = abs(s1), abs(s2)
    if mu2 <= 1e-12 * scale:
        return None  # pathological: constraint direction collapses

    a_t = u.conj().T @ inst.a1 @ u
    b_t = u.conj().T @ inst.a2 @ u
    a11, a22, a12 = float(a_t[0, 0].real), float(a_t[1, 1].real), complex(a_t[0, 1])
    b11, b22, b12 = float(b_t[0, 0].real), float(b_t[1, 1].real), complex(b_t[0, 1])
    ratio_mu = mu1 / mu2
    root = np.sqrt(ratio_mu)

    best_v, best_z = -np.inf, 1.0
    for z in (1.0, -1.0):
        num = a11 + ratio_mu * a22 + 2.0 * root * abs(a12) * z
        den = b11 + ratio_mu * b22 + 2.0 * root * abs(b12) * z
        if den <= 0:
            continue
        v = num / den
        if v > best_v:
            best_v, best_z = v, z
    if not np.isfinite(best_v):
        return None

    phase = np.angle(a12) if best_z > 0 else np.angle(a12) + np.pi
    x = u @ np.array([np.exp(1j * phase), root])
    return best_v, x


def _value_at(lambda1_tilde, ch, config):
    out = solve_fixed_lambda(build_quad_ratio_instance(lambda1_tilde, ch, config))
    return (-np.inf, None) if out is None else out


def global_search_2x2(
    ch: ChannelSet, config: SystemConfig, grid_points: int = 1000
) -> Rank1Solution:
    """Globally solve the single-stream problem for n_t = n_r = 2.

    Grids lambda1_tilde over [lambda_min, lambda_max] of H_RD^H H_RD (the
    closed interval where a3 fails to be positive definite), evaluates the
    closed-form v at each point, then golden-section refines around the
    three best grid points.
    """
    if ch.h_rr.shape != (2, 2):
        raise ValueError(f"global search requires n_t = n_r = 2, got h_rr {ch.h_rr.shape}")
    ch.check_dims(config)

    m_rd = ch.h_rd.conj().T @ ch.h_rd
    eigs = np.linalg.eigvalsh(m_rd)
    lo, hi = float(eigs[0]), float(eigs[-1])
    grid = np.linspace(lo, hi, grid_points)

    values = np.full(grid_points, -np.inf)
    candidates = [None] * grid_points
    for i, lt in enumerate(grid):
        v, x = _value_at(lt, ch, config)
        values[i] = v
        candidates[i] = x

    order = np.argsort(values)[::-1]
    best_v = values[order[0]]
    best_x = candidates[order[0]]

    # Golden-section refinement around the best three grid points.
    for idx in order[:3]:
        a = grid[max(idx - 1, 0)]
        b = grid[min(idx + 1, grid_points - 1)]
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        fc, xc = _value_at(c, ch, config)
        fd, xd = _value_at(d, ch, config)
        for _ in range(60):
            if fc >= fd:
                b, d, fd, xd = d, c, fc, xc
                c = b - _GOLDEN * (b - a)
                fc, xc = _value_at(c, ch, config)
            else:
                a, c, fc, xc = c, d, fd, xd
                d = a + _GOLDEN * (b - a)
                fd, xd = _value_at(d, ch, config)
            if b - a < 1e-12 * max(1.0, hi):
                break
        for f, x in ((fc, xc), (fd, xd)):
            if f > best_v and x is not None:
                best_v, best_x = f, x

    if best_x is None:
        raise RuntimeError("no admissible grid point found")
    return recover_solution(best_x, ch, config)
