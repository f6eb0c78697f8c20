"""Generic penalty + block-successive-minimization engine.

Solves min f(x) s.t. h(x) = 0, x in X by driving a geometric sequence of
penalized problems

    min_x f(x) + (rho/2) ||h(x)||^2,  x in X,

each handled by whatever block-update cycle the problem instance supplies.
The inner loop stops on relative merit progress; the outer loop stops when
the equality residual is small in the entrywise infinity norm.
"""

import abc
from dataclasses import dataclass, field

import numpy as np

from .exceptions import MonotonicityError


@dataclass(frozen=True)
class PenaltySchedule:
    """Outer-loop schedule: rho_k = rho0 * growth^k, eps_k = eps0 / growth^k."""

    rho0: float = 1e-3
    growth: float = 2.0
    eps0: float = 1e-3
    eps_outer: float = 1e-6
    max_outer: int = 60
    max_inner: int = 1000

    def __post_init__(self):
        if self.growth <= 1.0:
            raise ValueError(f"growth must be > 1, got {self.growth}")
        for name in ("rho0", "eps0", "eps_outer"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration caps must be >= 1")


class BlockProblem(abc.ABC):
    """Contract a problem must fulfil to be driven by :func:`pbsum_solve`.

    ``inner_cycle`` runs one full cycle of block updates for fixed rho and
    must not increase f(x) + (rho/2)||h(x)||^2 (each block minimizes a
    locally tight upper bound).
    """

    @abc.abstractmethod
    def initial_state(self):
        """A state inside the feasible set X."""

    @abc.abstractmethod
    def inner_cycle(self, state, rho: float):
        """One full block-update cycle at penalty rho; returns the new state."""

    @abc.abstractmethod
    def residual_blocks(self, state) -> list:
        """The pieces of h(x) as arrays; empty list means h is identically 0."""

    @abc.abstractmethod
    def objective(self, state) -> float:
        """f(x)."""

    def projected_gradient_residual(self, state, rho: float) -> float | None:
        """||P_X{x - grad f_rho(x)} - x||, when the problem supplies a projector."""
        return None

    def penalty_norm2(self, state) -> float:
        """||h(x)||^2; instances may override with a cheaper direct computation."""
        return sum(float(np.vdot(b, b).real) for b in self.residual_blocks(state))

    def state_to_vec(self, state) -> np.ndarray | None:
        """Flatten the primal blocks to a real vector, or None if unsupported.

        Supplying this (and ``vec_to_state``) lets the solver accelerate the
        inner loop with safeguarded Anderson mixing.
        """
        return None

    def vec_to_state(self, vec: np.ndarray, template, rho: float):
        """Rebuild a *feasible* state from a flattened vector (projecting back
        onto X where needed)."""
        raise NotImplementedError

    def feasible_proposals(self, state, rho: float) -> list:
        """Optional candidate states (e.g. structured exactly-feasible points).

        Candidates are only adopted when they improve the penalized merit,
        so anything goes here.
        """
        return []


def merit(problem: BlockProblem, state, rho: float) -> float:
    """f_rho(x) = f(x) + (rho/2) ||h(x)||^2."""
    return problem.objective(state) + 0.5 * rho * problem.penalty_norm2(state)


def residual_inf(problem: BlockProblem, state) -> float:
    """Entrywise infinity norm of h(x), real and imaginary parts stacked."""
    worst = 0.0
    for b in problem.residual_blocks(state):
        b = np.asarray(b)
        if b.size == 0:
            continue
        worst = max(worst, float(np.max(np.abs(b.real))), float(np.max(np.abs(b.imag))))
    return worst


@dataclass
class SolveTrace:
    """Per-iteration diagnostics of one P-BSUM run."""

    merit_per_outer: list = field(default_factory=list)   # list of per-cycle merit lists
    rho_per_outer: list = field(default_factory=list)
    residual_per_outer: list = field(default_factory=list)
    inner_counts: list = field(default_factory=list)
    pg_residual_per_outer: list = field(default_factory=list)
    termination: str = "unset"

    @property
    def total_inner(self) -> int:
        return int(sum(self.inner_counts))

    @property
    def final_residual(self) -> float:
        return self.residual_per_outer[-1] if self.residual_per_outer else np.nan

    @property
    def converged(self) -> bool:
        return self.termination == "residual"


class _AndersonMixer:
    """Safeguarded Anderson acceleration of a fixed-point map.

    Keeps a rolling window of residual/image differences and proposes the
    least-squares residual combination; the caller only accepts a proposal
    when it improves the merit, so acceleration never weakens the descent
    contract of the plain cycle.
    """

    def __init__(self, depth: int = 16):
        self.depth = depth
        self._df = None  # (size, depth) residual differences, rolling
        self._dg = None
        self._count = 0
        self._prev_f = None
        self._prev_g = None

    def reset(self) -> None:
        self._count = 0
        self._prev_f = None
        self._prev_g = None

    def push_and_propose(self, x: np.ndarray, g: np.ndarray) -> np.ndarray | None:
        f = g - x
        if self._df is None or self._df.shape[0] != f.shape[0]:
            self._df = np.empty((f.shape[0], self.depth))
            self._dg = np.empty((f.shape[0], self.depth))
        if self._prev_f is not None:
            col = self._count % self.depth
            self._df[:, col] = f - self._prev_f
            self._dg[:, col] = g - self._prev_g
            self._count += 1
        self._prev_f = f
        self._prev_g = g
        m = min(self._count, self.depth)
        if m < 1:
            return None
        df = self._df[:, :m]
        dg = self._dg[:, :m]
        # Tikhonov-regularized normal equations keep collinear histories tame.
        a = df.T @ df
        a[np.diag_indices_from(a)] += 1e-10 * max(float(np.trace(a)) / m, 1e-300)
        try:
            gamma = np.linalg.solve(a, df.T @ f)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(gamma)):
            return None
        return g - dg @ gamma


def pbsum_solve(
    problem: BlockProblem,
    sched: PenaltySchedule | None = None,
    monotone_slack: float = 1e-9,
    accelerate: bool = True,
):
    """Run the outer penalty loop; returns (final state, SolveTrace).

    The inner loop stops when the relative merit progress over one cycle
    drops to eps_k, or at ``max_inner`` cycles.  A merit increase beyond
    ``monotone_slack`` is a contract violation and raises.  When the
    problem exposes state flattening, inner cycles are Anderson-mixed with
    a merit safeguard (a proposal is taken only if it beats the plain
    cycle's merit).
    """
    sched = sched or PenaltySchedule()
    state = problem.initial_state()
    rho = sched.rho0
    eps_k = sched.eps0
    trace = SolveTrace(termination="max_outer")
    use_aa = accelerate and problem.state_to_vec(state) is not None
    mixer = _AndersonMixer() if use_aa else None

    def best_proposal(cur_state, cur_merit, rho_now):
        for cand in problem.feasible_proposals(cur_state, rho_now):
            f_cand = merit(problem, cand, rho_now)
            if np.isfinite(f_cand) and f_cand < cur_merit:
                cur_state, cur_merit = cand, f_cand
        return cur_state, cur_merit

    prev_end_vec = None
    for k in range(sched.max_outer):
        if use_aa:
            # Warm start: the penalized solutions drift like rho^(-1/2), so a
            # secant step along the last outer displacement predicts the next
            # one; keep it only if it improves the merit at the new rho.
            cur_vec = problem.state_to_vec(state)
            if prev_end_vec is not None:
                theta = 1.0 / np.sqrt(sched.growth)
                warm = problem.vec_to_state(
                    cur_vec + theta * (cur_vec - prev_end_vec), state, rho
                )
                if merit(problem, warm, rho) < merit(problem, state, rho):
                    state = warm
            prev_end_vec = cur_vec
        state, _ = best_proposal(state, merit(problem, state, rho), rho)

        f_prev = merit(problem, state, rho)
        cycle_merits = [f_prev]
        inner = 0
        # Progress below float64 resolution cannot satisfy eps_k; don't grind on it.
        eps_eff = max(eps_k, 3e-13)
        if mixer is not None:
            mixer.reset()
        for _ in range(sched.max_inner):
            next_state = problem.inner_cycle(state, rho)
            f_new = merit(problem, next_state, rho)
            if mixer is not None:
                x_vec = problem.state_to_vec(state)
                g_vec = problem.state_to_vec(next_state)
                prop = mixer.push_and_propose(x_vec, g_vec)
                if prop is not None and np.all(np.isfinite(prop)):
                    cand = problem.vec_to_state(prop, next_state, rho)
                    f_cand = merit(problem, cand, rho)
                    if np.isfinite(f_cand) and f_cand < f_new:
                        next_state, f_new = cand, f_cand
            state = next_state
            inner += 1
            cycle_merits.append(f_new)
            if f_new > f_prev + monotone_slack:
                raise MonotonicityError(
                    f"inner cycle increased the merit at outer step {k}, cycle {inner}: "
                    f"{f_prev:.12e} -> {f_new:.12e}"
                )
            if inner % 32 == 0:
                state, f_new = best_proposal(state, f_new, rho)
            rel = abs(f_new - f_prev) / max(abs(f_prev), 1e-300)
            f_prev = f_new
            if rel <= eps_eff:
                break
            # The infinity-norm check is off the merit path; probe it sparsely.
            if inner % 8 == 0 and residual_inf(problem, state) <= sched.eps_outer:
                break
        resid = residual_inf(problem, state)
        trace.merit_per_outer.append(cycle_merits)
        trace.rho_per_outer.append(rho)
        trace.residual_per_outer.append(resid)
        trace.inner_counts.append(inner)
        trace.pg_residual_per_outer.append(problem.projected_gradient_residual(state, rho))
        if resid <= sched.eps_outer:
            trace.termination = "residual"
            break
        rho *= sched.growth
        eps_k /= sched.growth

    return state, trace
