import numpy as np
import pytest

from fdrelay import PenaltySchedule, SystemConfig, generate_channels, pbsum_solve, residual_inf
from fdrelay.exceptions import MonotonicityError
from fdrelay.pbsum import BlockProblem, merit


class ToyEquality(BlockProblem):
    """min (x - 2)^2 s.t. x = 1, X = R; block minimizer in closed form."""

    def initial_state(self):
        return 5.0

    def inner_cycle(self, state, rho):
        return (4.0 + rho) / (2.0 + rho)

    def residual_blocks(self, state):
        return [np.array([state - 1.0])]

    def objective(self, state):
        return (state - 2.0) ** 2


class ToyUnconstrained(ToyEquality):
    def inner_cycle(self, state, rho):
        return 2.0

    def residual_blocks(self, state):
        return []


class ToyWithProjector(ToyEquality):
    def projected_gradient_residual(self, state, rho):
        grad = 2.0 * (state - 2.0) + rho * (state - 1.0)
        return abs(grad)  # X = R, projection is the identity


class Misbehaving(ToyEquality):
    def inner_cycle(self, state, rho):
        return state + 1.0  # moves away from the minimizer


def test_toy_problem_converges_to_constrained_solution():
    state, trace = pbsum_solve(ToyEquality(), PenaltySchedule())
    assert trace.termination == "residual"
    assert abs(state - 1.0) <= 1e-6
    assert trace.final_residual <= 1e-6
    for merits in trace.merit_per_outer:
        assert np.all(np.diff(merits) <= 1e-9)


def test_unconstrained_problem_single_outer():
    state, trace = pbsum_solve(ToyUnconstrained(), PenaltySchedule())
    assert state == 2.0
    assert len(trace.inner_counts) == 1
    assert trace.termination == "residual"


def test_rho_schedule_is_geometric():
    sched = PenaltySchedule(rho0=1e-3, growth=2.0)
    _, trace = pbsum_solve(ToyEquality(), sched)
    for k, rho in enumerate(trace.rho_per_outer):
        assert rho == pytest.approx(1e-3 * 2.0**k, rel=1e-12)


def test_projected_gradient_residual_logged():
    _, trace = pbsum_solve(ToyWithProjector(), PenaltySchedule())
    assert all(r is not None for r in trace.pg_residual_per_outer)
    assert trace.pg_residual_per_outer[-1] < 1.0
    _, trace2 = pbsum_solve(ToyEquality(), PenaltySchedule())
    assert all(r is None for r in trace2.pg_residual_per_outer)


def test_monotonicity_violation_raises():
    with pytest.raises(MonotonicityError, match="increased the merit"):
        pbsum_solve(Misbehaving(), PenaltySchedule())


def test_schedule_validation():
    with pytest.raises(ValueError):
        PenaltySchedule(growth=1.0)
    with pytest.raises(ValueError):
        PenaltySchedule(rho0=0.0)
    with pytest.raises(ValueError):
        PenaltySchedule(max_outer=0)


def test_residual_inf_trivial_cases():
    toy = ToyEquality()
    assert residual_inf(toy, 1.0) == 0.0
    assert residual_inf(toy, 1.3) == pytest.approx(0.3)
    assert residual_inf(ToyUnconstrained(), 2.0) == 0.0


def test_residual_inf_matches_per_block_recomputation():
    from fdrelay.fdpbsum import FdRelayProblem, _penalty_blocks

    cfg = SystemConfig(n_s=3, n_r=3, n_t=3, n_d=3, d=2)
    ch = generate_channels(cfg, 0)
    prob = FdRelayProblem(ch, cfg, seed=1)
    state = prob.initial_state()
    for _ in range(5):
        state = prob.inner_cycle(state, 0.01)
    got = residual_inf(prob, state)
    worst = 0.0
    for b in _penalty_blocks(state, ch, cfg):
        b = np.sqrt(2.0) * b
        worst = max(worst, float(np.max(np.abs(b.real))), float(np.max(np.abs(b.imag))))
    assert got == pytest.approx(worst, rel=1e-12)


def test_merit_definition():
    toy = ToyEquality()
    assert merit(toy, 3.0, 2.0) == pytest.approx((3 - 2) ** 2 + 0.5 * 2.0 * (3 - 1) ** 2)
