"""Joint source-relay rate maximization for full-duplex MIMO AF relay links."""

from .channels import ChannelSet, generate_channels
from .config import SystemConfig, nats_to_bits
from .fdpbsum import (
    FdRelayProblem,
    FdSolveResult,
    PBsumState,
    init_state,
    solve_fd_pbsum,
    solve_upper_bound_no_si,
)
from .global2x2 import QuadRatioInstance, global_search_2x2
from .metrics import (
    FeasibilityReport,
    Precoders,
    feasibility_report,
    rate,
    rate_bits,
    relay_power,
    source_power,
)
from .pbsum import BlockProblem, PenaltySchedule, SolveTrace, pbsum_solve, residual_inf
from .rank1 import (
    GradientAscentOptions,
    Rank1Solution,
    gradient_ascent,
    lambda_max,
    lambda_max_gradient,
    projection_pi,
    rank1_objective,
    recover_solution,
    rzf,
    tzf,
)
from .seeding import mix_seed
from .simulate import LinkMeasurement, SignalFrame, simulate_link

__version__ = "0.1.0"

__all__ = [
    "BlockProblem",
    "ChannelSet",
    "FdRelayProblem",
    "FdSolveResult",
    "FeasibilityReport",
    "GradientAscentOptions",
    "LinkMeasurement",
    "PBsumState",
    "PenaltySchedule",
    "Precoders",
    "QuadRatioInstance",
    "Rank1Solution",
    "SignalFrame",
    "SolveTrace",
    "SystemConfig",
    "feasibility_report",
    "generate_channels",
    "global_search_2x2",
    "gradient_ascent",
    "init_state",
    "lambda_max",
    "lambda_max_gradient",
    "mix_seed",
    "nats_to_bits",
    "pbsum_solve",
    "projection_pi",
    "rank1_objective",
    "rate",
    "rate_bits",
    "recover_solution",
    "relay_power",
    "residual_inf",
    "rzf",
    "simulate_link",
    "solve_fd_pbsum",
    "solve_upper_bound_no_si",
    "source_power",
    "tzf",
]
