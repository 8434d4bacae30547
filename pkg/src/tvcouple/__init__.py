"""Shared-randomness couplings of finite distributions with ``P(X != Y) <= 2x/(1+x)``."""

__version__ = "0.1.0"

from .dist import CdfSpec, DiscreteDistribution, Family, discretize, discretized_tv, overlap_sums, tv_distance
from .errors import (
    DomainError,
    EmptyUniverse,
    ExhaustedStream,
    GridOverflow,
    InvalidAssignment,
    InvalidCdf,
    ShapeError,
    SolverStall,
    TooLarge,
    TvCoupleError,
    UniverseMismatch,
    UnknownMember,
)
from .randomness import ClockTable, PoissonStream, clocks_for
from .couplings import SampleVector, sample, sample_indices
from .exact import (
    agreement,
    big_f,
    coupling_i_agreement,
    coupling_ii_agreement,
    dominance_check,
    ktuple_agreement_lower,
    ktuple_bound,
    tightness_condition,
    tuple_agreement,
)
from .mc import McEstimate, mc_estimate
from .lp import JointDistribution, LpReport, min_sum_disagreement, minimax_disagreement, optimal_pair_coupling
