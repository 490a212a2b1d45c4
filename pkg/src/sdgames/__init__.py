"""Reduction of primal-dual SDP pairs to zero-sum semidefinite Dantzig games."""

from .model import (
    DualPoint,
    PrimalPoint,
    ResidualReport,
    SdpPair,
    SymMat,
    frobenius_inner,
    is_psd,
    min_eigenvalue,
    residuals,
    verify_strongly_optimal,
)
from .blocks import Block, BlockStructure, diag_block, free_scalar, matrix_block, psd_block
from .solver import (
    SolveResult,
    SolverOptions,
    StandardSdp,
    solve,
    solve_with_certificate,
)
from .auxiliary import (
    AuxSolution,
    SolverFailure,
    build_dual_aux,
    build_primal_aux,
    solve_aux,
    verify_strict_dual_unbounded,
    verify_strict_primal_unbounded,
)
from .bounds import (
    BitsizeProfile,
    KktDimensions,
    LogBound,
    SolutionBoundM,
    aux_dimensions,
    certified_bound_M,
    eta1,
    eta_bar,
    input_bitsize,
    khachiyan_instance,
    kkt_dimensions,
    practical_bound_M,
    squared_height,
)
from .game import (
    GameSolution,
    Strategy1,
    Strategy2,
    best_response_value_p1,
    best_response_value_p2,
    game_sdp_player1,
    game_sdp_player2,
    payoff,
    response_matrix_K,
    response_matrix_L,
    solve_game,
    subgame_payoff,
)
from .reduction import (
    Outcome,
    PipelineConfig,
    aux_value_relation,
    recover_certificate,
    recover_optimal,
    run_pipeline,
)

__all__ = [
    "AuxSolution",
    "BitsizeProfile",
    "Block",
    "BlockStructure",
    "DualPoint",
    "GameSolution",
    "KktDimensions",
    "LogBound",
    "Outcome",
    "PipelineConfig",
    "PrimalPoint",
    "ResidualReport",
    "SdpPair",
    "SolutionBoundM",
    "SolveResult",
    "SolverFailure",
    "SolverOptions",
    "StandardSdp",
    "Strategy1",
    "Strategy2",
    "SymMat",
    "aux_dimensions",
    "aux_value_relation",
    "best_response_value_p1",
    "best_response_value_p2",
    "build_dual_aux",
    "build_primal_aux",
    "certified_bound_M",
    "diag_block",
    "eta1",
    "eta_bar",
    "free_scalar",
    "frobenius_inner",
    "game_sdp_player1",
    "game_sdp_player2",
    "input_bitsize",
    "is_psd",
    "khachiyan_instance",
    "kkt_dimensions",
    "matrix_block",
    "min_eigenvalue",
    "payoff",
    "practical_bound_M",
    "psd_block",
    "recover_certificate",
    "recover_optimal",
    "residuals",
    "response_matrix_K",
    "response_matrix_L",
    "run_pipeline",
    "solve",
    "solve_aux",
    "solve_game",
    "solve_with_certificate",
    "squared_height",
    "subgame_payoff",
    "verify_strict_dual_unbounded",
    "verify_strict_primal_unbounded",
    "verify_strongly_optimal",
]
