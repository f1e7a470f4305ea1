"""Chain transitivity and omega-limit realization for finite and grid dynamical systems."""
from .chains import (
    Chain,
    ChainGraph,
    build_chain_graph,
    chain_components,
    find_chain,
    is_chain_transitive,
    is_eps_chain,
    is_U_chain,
)
from .core import (
    Ball,
    FiniteSystem,
    GridSystem,
    Meet,
    OuterSet,
    PointSet,
    SftSystem,
    enumerate_basis,
    load_system,
    validate_system,
)
from .covers import NiceCover, common_refinement, isolate_point, make_ball_cover, refines, star_refine
from .kernels import BACKEND
from .omega import OmegaSet, hausdorff_distance, omega_limit_exact, omega_tail_approx, verify_realization
from .realization import (
    CoverSchedule,
    RealizedSystem,
    SymbolicOrbit,
    assemble_realization,
    build_orbit,
    complete_to_bijection,
    extend_by_loop,
    plan_tasks,
    realize,
    realize_sft,
)

__version__ = "0.1.0"
