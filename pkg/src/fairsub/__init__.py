"""Group-fair non-monotone submodular maximization."""
from .fair import (
    FairSolveConfig,
    SolveReport,
    backup_fill,
    fair_card_high_alpha,
    fair_card_low_alpha,
    fair_high_alpha,
    fair_low_alpha,
    solve,
)
from .inner import SOLVERS, exact_solve, local_search_solve, random_greedy_solve
from .matroids import FairReductionMatroid, PartitionMatroid, check_matroid_axioms
from .model import (
    FairnessSpec,
    GroupBounds,
    InfeasibleSpecError,
    Instance,
    Solution,
    complement_oracle,
    feasibility_preconditions,
    flip_bounds,
    group_bounds,
    is_fair,
)
from .objectives import CutOracle, SubmodularOracle, TableOracle, make_random_cut_instance, validate_submodular

__all__ = [
    "CutOracle", "FairReductionMatroid", "FairSolveConfig", "FairnessSpec", "GroupBounds",
    "InfeasibleSpecError", "Instance", "PartitionMatroid", "SOLVERS", "Solution", "SolveReport",
    "SubmodularOracle", "TableOracle", "backup_fill", "check_matroid_axioms", "complement_oracle",
    "exact_solve", "fair_card_high_alpha", "fair_card_low_alpha", "fair_high_alpha", "fair_low_alpha",
    "feasibility_preconditions", "flip_bounds", "group_bounds", "is_fair", "local_search_solve",
    "make_random_cut_instance", "random_greedy_solve", "solve", "validate_submodular",
]
