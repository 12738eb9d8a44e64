"""Exact conditional expectation preserving systems on finite atomic Riesz spaces."""

__version__ = "0.1.0"

from .lattice import (  # noqa: E402
    AtomicMeasureSpace,
    BandProjection,
    CapExceeded,
    DimensionMismatch,
    Element,
    abs_parts,
    enumerate_band_projections,
    lattice_ops,
    multiply,
    project,
)
from .operators import (  # noqa: E402
    CEPSystem,
    CompositionOperator,
    CondExpectation,
    InvalidSystem,
    NotInRange,
    Partition,
    ValidationReport,
    apply_S,
    apply_T,
    averaging_identity_check,
    range_T_membership,
    validate_ceps,
)
from .ergodic import (  # noqa: E402
    NotConverged,
    cesaro_mean,
    cesaro_trace,
    cesaro_utilities,
    classify_projections,
    ergodic_average_exact,
    ergodic_average_iterative,
    ergodic_limit,
    invariant_space_basis,
    is_ergodic_definition,
    is_ergodic_operator_equality,
    is_ergodic_tsm,
    product_criterion,
)
from .mixing import (  # noqa: E402
    is_weakly_mixing,
    mixing_implies_ergodic_campaign,
    weak_mixing_fg,
    weak_mixing_term,
)
from .independence import (  # noqa: E402
    ClosedSubspace,
    generated_subspace,
    projections_independent,
    sequence_independence,
    slln_check,
    subspaces_independent,
)
