"""Piatetski-Shapiro sequences ``[n^c]``: certified floors, counts, coprimality and exponent algebra."""

from .analysis import (
    CSV_COLUMNS,
    ErrorCurve,
    SlopeFit,
    constant_fit,
    error_curve_ap,
    error_curve_dd,
    error_curve_pairs,
    fit_slope,
    geometric_grid,
    report_rows,
    rows_to_csv,
    rows_to_json,
)
from .coprime import (
    MobiusLedger,
    TupleSpec,
    build_ledger,
    classical_coprime_pairs,
    coprime_pair_counts,
    coprime_pairs_bruteforce,
    coprime_tuples_bruteforce,
    coprime_tuples_mobius,
    main_term,
    zeta,
    zeta_bounds,
)
from .errors import (
    BudgetExceeded,
    FactorizationFailed,
    PrecisionCapExceeded,
    SizeGuardExceeded,
    ToolkitError,
    UnboundedBelow,
)
from .exponent import (
    LogMonomial,
    OptProblem,
    OptResult,
    ap_block_problem,
    ap_exponent,
    best_k_for_modulus,
    choose_k_special,
    grid_search,
    optimize,
    pair_error_exponent,
)
from .expsum import (
    DyadicBlock,
    EtBoundInput,
    PhaseParams,
    derivative_constant,
    dyadic_blocks,
    et_sides,
    falling_product,
    vdc_bound,
    weyl_sum,
)
from .factor import FactorBudget, factorize
from .psseq import (
    ApErrorReport,
    ResidueProfile,
    ap_error_report,
    count_ap,
    dd_coprime_count,
    divisor_count,
    ps_sequence,
    residue_profile,
    tau_sum,
)
from .realpow import CertifiedFloor, OrderSpec, RealInterval, floor_pow, frac_part_scaled, verify_floor

__version__ = "0.1.0"
