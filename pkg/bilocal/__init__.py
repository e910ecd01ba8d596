"""
Nonlocality and nonbilocality analysis for entanglement-swapping networks of X states.
"""
from .exceptions import (
    BilocalError,
    MatrixError,
    StateValidationError,
    DomainViolationError,
    DegenerateBranchError,
    ScanConfigError,
    EmitError,
)
from .linalg import kron, partial_trace, hermitian_eigenvalues, sym3_eigenvalues, is_density_matrix
from .states import (
    XParams,
    TParams,
    LocalityVars,
    ChshVerdict,
    x_state_matrix,
    t_to_x,
    werner,
    alpha_state,
    alpha_state_t,
    validate_x_params,
    validate_t_params,
    correlation_tensor,
    horodecki_m,
    chsh_report,
    locality_vars,
    concurrence_t,
    concurrence_x_oracle,
)
from .network import (
    BilocalVerdict,
    MeasurementSettings,
    SwapOutcome,
    swap,
    tripartite_correlator,
    bilocal_ijb,
    closed_form_ij,
    analytic_bound_b1,
    maximize_b,
    principal_axis_start,
    compare_bilocal,
)
from .criteria import (
    t_local_condition,
    t_nonbilocal_condition,
    visibility_analysis,
    steering_report,
    filter_state,
    filtered_chsh_bound,
    hidden_nonlocality_state,
    hidden_network_report,
    edx_inequality,
    maximal_plane_condition,
    sufficiency_report,
    alpha_nonbilocal,
    entanglement_necessity_check,
)
from .scan import Axis, ScanConfig, run_scan, emit, figure_config, read_scan_config

__all__ = [
    'BilocalError',
    'MatrixError',
    'StateValidationError',
    'DomainViolationError',
    'DegenerateBranchError',
    'ScanConfigError',
    'EmitError',
    'kron',
    'partial_trace',
    'hermitian_eigenvalues',
    'sym3_eigenvalues',
    'is_density_matrix',
    'XParams',
    'TParams',
    'LocalityVars',
    'ChshVerdict',
    'x_state_matrix',
    't_to_x',
    'werner',
    'alpha_state',
    'alpha_state_t',
    'validate_x_params',
    'validate_t_params',
    'correlation_tensor',
    'horodecki_m',
    'chsh_report',
    'locality_vars',
    'concurrence_t',
    'concurrence_x_oracle',
    'BilocalVerdict',
    'MeasurementSettings',
    'SwapOutcome',
    'swap',
    'tripartite_correlator',
    'bilocal_ijb',
    'closed_form_ij',
    'analytic_bound_b1',
    'maximize_b',
    'principal_axis_start',
    'compare_bilocal',
    't_local_condition',
    't_nonbilocal_condition',
    'visibility_analysis',
    'steering_report',
    'filter_state',
    'filtered_chsh_bound',
    'hidden_nonlocality_state',
    'hidden_network_report',
    'edx_inequality',
    'maximal_plane_condition',
    'sufficiency_report',
    'alpha_nonbilocal',
    'entanglement_necessity_check',
    'Axis',
    'ScanConfig',
    'run_scan',
    'emit',
    'figure_config',
    'read_scan_config',
]
