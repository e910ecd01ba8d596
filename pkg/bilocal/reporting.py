"""
Plain-text report builders for the command line.
All reals are printed at REPORT_SIG_DIGITS significant digits.
"""
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

from bilocal.criteria import FilteredChshReport, SteeringReport
from bilocal.network import BilocalAssessment, BoundB1, SwapOutcome
from bilocal.states import LocalityVars, TParams, XParams, correlation_tensor
from config import REPORT_SIG_DIGITS


def format_real(value: Any) -> str:
    """Format a value for a report line."""
    if value is None:
        return "n/a"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, (int, float)):
        return f"{float(value):.{REPORT_SIG_DIGITS}g}"
    return str(value)


def format_params(x: XParams) -> str:
    return ", ".join(f"{name}={format_real(v)}" for name, v in x.as_dict().items())


def kv(key: str, value: Any) -> str:
    return f"{key}: {format_real(value)}"


def assess_lines(label: str, x: XParams, t: Optional[TParams], chsh: Dict[str, Any],
                 concurrence: float, vars: LocalityVars,
                 steering: Optional[SteeringReport], steering_error: Optional[str]) -> List[str]:
    """Report for a single state."""
    lines = [
        f"state: {label}",
        f"x_params: {format_params(x)}",
        kv("valid", True),
    ]
    if t is not None:
        lines.append(f"t_params: c1={format_real(t.c1)}, c2={format_real(t.c2)}, c3={format_real(t.c3)}")
    lines += [
        kv("horodecki_M", chsh["m"]),
        kv("chsh_max", chsh["chsh"]),
        kv("chsh_verdict", chsh["verdict"]),
        kv("concurrence", concurrence),
        kv("epsilon", vars.epsilon),
        kv("delta", vars.delta),
        kv("xi", vars.xi),
    ]
    if steering is None:
        lines.append(f"steering: {steering_error}")
        return lines
    r1, r2, r3 = steering.r
    p1, p2, p3 = steering.r_post
    lines += [
        f"steering_R: {format_real(r1)}, {format_real(r2)}, {format_real(r3)}",
        kv("steering_pre", steering.pre_verdict),
        f"steering_R_post: {format_real(p1)}, {format_real(p2)}, {format_real(p3)}",
        kv("steering_W", steering.w),
        kv("steering_post", steering.post_verdict),
        kv("identical_copies_st12", steering.st12_value),
        kv("identical_copies_nonbilocal", steering.nonbilocal),
        kv("identical_copies_B1", steering.identical_copy_b1),
    ]
    return lines


def _settings_line(assessment: BilocalAssessment) -> str:
    angles = assessment.settings.as_angles()
    names = ("theta_a0", "phi_a0", "theta_a1", "phi_a1",
             "theta_c0", "phi_c0", "theta_c1", "phi_c1")
    return "angles: " + ", ".join(f"{n}={format_real(a)}" for n, a in zip(names, angles))


def bilocal_lines(bound: Optional[BoundB1], numeric: Optional[BilocalAssessment],
                  gap: Optional[float], verdict: Any) -> List[str]:
    """Report for a pair of states."""
    lines: List[str] = []
    if bound is not None:
        lines.append(kv("B1", bound.value))
        lines.append(kv("B1_radicand", bound.radicand))
        if bound.negative_radicand:
            lines.append("B1_note: negative radicand, reported as 0")
    if numeric is not None:
        lines += [
            kv("numeric_B", numeric.b),
            kv("numeric_I", numeric.i),
            kv("numeric_J", numeric.j),
            _settings_line(numeric),
        ]
    if gap is not None:
        lines.append(kv("numeric_minus_analytic", gap))
    lines.append(kv("verdict", verdict))
    return lines


def swap_lines(outcomes: Sequence[SwapOutcome]) -> List[str]:
    """Report for the four swap branches."""
    names = {"00": "phi+", "01": "phi-", "10": "psi+", "11": "psi-"}
    lines = []
    for outcome in outcomes:
        head = f"branch {outcome.label} ({names[outcome.label]}): probability={format_real(outcome.probability)}"
        if outcome.is_null:
            lines.append(f"{head}, null branch")
            continue
        rho = outcome.conditional_state
        diag = [rho[k, k].real for k in range(4)]
        tensor = correlation_tensor(rho).diagonal()
        lines.append(
            f"{head}, varsigma={format_real(diag[0])}, kappa={format_real(diag[1])}, "
            f"zeta={format_real(diag[2])}, d={format_real(diag[3])}, "
            f"p={format_real(rho[0, 3].real)}, q={format_real(rho[1, 2].real)}, "
            f"t_diag=({', '.join(format_real(v) for v in tensor)})"
        )
    return lines


def filter_lines(report: FilteredChshReport, lambda1: float, lambda2: float) -> List[str]:
    """Report for a filtered state."""
    return [
        f"filters: lambda1={format_real(lambda1)}, lambda2={format_real(lambda2)}",
        f"filtered: {format_params(report.filtered)}",
        kv("chsh_bound", report.ground_truth),
        kv("table_first", report.table_first),
        kv("table_first_horodecki", report.horodecki_first),
        kv("table_second_pq_pos", report.table_second_pos),
        kv("table_second_pq_neg", report.table_second_neg),
        kv("table_row", report.pq_sign),
        kv("table_value", report.table_value),
    ]
