"""
Analytic nonlocality and nonbilocality criteria for X and T states.

Covers the T-state locality/nonbilocality conditions, Werner visibility
trade-offs, steering, local filtering and hidden nonlocality, the
epsilon/delta/xi form of the bilocal inequality, the sufficient conditions
on T-state pairs, alpha-state pairs and the entanglement-necessity property.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from bilocal.exceptions import DegenerateBranchError, DomainViolationError
from bilocal.linalg import kron
from bilocal.network import analytic_bound_b1, bilocal_verdict, BilocalVerdict, swap
from bilocal.states import (
    LocalityVars, TParams, XParams, chsh_report, compare_to_threshold, concurrence_t,
    horodecki_m, locality_vars, sample_t_params, t_to_x, x_state_matrix,
)
from config import (
    DEGENERATE_TOL, HIDDEN_FILTER_EPS, MONTE_CARLO_CHUNK, MONTE_CARLO_SEED, PARAM_TOL,
    RADICAND_TOL, V_BILOC, V_LOC, VERDICT_TOL,
)

logger = logging.getLogger(__name__)

SQRT2 = math.sqrt(2)


@dataclass(frozen=True)
class CriterionValue:
    """A criterion's real value, its boolean outcome and whether a radicand was clamped."""
    value: float
    flag: bool
    clamped: bool = False


# ---------------------------------------------------------------------------
# T-state pairs
# ---------------------------------------------------------------------------

def t_local_condition(t1: TParams, t2: TParams) -> CriterionValue:
    """
    Network-locality test on the Alice-Charlie correlations of two T states.

    value = max over i != j of sqrt(c_i1² c_i2² + c_j1² c_j2²); flag = value <= 1.
    """
    products = [(a * b) ** 2 for a, b in zip(t1.as_tuple(), t2.as_tuple())]
    value = max(math.sqrt(products[i] + products[j])
                for i in range(3) for j in range(3) if i != j)
    return CriterionValue(value, compare_to_threshold(value) <= 0)


def t_nonbilocal_condition(t1: TParams, t2: TParams) -> CriterionValue:
    """
    Sufficient nonbilocality test for two T states.

    value = sqrt(|c11 c12| + c31 c32), reported as 0 (clamped) when the
    radicand is negative; flag = value > 1.
    """
    radicand = abs(t1.c1 * t2.c1) + t1.c3 * t2.c3
    if radicand < -RADICAND_TOL:
        return CriterionValue(0.0, False, True)
    value = math.sqrt(max(radicand, 0.0))
    return CriterionValue(value, compare_to_threshold(value) > 0, radicand < 0)


def conditional_chsh(x1: XParams, x2: XParams) -> List[Dict[str, Any]]:
    """
    Horodecki value of the Alice-Charlie state left by each swap branch.

    Returns:
        One dict per label with 'label', 'probability' and 'm' (None for null branches)
    """
    rows = []
    for outcome in swap(x1, x2):
        m = None if outcome.is_null else horodecki_m(outcome.conditional_state)
        rows.append({"label": outcome.label, "probability": outcome.probability, "m": m})
    return rows


# ---------------------------------------------------------------------------
# Werner visibilities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VisibilityReport:
    """Trade-off between the visibilities of two Werner copies."""
    alpha1: float
    alpha2: float
    tradeoff: float
    nonbilocal: bool
    both_nonlocal: bool
    product: float
    v_biloc: float = V_BILOC
    v_loc: float = V_LOC


def visibility_analysis(phi1: float, phi2: float, both_nonlocal: bool = False) -> VisibilityReport:
    """
    Visibility trade-off for a Werner pair around the local threshold 1/sqrt(2).

    Local + nonlocal copy: alpha1 = 1/sqrt2 - phi1, alpha2 = 1/sqrt2 + phi2,
    nonbilocal iff phi1 - phi2 + sqrt2 phi1 phi2 < 0.
    Both nonlocal: alpha_i = 1/sqrt2 + phi_i, nonbilocal iff
    phi1 + phi2 + sqrt2 phi1 phi2 > 0.

    Raises:
        DomainViolationError: If a visibility falls outside [0, 1]
    """
    if both_nonlocal:
        alpha1 = V_LOC + phi1
        tradeoff = phi1 + phi2 + SQRT2 * phi1 * phi2
        nonbilocal = tradeoff > 0
    else:
        alpha1 = V_LOC - phi1
        tradeoff = phi1 - phi2 + SQRT2 * phi1 * phi2
        nonbilocal = tradeoff < 0
    alpha2 = V_LOC + phi2
    for name, alpha in (("α1", alpha1), ("α2", alpha2)):
        if not -PARAM_TOL <= alpha <= 1 + PARAM_TOL:
            raise DomainViolationError(f"0≤{name}≤1 violated ({alpha:.12g})")
    return VisibilityReport(alpha1, alpha2, tradeoff, nonbilocal, both_nonlocal, alpha1 * alpha2)


# ---------------------------------------------------------------------------
# Steering
# ---------------------------------------------------------------------------

class SteeringVerdict(str, Enum):
    GUARANTEED = "steerable-guaranteed"
    NOT_GUARANTEED = "not-guaranteed"


def _steering_verdict(r: Tuple[float, float, float]) -> SteeringVerdict:
    if max(abs(v) for v in r) < (2 / 3) * sum(v * v for v in r):
        return SteeringVerdict.GUARANTEED
    return SteeringVerdict.NOT_GUARANTEED


@dataclass(frozen=True)
class SteeringReport:
    """Steering before and after swapping two identical copies, against nonbilocality."""
    x: XParams
    r: Tuple[float, float, float]
    r_post: Tuple[float, float, float]
    w: float
    pre_verdict: SteeringVerdict
    post_verdict: SteeringVerdict
    st12_value: float
    nonbilocal: bool
    identical_copy_b1: float


def steering_report(x: XParams) -> SteeringReport:
    """
    Linear steering test for one X state and for the state two identical
    copies leave between Alice and Charlie on Bob's |psi+> outcome.

    Raises:
        DegenerateBranchError: If W = (kappa+zeta) + 2(varsigma d - kappa zeta) vanishes
    """
    r1 = 2 * (x.p + x.q)
    r2 = 2 * (x.p - x.q)
    r3 = x.t_zz
    w = (x.kappa + x.zeta) + 2 * (x.varsigma * x.d - x.kappa * x.zeta)
    if w <= DEGENERATE_TOL:
        raise DegenerateBranchError(f"W={w:.3e}: the |psi+> branch is degenerate")

    r_post = (2 * (x.p + x.q) ** 2 / w,
              2 * (x.p - x.q) ** 2 / w,
              ((x.kappa + x.zeta) * r3 + 2 * (x.kappa * x.zeta - x.varsigma * x.d)) / w)
    st12 = math.sqrt(4 * r1 * r1 + r3 * r3)
    return SteeringReport(
        x=x,
        r=(r1, r2, r3),
        r_post=r_post,
        w=w,
        pre_verdict=_steering_verdict((r1, r2, r3)),
        post_verdict=_steering_verdict(r_post),
        st12_value=st12,
        nonbilocal=compare_to_threshold(st12) > 0,
        identical_copy_b1=math.sqrt(r1 * r1 + r3 * r3),
    )


# ---------------------------------------------------------------------------
# Filtering and hidden nonlocality
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FilterParams:
    """Local filters F_A = diag(lambda1, 1), F_B = diag(lambda2, 1)."""
    lambda1: float
    lambda2: float

    def normalization(self, x: XParams) -> float:
        """N1 = varsigma l1² l2² + kappa l1² + zeta l2² + d."""
        l1, l2 = self.lambda1, self.lambda2
        return x.varsigma * l1 * l1 * l2 * l2 + x.kappa * l1 * l1 + x.zeta * l2 * l2 + x.d

    def operators(self) -> Tuple[np.ndarray, np.ndarray]:
        return (np.diag([self.lambda1, 1.0]).astype(complex),
                np.diag([self.lambda2, 1.0]).astype(complex))


def _check_filter(f: FilterParams) -> None:
    for name, value in (("λ1", f.lambda1), ("λ2", f.lambda2)):
        if not 0 < value <= 1 + PARAM_TOL:
            raise DomainViolationError(f"0<{name}≤1 violated ({value:.12g})")


def filter_state(x: XParams, f: FilterParams) -> XParams:
    """
    Apply the local filters and renormalize.

    Raises:
        DomainViolationError: If a filter attenuation is outside (0, 1]
        DegenerateBranchError: If N1 vanishes
    """
    _check_filter(f)
    n1 = f.normalization(x)
    if n1 <= DEGENERATE_TOL:
        raise DegenerateBranchError(f"N1={n1:.3e}: filtered state is not normalizable")
    l1, l2 = f.lambda1, f.lambda2
    return XParams(
        x.varsigma * l1 * l1 * l2 * l2 / n1,
        x.kappa * l1 * l1 / n1,
        x.zeta * l2 * l2 / n1,
        x.d / n1,
        x.p * l1 * l2 / n1,
        x.q * l1 * l2 / n1,
    )


def filter_state_matrix(rho: np.ndarray, f: FilterParams) -> np.ndarray:
    """Filtered density matrix (F_A (x) F_B) rho (F_A (x) F_B)^dagger / N."""
    _check_filter(f)
    fa, fb = f.operators()
    op = kron(fa, fb)
    out = op @ rho @ op.conj().T
    norm = float(np.real(np.trace(out)))
    if norm <= DEGENERATE_TOL:
        raise DegenerateBranchError(f"N={norm:.3e}: filtered state is not normalizable")
    return out / norm


@dataclass(frozen=True)
class FilteredChshReport:
    """Ground-truth filtered CHSH value next to the tabulated branch formulas."""
    filtered: XParams
    ground_truth: float
    table_first: float
    horodecki_first: float
    table_second_pos: float
    table_second_neg: float
    pq_sign: str
    table_value: float


def filtered_chsh_bound(x: XParams, f: FilterParams) -> FilteredChshReport:
    """
    Maximal CHSH value of the filtered state.

    The ground truth is 2M of the filtered state. The tabulated branch values
    are evaluated alongside: first entry 8 sqrt(2(p²+q²)) l1 l2 / N1 (twice the
    Horodecki value 4 sqrt(2(p²+q²)) l1 l2 / N1, reported as horodecki_first) and
    second entries 2 sqrt(4(p ± q)² (l1 l2)² + (d - zeta l2² - kappa l1² + varsigma (l1 l2)²)²) / N1.
    """
    filtered = filter_state(x, f)
    ground_truth = 2 * horodecki_m(x_state_matrix(filtered))

    l1, l2 = f.lambda1, f.lambda2
    n1 = f.normalization(x)
    ll = l1 * l2
    coherence = math.sqrt(2 * (x.p ** 2 + x.q ** 2) * ll * ll)
    table_first = 8 * coherence / n1
    zz = x.d - x.zeta * l2 * l2 - x.kappa * l1 * l1 + x.varsigma * ll * ll
    second_pos = 2 * math.sqrt(4 * (x.p + x.q) ** 2 * ll * ll + zz * zz) / n1
    second_neg = 2 * math.sqrt(4 * (x.p - x.q) ** 2 * ll * ll + zz * zz) / n1

    pq = x.p * x.q
    if pq > 0:
        pq_sign, second = "pq>0", second_pos
    elif pq < 0:
        pq_sign, second = "pq<0", second_neg
    else:
        pq_sign, second = "pq=0", max(second_pos, second_neg)

    return FilteredChshReport(
        filtered=filtered,
        ground_truth=ground_truth,
        table_first=table_first,
        horodecki_first=table_first / 2,
        table_second_pos=second_pos,
        table_second_neg=second_neg,
        pq_sign=pq_sign,
        table_value=max(table_first, second),
    )


def hidden_nonlocality_state(alpha: float) -> XParams:
    """
    X state ((1-alpha)/2, 1/2, alpha/2, 0, 0, -alpha/2).

    Horodecki-local for alpha <= 1/sqrt(2); reveals nonlocality under filtering
    for every alpha > 0.

    Raises:
        DomainViolationError: If alpha is outside [0, 1]
    """
    if not -PARAM_TOL <= alpha <= 1 + PARAM_TOL:
        raise DomainViolationError(f"0≤α≤1 violated ({alpha:.12g})")
    return XParams((1 - alpha) / 2, 0.5, alpha / 2, 0.0, 0.0, -alpha / 2)


def hidden_filter(alpha: float, eps: float = HIDDEN_FILTER_EPS) -> FilterParams:
    """Filter pair lambda1 = eps, lambda2 = eps / sqrt(alpha)."""
    if alpha <= 0:
        raise DomainViolationError(f"α>0 required for the hidden-nonlocality filter ({alpha})")
    return FilterParams(eps, eps / math.sqrt(alpha))


def hidden_limit_state(alpha: float) -> XParams:
    """Exact eps -> 0 limit (0, 1/2, 1/2, 0, 0, -sqrt(alpha)/2) of the filtered state."""
    hidden_nonlocality_state(alpha)
    return XParams(0.0, 0.5, 0.5, 0.0, 0.0, -math.sqrt(alpha) / 2)


@dataclass(frozen=True)
class HiddenNetworkReport:
    """A filter-activated copy paired with a nonlocal copy in the network."""
    alpha1: float
    alpha2: float
    projective_local_model: bool
    copy1_chsh: Dict[str, Any]
    copy2_chsh: Dict[str, Any]
    filtered_chsh: float
    limit_chsh: float
    network_b1: float
    verdict: BilocalVerdict


def hidden_network_report(alpha1: float, alpha2: float,
                          eps: float = HIDDEN_FILTER_EPS) -> HiddenNetworkReport:
    """
    Compare filtering of copy 1 alone with using it in the network next to copy 2.

    The network bound for two such copies is sqrt(2 alpha1 alpha2).
    """
    x1 = hidden_nonlocality_state(alpha1)
    x2 = hidden_nonlocality_state(alpha2)
    filtered = filtered_chsh_bound(x1, hidden_filter(alpha1, eps)).ground_truth
    limit = 2 * horodecki_m(x_state_matrix(hidden_limit_state(alpha1)))
    bound = analytic_bound_b1(x1, x2).value
    return HiddenNetworkReport(
        alpha1=alpha1,
        alpha2=alpha2,
        projective_local_model=alpha1 <= 0.5,
        copy1_chsh=chsh_report(x_state_matrix(x1)),
        copy2_chsh=chsh_report(x_state_matrix(x2)),
        filtered_chsh=filtered,
        limit_chsh=limit,
        network_b1=bound,
        verdict=bilocal_verdict(bound),
    )


# ---------------------------------------------------------------------------
# epsilon / delta / xi form
# ---------------------------------------------------------------------------

def edx_inequality(v1: LocalityVars, v2: LocalityVars) -> CriterionValue:
    """
    Bilocal inequality in locality variables.

    value = sqrt( sqrt(prod(1 - delta + eps - xi)) + sqrt(prod(1 - delta - eps + xi)) );
    flag (violation) = value > sqrt(2).

    Raises:
        DomainViolationError: If 1 - delta < |xi - eps| for either copy
    """
    plus = 1.0
    minus = 1.0
    for n, v in enumerate((v1, v2), start=1):
        if 1 - v.delta < abs(v.xi - v.epsilon) - RADICAND_TOL:
            raise DomainViolationError(f"copy {n}: 1−δ≥|ξ−ε| violated")
        plus *= max(1 - v.delta + v.epsilon - v.xi, 0.0)
        minus *= max(1 - v.delta - v.epsilon + v.xi, 0.0)
    value = math.sqrt(math.sqrt(plus) + math.sqrt(minus))
    return CriterionValue(value, compare_to_threshold(value, SQRT2) > 0)


@dataclass(frozen=True)
class MaximalPlaneReport:
    """Nonbilocality capability on the plane xi = epsilon."""
    delta1: float
    delta2: float
    product: float
    capable: bool
    boundary: bool
    delta2_bound: Optional[float]
    max_delta: float = 0.5
    both_positive_possible: bool = False


def maximal_plane_condition(delta1: float, delta2: float) -> MaximalPlaneReport:
    """
    On xi = epsilon the bilocal inequality can be violated only if
    (1 - delta1)(1 - delta2) > 1.

    delta2_bound is the value delta2 must stay below for the given delta1.
    """
    product = (1 - delta1) * (1 - delta2)
    cmp = compare_to_threshold(product)
    bound = None if abs(1 - delta1) < DEGENERATE_TOL else 1 - 1 / (1 - delta1)
    return MaximalPlaneReport(delta1, delta2, product, cmp > 0, cmp == 0, bound)


# ---------------------------------------------------------------------------
# Sufficient conditions on T-state pairs
# ---------------------------------------------------------------------------

def _same(a: float, b: float) -> bool:
    return a * b >= 0


def _opposite(a: float, b: float) -> bool:
    return a * b <= 0


def inequality_pair(t: TParams) -> int:
    """
    Sign-pattern class (1-4) of a T state.

    Zero components match either sign; classes are tried in order 1, 2, 3, 4.
    """
    c1, c2, c3 = t.as_tuple()
    plus, minus = c1 + c2, c1 - c2
    pos, neg = c3 >= 0, c3 <= 0
    same_pm = _same(plus, minus)
    if same_pm and ((_opposite(c2, c1) and pos) or (_same(c2, c1) and neg)):
        return 1
    if same_pm and ((_opposite(c2, c1) and neg) or (_same(c2, c1) and pos)):
        return 2
    if ((_same(minus, c1) and _opposite(plus, c1) and neg)
            or (_same(plus, c1) and _opposite(minus, c1) and pos)):
        return 3
    return 4


def _pair_inequalities(pair: int, f: float, g: float, h: float) -> Tuple[bool, bool]:
    """The a/b inequalities of a sign-pattern class in terms of F, G, H."""
    tol = VERDICT_TOL
    if pair == 1:
        return (f + g <= SQRT2 + h + tol, -tol <= f - g <= SQRT2 - h + tol)
    if pair == 2:
        return (-tol <= f - g <= SQRT2 + h + tol, f + g <= SQRT2 - h + tol)
    if pair == 3:
        return (-tol <= g - f <= SQRT2 + h + tol, f + g <= SQRT2 - h + tol)
    return (f + g <= SQRT2 + h + tol, -tol <= g - f <= SQRT2 - h + tol)


@dataclass(frozen=True)
class CopyConditions:
    """Per-copy part of the sufficiency report."""
    t: TParams
    vars: LocalityVars
    local: bool
    f: float
    g: float
    h: float
    condition_i: bool
    condition_ii: bool
    pattern: int
    condition_iii: bool
    pair: int
    pair_a: bool
    pair_b: bool


def _fgh_sqrt(radicand: float) -> float:
    if radicand < -RADICAND_TOL:
        return 0.0
    return math.sqrt(max(radicand, 0.0))


def copy_conditions(t: TParams) -> CopyConditions:
    """Conditions (i), (ii) and the sign-dispatched (iii) for one T state."""
    v = locality_vars(t_to_x(t))
    eps, delta, xi = v.epsilon, v.delta, v.xi
    f = _fgh_sqrt(1 - eps + xi - delta)
    g = _fgh_sqrt(1 - eps - xi + delta)
    h = _fgh_sqrt(1 + eps - xi - delta)

    pair = inequality_pair(t)
    pattern = {1: 1, 2: 2, 3: 2, 4: 3}[pair]
    if pattern == 1:
        cond_iii = f <= SQRT2 + abs(g - h) + VERDICT_TOL
    elif pattern == 2:
        cond_iii = f + g + h <= SQRT2 + VERDICT_TOL
    else:
        cond_iii = g <= SQRT2 + abs(f - h) + VERDICT_TOL
    pair_a, pair_b = _pair_inequalities(pair, f, g, h)

    return CopyConditions(
        t=t,
        vars=v,
        local=min(eps, delta, xi) >= -VERDICT_TOL,
        f=f, g=g, h=h,
        condition_i=1 - eps >= abs(xi - delta) - VERDICT_TOL,
        condition_ii=(delta - xi) ** 2 >= 0,
        pattern=pattern,
        condition_iii=cond_iii,
        pair=pair,
        pair_a=pair_a,
        pair_b=pair_b,
    )


def _upper_bound(delta: float) -> float:
    """(4 sqrt(2(1 - delta)) + 5(delta - 1)) / 2"""
    return (4 * math.sqrt(2 * max(1 - delta, 0.0)) + 5 * (delta - 1)) / 2


def _within(lo: float, x: float, hi: float) -> bool:
    return lo - VERDICT_TOL <= x <= hi + VERDICT_TOL


C_CONDITIONS: Dict[str, Callable[[float, float], bool]] = {
    "C1": lambda d, e: _within(0.0, d, e) and _within(d, e, _upper_bound(d)),
    "C2": lambda d, e: _within(0.0, e, d),
    "C3": lambda d, e: _within(d, e, _upper_bound(d)),
    "C4": lambda d, e: _within((d - 1) / 2, e, d),
    "C2*": lambda d, e: (d - 1) / 2 - VERDICT_TOL <= e < 0,
}


@dataclass
class SufficiencyReport:
    """Sufficient-condition analysis of a T-state pair."""
    copies: Tuple[CopyConditions, CopyConditions]
    scenario: str
    applicable: Dict[int, str] = field(default_factory=dict)
    c_results: Dict[str, bool] = field(default_factory=dict)
    edx: Optional[CriterionValue] = None
    verdict: bool = False


def _c_label(role: str, pair: int) -> Optional[str]:
    table = {
        ("local", 1): "C1", ("local", 4): "C2",
        ("nonlocal", 1): "C3", ("nonlocal", 4): "C4",
        ("modified", 1): "C1", ("modified", 4): "C2*",
    }
    return table.get((role, pair))


def sufficiency_report(t1: TParams, t2: TParams) -> SufficiencyReport:
    """
    Evaluate conditions (i)-(iii) per copy, pick the applicable C-conditions
    and combine them with the locality-variable inequality.

    Scenarios: 'both local', 'local-nonlocal' (copy 1 local), 'nonlocal-local',
    'both nonlocal, delta1 in [0,1/2)', 'both nonlocal, delta1<0', or
    'outside C-ranges' when the delta values fall outside the ranges the
    C-conditions cover.
    """
    copies = (copy_conditions(t1), copy_conditions(t2))
    report = SufficiencyReport(copies=copies, scenario="")
    roles: Dict[int, str] = {}
    d1, d2 = copies[0].vars.delta, copies[1].vars.delta

    if copies[0].local and copies[1].local:
        report.scenario = "both local"
    elif copies[0].local != copies[1].local:
        local_idx = 0 if copies[0].local else 1
        nonlocal_idx = 1 - local_idx
        report.scenario = "local-nonlocal" if local_idx == 0 else "nonlocal-local"
        dl, dn = copies[local_idx].vars.delta, copies[nonlocal_idx].vars.delta
        if 0 <= dl < 0.5 and -1 < dn < 0:
            roles = {local_idx: "local", nonlocal_idx: "nonlocal"}
        else:
            report.scenario += ", outside C-ranges"
    else:
        if 0 <= d1 < 0.5:
            report.scenario = "both nonlocal, delta1 in [0,1/2)"
            roles = {0: "modified", 1: "nonlocal"}
        elif d1 < 0:
            report.scenario = "both nonlocal, delta1<0"
            roles = {0: "nonlocal", 1: "nonlocal"}
        else:
            report.scenario = "both nonlocal, outside C-ranges"

    for idx, role in roles.items():
        label = _c_label(role, copies[idx].pair)
        if label is None:
            continue
        report.applicable[idx] = label
        v = copies[idx].vars
        report.c_results[f"{label}[copy{idx + 1}]"] = C_CONDITIONS[label](v.delta, v.epsilon)

    report.edx = edx_inequality(copies[0].vars, copies[1].vars)
    per_copy = all(c.condition_i and c.condition_ii and c.condition_iii for c in copies)
    report.verdict = per_copy and all(report.c_results.values()) and report.edx.flag
    logger.debug(f"sufficiency: scenario={report.scenario}, applicable={report.applicable}, "
                 f"verdict={report.verdict}")
    return report


# ---------------------------------------------------------------------------
# Alpha states
# ---------------------------------------------------------------------------

def alpha_nonbilocal(alpha1: float, alpha2: float) -> CriterionValue:
    """
    Nonbilocality test for two alpha states.

    value = sqrt((2a1 - 1)(2a2 - 1) + a1 a2) on the radicand clamped at 0.

    Raises:
        DomainViolationError: If a parameter is outside [0, 1]
    """
    for name, a in (("α'1", alpha1), ("α'2", alpha2)):
        if not -PARAM_TOL <= a <= 1 + PARAM_TOL:
            raise DomainViolationError(f"0≤{name}≤1 violated ({a:.12g})")
    radicand = (2 * alpha1 - 1) * (2 * alpha2 - 1) + alpha1 * alpha2
    value = math.sqrt(max(radicand, 0.0))
    return CriterionValue(value, compare_to_threshold(value) > 0, radicand < 0)


# ---------------------------------------------------------------------------
# Entanglement necessity and Monte-Carlo property runs
# ---------------------------------------------------------------------------

def entanglement_necessity_check(t1: TParams, t2: TParams) -> bool:
    """True unless the pair is flagged nonbilocal while a copy is separable."""
    if not t_nonbilocal_condition(t1, t2).flag:
        return True
    return concurrence_t(t1) > 0 and concurrence_t(t2) > 0


def _vector_concurrence(c: np.ndarray) -> np.ndarray:
    c1, c2, c3 = c[:, 0], c[:, 1], c[:, 2]
    return np.maximum.reduce([
        np.zeros(len(c)),
        (np.abs(c1 - c2) - np.abs(1 - c3)) / 2,
        (np.abs(c1 + c2) - np.abs(1 + c3)) / 2,
    ])


def _vector_r7(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    radicand = np.abs(a[:, 0] * b[:, 0]) + a[:, 2] * b[:, 2]
    return np.sqrt(np.maximum(radicand, 0.0))


def _necessity_chunk(args: Tuple[np.random.SeedSequence, int, bool]) -> Tuple[int, int]:
    seed, size, same_copy = args
    rng = np.random.default_rng(seed)
    a = sample_t_params(rng, size, separable=True)
    b = a if same_copy else sample_t_params(rng, size, separable=True)
    flagged = _vector_r7(a, b) > 1 + VERDICT_TOL
    entangled = (_vector_concurrence(a) > 0) & (_vector_concurrence(b) > 0)
    return int(flagged.sum()), int((flagged & ~entangled).sum())


def _run_chunks(worker: Callable, samples: int, seed: int, extra: Any,
                workers: Optional[int]) -> List[Tuple[int, int]]:
    n_chunks = max(1, math.ceil(samples / MONTE_CARLO_CHUNK))
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    sizes = [min(MONTE_CARLO_CHUNK, samples - k * MONTE_CARLO_CHUNK) for k in range(n_chunks)]
    tasks = [(child, size, extra) for child, size in zip(children, sizes)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            return list(executor.map(worker, tasks))
    return [worker(task) for task in tasks]


def necessity_monte_carlo(samples: int, seed: int = MONTE_CARLO_SEED, same_copy: bool = False,
                          workers: Optional[int] = None) -> Dict[str, int]:
    """
    Search random separable T-state pairs for nonbilocality flags.

    Returns:
        Dictionary with 'samples', 'flagged' and 'violations' (flagged with a separable copy)
    """
    results = _run_chunks(_necessity_chunk, samples, seed, same_copy, workers)
    flagged = sum(r[0] for r in results)
    violations = sum(r[1] for r in results)
    logger.info(f"Necessity run: {samples} samples, {flagged} flagged, {violations} violations")
    return {"samples": samples, "flagged": flagged, "violations": violations}


def sample_locality_vars(rng: np.random.Generator, size: int, mode: str) -> np.ndarray:
    """
    Draw consistent (epsilon, delta, xi) pairs for two copies.

    Modes: 'local' (all variables in [0, 1]) and 'mixed' (delta1 >= 1/2,
    delta2 < 0). Draws obeying 1 - delta >= |xi - eps| are kept.

    Returns:
        Array of shape (size, 2, 3) in (epsilon, delta, xi) order
    """
    if mode not in ("local", "mixed"):
        raise DomainViolationError(f"Unknown sampling mode '{mode}'")
    accepted: List[np.ndarray] = []
    count = 0
    while count < size:
        n = max(2 * (size - count), 16)
        draws = rng.uniform(-1.0, 1.0, size=(n, 2, 3))
        if mode == "local":
            draws = (draws + 1) / 2
        else:
            draws[:, 0, 1] = rng.uniform(0.5, 1.0, size=n)
            draws[:, 1, 1] = rng.uniform(-1.0, 0.0, size=n)
        eps, delta, xi = draws[..., 0], draws[..., 1], draws[..., 2]
        keep = np.all(1 - delta >= np.abs(xi - eps), axis=1)
        accepted.append(draws[keep])
        count += int(keep.sum())
    return np.concatenate(accepted)[:size]


def _vector_edx(v: np.ndarray) -> np.ndarray:
    eps, delta, xi = v[..., 0], v[..., 1], v[..., 2]
    plus = np.prod(np.maximum(1 - delta + eps - xi, 0.0), axis=1)
    minus = np.prod(np.maximum(1 - delta - eps + xi, 0.0), axis=1)
    return np.sqrt(np.sqrt(plus) + np.sqrt(minus))


def _no_go_chunk(args: Tuple[np.random.SeedSequence, int, str]) -> Tuple[int, int]:
    seed, size, mode = args
    v = sample_locality_vars(np.random.default_rng(seed), size, mode)
    violations = int((_vector_edx(v) > SQRT2 + VERDICT_TOL).sum())
    return size, violations


def no_go_monte_carlo(samples: int, mode: str, seed: int = MONTE_CARLO_SEED,
                      workers: Optional[int] = None) -> Dict[str, int]:
    """
    Search random locality variables for violations of the
    epsilon/delta/xi inequality in a regime where none can occur.

    Returns:
        Dictionary with 'samples' and 'violations'
    """
    results = _run_chunks(_no_go_chunk, samples, seed, mode, workers)
    violations = sum(r[1] for r in results)
    logger.info(f"No-go run ({mode}): {samples} samples, {violations} violations")
    return {"samples": samples, "violations": violations}
