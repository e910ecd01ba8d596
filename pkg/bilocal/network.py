"""
Entanglement-swapping engine and bilocal quantities.

Qubit order is A, B1, B2, C: the first source feeds (A, B1), the second
(B2, C). Bob measures (B1, B2) in the Bell basis with outcome labels
00, 01, 10, 11 for |phi+>, |phi->, |psi+>, |psi->; b0 is the first bit.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from bilocal.linalg import IDENTITY_2, PAULIS, kron_all, partial_trace
from bilocal.states import XParams, compare_to_threshold, x_state_matrix
from config import (
    BRANCH_PROB_FLOOR, CANONICAL_PHIS, CANONICAL_THETA,
    COORDINATE_GRID_POINTS, GOLDEN_STEP, MAX_COORDINATE_SWEEPS, RADICAND_TOL,
    START_PHI_PATTERNS, START_THETAS, SWEEP_IMPROVEMENT_TOL,
)

logger = logging.getLogger(__name__)

BELL_LABELS = ("00", "01", "10", "11")
TWO_PI = 2 * math.pi
INV_PHI = (math.sqrt(5) - 1) / 2
INV_PHI_SQ = (3 - math.sqrt(5)) / 2

Angles = Tuple[float, float, float, float, float, float, float, float]


class BilocalVerdict(str, Enum):
    """Outcome of the bilocal inequality B <= 1."""
    SATISFIED = "bilocal-satisfied"
    NONBILOCAL = "nonbilocal"
    BOUNDARY = "boundary"


def bilocal_verdict(value: float) -> BilocalVerdict:
    cmp = compare_to_threshold(value)
    if cmp > 0:
        return BilocalVerdict.NONBILOCAL
    if cmp < 0:
        return BilocalVerdict.SATISFIED
    return BilocalVerdict.BOUNDARY


@dataclass(frozen=True)
class BlochSetting:
    """Projective qubit measurement along the unit vector (theta, phi)."""
    theta: float
    phi: float

    def vector(self) -> Tuple[float, float, float]:
        st = math.sin(self.theta)
        return (st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta))

    def observable(self) -> np.ndarray:
        nx, ny, nz = self.vector()
        return nx * PAULIS[0] + ny * PAULIS[1] + nz * PAULIS[2]


@dataclass(frozen=True)
class MeasurementSettings:
    """Two settings each for Alice and Charlie."""
    alice: Tuple[BlochSetting, BlochSetting]
    charlie: Tuple[BlochSetting, BlochSetting]

    def as_angles(self) -> Angles:
        a0, a1 = self.alice
        c0, c1 = self.charlie
        return (a0.theta, a0.phi, a1.theta, a1.phi, c0.theta, c0.phi, c1.theta, c1.phi)

    @classmethod
    def from_angles(cls, angles: Sequence[float]) -> "MeasurementSettings":
        a = [float(v) for v in angles]
        return cls((BlochSetting(a[0], a[1]), BlochSetting(a[2], a[3])),
                   (BlochSetting(a[4], a[5]), BlochSetting(a[6], a[7])))


def canonical_settings() -> MeasurementSettings:
    """All polar angles pi/4, azimuths 0 and pi for both parties."""
    phi0, phi1 = CANONICAL_PHIS
    t = CANONICAL_THETA
    return MeasurementSettings.from_angles((t, phi0, t, phi1, t, phi0, t, phi1))


@dataclass(frozen=True)
class SwapOutcome:
    """One Bell-measurement branch and the Alice-Charlie state it leaves."""
    label: str
    probability: float
    conditional_state: Optional[np.ndarray]

    @property
    def bits(self) -> Tuple[int, int]:
        return (int(self.label[0]), int(self.label[1]))

    @property
    def is_null(self) -> bool:
        return self.conditional_state is None


@dataclass(frozen=True)
class BoundB1:
    """Analytic bound sqrt(prod E_i + 4 |prod (p_i + q_i)|)."""
    value: float
    radicand: float
    negative_radicand: bool


@dataclass(frozen=True)
class BilocalAssessment:
    """Bilocal quantities at one measurement setting."""
    i: float
    j: float
    b: float
    analytic_bound: float
    settings: MeasurementSettings
    verdict: BilocalVerdict
    bound_negative_radicand: bool = False


def bell_projectors() -> Dict[str, np.ndarray]:
    """Projectors onto |phi+>, |phi->, |psi+>, |psi-> keyed by label 00, 01, 10, 11."""
    s = 1 / math.sqrt(2)
    vectors = {
        "00": np.array([s, 0, 0, s], dtype=complex),
        "01": np.array([s, 0, 0, -s], dtype=complex),
        "10": np.array([0, s, s, 0], dtype=complex),
        "11": np.array([0, s, -s, 0], dtype=complex),
    }
    return {label: np.outer(v, v.conj()) for label, v in vectors.items()}


def swap(x1: XParams, x2: XParams) -> List[SwapOutcome]:
    """
    Full Bell measurement on the middle qubits of chi1 (x) chi2.

    Args:
        x1: State shared by Alice and Bob
        x2: State shared by Bob and Charlie

    Returns:
        Four outcomes in label order; branches below BRANCH_PROB_FLOOR carry no state
    """
    joint = np.kron(x_state_matrix(x1), x_state_matrix(x2))
    outcomes: List[SwapOutcome] = []
    for label, proj in bell_projectors().items():
        full = kron_all(IDENTITY_2, proj, IDENTITY_2)
        projected = full @ joint @ full
        probability = float(np.real(np.trace(projected)))
        if probability < BRANCH_PROB_FLOOR:
            logger.warning(f"Swap branch {label} has probability {probability:.3e}; treated as null")
            outcomes.append(SwapOutcome(label, max(probability, 0.0), None))
            continue
        conditional = partial_trace(projected, (1, 2)) / probability
        outcomes.append(SwapOutcome(label, probability, conditional))
    logger.debug(f"Swap probabilities: {[round(o.probability, 12) for o in outcomes]}")
    return outcomes


def branch_tensors(outcomes: Sequence[SwapOutcome]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sign-weighted Alice-Charlie correlation tensors for Bob's two outputs.

    T_y[i, j] = sum_b (-1)^{b^y} prob(b) Tr[(sigma_i (x) sigma_j) rho_b], so that
    <A_x B^y C_z> = a_x^T T_y c_z. Null branches are skipped.
    """
    tensors = np.zeros((2, 3, 3))
    for outcome in outcomes:
        if outcome.is_null:
            continue
        weighted = outcome.probability * outcome.conditional_state
        for y in range(2):
            sign = -1.0 if outcome.bits[y] else 1.0
            for i, si in enumerate(PAULIS):
                for j, sj in enumerate(PAULIS):
                    value = np.real(np.trace(np.kron(si, sj) @ weighted))
                    tensors[y, i, j] += sign * value
    return tensors[0], tensors[1]


def tripartite_correlator(x1: XParams, x2: XParams,
                          settings: MeasurementSettings) -> np.ndarray:
    """
    Correlators <A_x B^y C_z> by the Born rule on the swap branches.

    Returns:
        Array indexed [x, y, z]
    """
    outcomes = swap(x1, x2)
    values = np.zeros((2, 2, 2))
    for outcome in outcomes:
        if outcome.is_null:
            continue
        for x, a in enumerate(settings.alice):
            for z, c in enumerate(settings.charlie):
                local = np.kron(a.observable(), c.observable())
                expectation = float(np.real(np.trace(local @ outcome.conditional_state)))
                for y in range(2):
                    sign = -1.0 if outcome.bits[y] else 1.0
                    values[x, y, z] += sign * outcome.probability * expectation
    return values


def analytic_bound_b1(x1: XParams, x2: XParams) -> BoundB1:
    """
    Closed-form maximum of B over projective settings for two X states.

    A negative radicand is reported as value 0 with the flag set.
    """
    radicand = x1.t_zz * x2.t_zz + 4 * abs((x1.p + x1.q) * (x2.p + x2.q))
    if radicand < -RADICAND_TOL:
        logger.warning(f"B1 radicand is negative ({radicand:.6g}); reporting 0")
        return BoundB1(0.0, radicand, True)
    return BoundB1(math.sqrt(max(radicand, 0.0)), radicand, False)


def _assessment(i: float, j: float, settings: MeasurementSettings,
                bound: BoundB1) -> BilocalAssessment:
    b = math.sqrt(abs(i)) + math.sqrt(abs(j))
    return BilocalAssessment(i, j, b, bound.value, settings, bilocal_verdict(b),
                             bound.negative_radicand)


def bilocal_ijb(x1: XParams, x2: XParams, settings: MeasurementSettings) -> BilocalAssessment:
    """
    I, J and B = sqrt|I| + sqrt|J| from the Born-rule correlators.

    I = 1/4 sum_{x,z} <A_x B^0 C_z>, J = 1/4 sum_{x,z} (-1)^{x+z} <A_x B^1 C_z>.
    """
    corr = tripartite_correlator(x1, x2, settings)
    i = 0.25 * float(np.sum(corr[:, 0, :]))
    j = 0.25 * sum((-1) ** (x + z) * corr[x, 1, z] for x in range(2) for z in range(2))
    return _assessment(i, float(j), settings, analytic_bound_b1(x1, x2))


def closed_form_ij(x1: XParams, x2: XParams,
                   settings: MeasurementSettings) -> Tuple[float, float]:
    """I and J from the closed-form expressions in the measurement angles."""
    a0, a1 = settings.alice
    c0, c1 = settings.charlie
    i = (0.25 * x1.t_zz * x2.t_zz
         * (math.cos(a0.theta) + math.cos(a1.theta))
         * (math.cos(c0.theta) + math.cos(c1.theta)))
    j = ((x1.p + x1.q) * (x2.p + x2.q)
         * (math.sin(a0.theta) * math.cos(a0.phi) - math.sin(a1.theta) * math.cos(a1.phi))
         * (math.sin(c0.theta) * math.cos(c0.phi) - math.sin(c1.theta) * math.cos(c1.phi)))
    return i, j


# ---------------------------------------------------------------------------
# Numerical maximization
# ---------------------------------------------------------------------------

Vec3 = Tuple[float, float, float]
Tensor = Tuple[Vec3, ...]


def _unit(theta: float, phi: float) -> Vec3:
    st = math.sin(theta)
    return (st * math.cos(phi), st * math.sin(phi), math.cos(theta))


def _dot(u: Sequence[float], v: Sequence[float]) -> float:
    return u[0] * v[0] + u[1] * v[1] + u[2] * v[2]


def _add(u: Vec3, v: Vec3) -> Vec3:
    return (u[0] + v[0], u[1] + v[1], u[2] + v[2])


def _sub(u: Vec3, v: Vec3) -> Vec3:
    return (u[0] - v[0], u[1] - v[1], u[2] - v[2])


def _matvec(t: Tensor, v: Vec3) -> Vec3:
    return (_dot(t[0], v), _dot(t[1], v), _dot(t[2], v))


def _vecmat(v: Vec3, t: Tensor) -> Vec3:
    return (v[0] * t[0][0] + v[1] * t[1][0] + v[2] * t[2][0],
            v[0] * t[0][1] + v[1] * t[1][1] + v[2] * t[2][1],
            v[0] * t[0][2] + v[1] * t[1][2] + v[2] * t[2][2])


def _b_objective(angles: Sequence[float], t0: Tensor, t1: Tensor) -> Tuple[float, float]:
    """(I, J) at the given eight angles from the branch tensors."""
    a0, a1, c0, c1 = (_unit(angles[k], angles[k + 1]) for k in range(0, 8, 2))
    i = 0.25 * _dot(_add(a0, a1), _matvec(t0, _add(c0, c1)))
    j = 0.25 * _dot(_sub(a0, a1), _matvec(t1, _sub(c0, c1)))
    return i, j


def _b_value(angles: Sequence[float], t0: Tensor, t1: Tensor) -> float:
    i, j = _b_objective(angles, t0, t1)
    return math.sqrt(abs(i)) + math.sqrt(abs(j))


def golden_section_max(f: Callable[[float], float], a: float, b: float,
                       tol: float) -> Tuple[float, float]:
    """
    Golden-section search for the maximum of f on [a, b].

    Args:
        f: 1-d function to maximize
        a: Lower end of the bracket
        b: Upper end of the bracket
        tol: Final bracket width

    Returns:
        (argmax, max) estimate
    """
    dist = b - a
    if dist <= tol:
        x = (a + b) / 2
        return x, f(x)

    n = int(math.ceil(math.log(tol / dist) / math.log(INV_PHI)))
    c = a + INV_PHI_SQ * dist
    d = a + INV_PHI * dist
    yc = f(c)
    yd = f(d)
    for _ in range(n - 1):
        if yc > yd:
            b = d
            d = c
            yd = yc
            dist = INV_PHI * dist
            c = a + INV_PHI_SQ * dist
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            dist = INV_PHI * dist
            d = a + INV_PHI * dist
            yd = f(d)

    x = (a + d) / 2 if yc > yd else (c + b) / 2
    return x, f(x)


def _wrap_phi(phi: float) -> float:
    wrapped = math.fmod(phi, TWO_PI)
    if wrapped < 0:
        wrapped += TWO_PI
    return 0.0 if wrapped >= TWO_PI else wrapped


def _clamp_theta(theta: float) -> float:
    return min(math.pi, max(0.0, theta))


def _normalize(angles: Sequence[float]) -> List[float]:
    return [_clamp_theta(v) if k % 2 == 0 else _wrap_phi(v) for k, v in enumerate(angles)]


def _coordinate_step(angles: List[float], k: int, value: float, t0: Tensor, t1: Tensor,
                     tol: float) -> float:
    """
    Maximize along coordinate k in place; returns the new value.

    Only one of the four Bloch vectors moves, so the other party's sum and
    difference vectors are contracted with the branch tensors once up front.
    """
    is_theta = k % 2 == 0
    slot = k // 2
    vecs = [_unit(angles[2 * m], angles[2 * m + 1]) for m in range(4)]
    partner = vecs[slot ^ 1]
    if slot < 2:
        w0 = _matvec(t0, _add(vecs[2], vecs[3]))
        w1 = _matvec(t1, _sub(vecs[2], vecs[3]))
    else:
        w0 = _vecmat(_add(vecs[0], vecs[1]), t0)
        w1 = _vecmat(_sub(vecs[0], vecs[1]), t1)
    sign = 1.0 if slot % 2 == 0 else -1.0
    theta, phi = angles[2 * slot], angles[2 * slot + 1]

    def along(v: float) -> float:
        u = _unit(_clamp_theta(v), phi) if is_theta else _unit(theta, v)
        i = 0.25 * _dot(_add(u, partner), w0)
        j = 0.25 * sign * _dot(_sub(u, partner), w1)
        return math.sqrt(abs(i)) + math.sqrt(abs(j))

    points = COORDINATE_GRID_POINTS
    if is_theta:
        spacing = math.pi / (points - 1)
        grid = [spacing * n for n in range(points)]
    else:
        spacing = TWO_PI / points
        grid = [spacing * n for n in range(points)]

    best_x, best_v = angles[k], value
    for g in grid:
        v = along(g)
        if v > best_v:
            best_x, best_v = g, v

    lo, hi = best_x - spacing, best_x + spacing
    if is_theta:
        lo, hi = max(lo, 0.0), min(hi, math.pi)
    x, v = golden_section_max(along, lo, hi, tol)
    if v > best_v:
        best_x, best_v = x, v

    if best_v > value:
        angles[k] = _clamp_theta(best_x) if is_theta else _wrap_phi(best_x)
        return best_v
    return value


def _pattern_move(before: Sequence[float], angles: List[float], value: float,
                  t0: Tensor, t1: Tensor, tol: float) -> float:
    """Line search along the displacement of the last sweep; updates angles in place."""
    step = []
    for k in range(8):
        delta = angles[k] - before[k]
        if k % 2 == 1:
            delta = (delta + math.pi) % TWO_PI - math.pi
        step.append(delta)
    if max(abs(s) for s in step) == 0.0:
        return value

    base = list(before)

    def along(s: float) -> float:
        return _b_value(_normalize([base[k] + s * step[k] for k in range(8)]), t0, t1)

    s, v = golden_section_max(along, 1.0, 4.0, tol)
    if v > value:
        angles[:] = _normalize([base[k] + s * step[k] for k in range(8)])
        return v
    return value


def _coordinate_search(start: Sequence[float], t0: Tensor, t1: Tensor, tol: float,
                       max_sweeps: int) -> Tuple[float, Tuple[float, ...], int]:
    """
    Multi-coordinate ascent from one start.

    Returns:
        (value, angles, sweeps used)
    """
    angles = _normalize(start)
    value = _b_value(angles, t0, t1)
    sweeps = 0
    while sweeps < max_sweeps:
        before = list(angles)
        previous = value
        for k in range(8):
            value = _coordinate_step(angles, k, value, t0, t1, tol)
        value = _pattern_move(before, angles, value, t0, t1, tol)
        sweeps += 1
        if value - previous < SWEEP_IMPROVEMENT_TOL:
            break
    return value, tuple(angles), sweeps


def _refine_start(args: Tuple[Sequence[float], Tensor, Tensor]) -> Tuple[float, Tuple[float, ...], int]:
    start, t0, t1 = args
    return _coordinate_search(start, t0, t1, GOLDEN_STEP, MAX_COORDINATE_SWEEPS)


def _orthogonal_unit(ref: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Unit vector along the part of v orthogonal to the unit vector ref."""
    w = v - np.dot(v, ref) * ref
    norm = float(np.linalg.norm(w))
    if norm < 1e-12:
        axis = np.zeros(3)
        axis[int(np.argmin(np.abs(ref)))] = 1.0
        w = axis - np.dot(axis, ref) * ref
        norm = float(np.linalg.norm(w))
    return w / norm


def _angles_of(v: np.ndarray) -> Tuple[float, float]:
    theta = math.acos(min(1.0, max(-1.0, float(v[2]))))
    return theta, _wrap_phi(math.atan2(float(v[1]), float(v[0])))


def principal_axis_start(t0: np.ndarray, t1: np.ndarray) -> Angles:
    """
    Start built from the leading singular vectors of the branch tensors.

    Each party's two settings are placed symmetrically about the leading
    T_0 direction and split along the leading T_1 direction, with the split
    angle atan(sqrt(s_1 / s_0)) of the leading singular values.
    """
    u0, s0, v0 = np.linalg.svd(t0)
    u1, s1, v1 = np.linalg.svd(t1)
    a_main, c_main = u0[:, 0], v0[0]
    a_split, c_split = u1[:, 0], v1[0]
    if s0[0] >= s1[0]:
        a_split = _orthogonal_unit(a_main, a_split)
        c_split = _orthogonal_unit(c_main, c_split)
    else:
        a_main = _orthogonal_unit(a_split, a_main)
        c_main = _orthogonal_unit(c_split, c_main)
    split = math.atan2(math.sqrt(s1[0]), math.sqrt(s0[0]))
    cs, sn = math.cos(split), math.sin(split)
    angles: List[float] = []
    for main, side in ((a_main, a_split), (c_main, c_split)):
        angles += _angles_of(cs * main + sn * side)
        angles += _angles_of(cs * main - sn * side)
    return tuple(angles)  # type: ignore[return-value]


def start_lattice() -> List[Angles]:
    """
    Deterministic starting points: theta in START_THETAS and phi pattern in
    START_PHI_PATTERNS for each party. The canonical point comes first.
    """
    party = [(theta, phis[0], theta, phis[1])
             for theta in START_THETAS for phis in START_PHI_PATTERNS]
    starts: List[Angles] = [canonical_settings().as_angles()]
    for alice in party:
        for charlie in party:
            candidate = tuple(alice + charlie)
            if candidate not in starts:
                starts.append(candidate)  # type: ignore[arg-type]
    return starts


def _ranking_key(result: Tuple[float, Tuple[float, ...], int]) -> Tuple[float, Tuple[float, ...]]:
    return (-result[0], result[1])


def maximize_b(x1: XParams, x2: XParams, workers: Optional[int] = None) -> BilocalAssessment:
    """
    Maximize B over the eight measurement angles.

    Every lattice start and the principal-axis start are refined to
    GOLDEN_STEP. Ties are broken by the lexicographically smallest angles so
    the result does not depend on the number of workers.

    Args:
        x1: State shared by Alice and Bob
        x2: State shared by Bob and Charlie
        workers: Process count for the starts; None or 1 runs sequentially

    Returns:
        Assessment at the best settings found
    """
    t0_arr, t1_arr = branch_tensors(swap(x1, x2))
    t0: Tensor = tuple(tuple(float(v) for v in row) for row in t0_arr)  # type: ignore[misc]
    t1: Tensor = tuple(tuple(float(v) for v in row) for row in t1_arr)  # type: ignore[misc]

    starts = start_lattice() + [principal_axis_start(t0_arr, t1_arr)]
    tasks = [(start, t0, t1) for start in starts]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            refined = list(executor.map(_refine_start, tasks))
    else:
        refined = [_refine_start(task) for task in tasks]

    value, angles, sweeps = min(refined, key=_ranking_key)
    logger.info(f"maximize_b: B={value:.12g} after {sweeps} sweeps "
                f"(best of {len(starts)} starts)")

    settings = MeasurementSettings.from_angles(angles)
    i, j = _b_objective(angles, t0, t1)
    return _assessment(i, j, settings, analytic_bound_b1(x1, x2))


BILOCAL_MODES = ("analytic", "numeric", "both")


@dataclass(frozen=True)
class BilocalComparison:
    """Analytic bound and/or numeric maximum for one pair of states."""
    bound: Optional[BoundB1]
    numeric: Optional[BilocalAssessment]
    gap: Optional[float]
    verdict: BilocalVerdict


def compare_bilocal(x1: XParams, x2: XParams, mode: str = "both",
                    workers: Optional[int] = None) -> BilocalComparison:
    """
    Evaluate the analytic bound, the numeric maximum, or both.

    The verdict follows the numeric maximum whenever it is computed.

    Raises:
        ValueError: On an unknown mode
    """
    if mode not in BILOCAL_MODES:
        raise ValueError(f"Unknown mode '{mode}' (choose from {', '.join(BILOCAL_MODES)})")
    bound = analytic_bound_b1(x1, x2) if mode in ("analytic", "both") else None
    numeric = maximize_b(x1, x2, workers) if mode in ("numeric", "both") else None
    gap = numeric.b - bound.value if (numeric is not None and bound is not None) else None
    verdict = numeric.verdict if numeric is not None else bilocal_verdict(bound.value)  # type: ignore[union-attr]
    return BilocalComparison(bound, numeric, gap, verdict)
