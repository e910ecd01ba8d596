"""
Two-qubit X and T states: constructors, validity checks and scalar functionals.

X states carry the diagonal weights (varsigma, kappa, zeta, d) and the real
coherences p (|00><11|) and q (|01><10|). T states are X states with maximally
mixed marginals, parameterized by their diagonal correlation tensor (c1, c2, c3).
"""
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Tuple

import numpy as np

from bilocal.exceptions import DomainViolationError, MatrixError, StateValidationError
from bilocal.linalg import PAULIS, RealSym3, density_matrix_report, kron, sym3_eigenvalues
from config import PARAM_TOL, RADICAND_TOL, VERDICT_TOL

logger = logging.getLogger(__name__)


class ChshVerdict(str, Enum):
    """Outcome of the Horodecki CHSH test."""
    LOCAL = "local"
    NONLOCAL = "nonlocal"
    BOUNDARY = "boundary"


def compare_to_threshold(value: float, threshold: float = 1.0) -> int:
    """
    Three-way comparison with VERDICT_TOL slack.

    Returns:
        1 if value is clearly above threshold, -1 if clearly below, 0 within tolerance
    """
    if value > threshold + VERDICT_TOL:
        return 1
    if value < threshold - VERDICT_TOL:
        return -1
    return 0


def clamped_sqrt(radicand: float, label: str = "radicand") -> float:
    """
    Square root that maps float noise below zero to 0.

    Raises:
        DomainViolationError: If the radicand is below -RADICAND_TOL
    """
    if radicand < -RADICAND_TOL:
        raise DomainViolationError(f"{label} is negative: {radicand:.6g}")
    return math.sqrt(max(radicand, 0.0))


@dataclass(frozen=True)
class XParams:
    """Parameters of a two-qubit X state."""
    varsigma: float
    kappa: float
    zeta: float
    d: float
    p: float
    q: float

    @property
    def t_xx(self) -> float:
        return 2 * (self.p + self.q)

    @property
    def t_yy(self) -> float:
        return 2 * (self.q - self.p)

    @property
    def t_zz(self) -> float:
        """varsigma - kappa - zeta + d"""
        return self.varsigma - self.kappa - self.zeta + self.d

    def as_tuple(self) -> Tuple[float, float, float, float, float, float]:
        return (self.varsigma, self.kappa, self.zeta, self.d, self.p, self.q)

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(X_FIELDS, self.as_tuple()))


X_FIELDS = ("varsigma", "kappa", "zeta", "d", "p", "q")


@dataclass(frozen=True)
class TParams:
    """Diagonal correlation coefficients of a T state."""
    c1: float
    c2: float
    c3: float

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.c1, self.c2, self.c3)


@dataclass(frozen=True)
class LocalityVars:
    """Locality variables of an X state; theta_k = 1 - (epsilon, delta, xi)[k]."""
    epsilon: float
    delta: float
    xi: float
    theta1: float
    theta2: float
    theta3: float

    @classmethod
    def from_vars(cls, epsilon: float, delta: float, xi: float) -> "LocalityVars":
        return cls(epsilon, delta, xi, 1 - epsilon, 1 - delta, 1 - xi)


@dataclass(frozen=True)
class CorrelationTensor:
    """t_ij = Tr[rho sigma_i (x) sigma_j] for i, j in x, y, z."""
    t: np.ndarray

    def gram(self) -> RealSym3:
        return RealSym3.gram(self.t)

    def diagonal(self) -> Tuple[float, float, float]:
        return (float(self.t[0, 0]), float(self.t[1, 1]), float(self.t[2, 2]))


def validate_x_params(x: XParams) -> Dict[str, Any]:
    """
    Check normalization and positivity of X-state parameters.

    Args:
        x: Parameters to check

    Returns:
        Dictionary with 'success' flag and list of violated constraints in 'errors'
    """
    errors: List[str] = []
    for name, value in (("ς", x.varsigma), ("κ", x.kappa), ("ζ", x.zeta), ("d", x.d),
                        ("p", x.p), ("q", x.q)):
        if not math.isfinite(value):
            errors.append(f"{name} must be finite ({value})")
    if errors:
        return {"success": False, "errors": errors}
    total = x.varsigma + x.kappa + x.zeta + x.d
    if abs(total - 1) > PARAM_TOL:
        errors.append(f"ς+κ+ζ+d=1 violated (sum {total:.12g})")
    for name, value in (("ς", x.varsigma), ("κ", x.kappa), ("ζ", x.zeta), ("d", x.d)):
        if value < -PARAM_TOL:
            errors.append(f"{name}≥0 violated ({value:.12g})")
    if x.p * x.p > x.varsigma * x.d + PARAM_TOL:
        errors.append("p²≤ςd violated")
    if x.q * x.q > x.kappa * x.zeta + PARAM_TOL:
        errors.append("q²≤κζ violated")
    return {"success": not errors, "errors": errors}


def validate_t_params(t: TParams) -> Dict[str, Any]:
    """
    Check the T-state conditions |c1 ± c2| <= 1 ∓ c3 and |cj| <= 1.

    Bell states sit on the boundary and are accepted.

    Args:
        t: Parameters to check

    Returns:
        Dictionary with 'success' flag and list of violated constraints in 'errors'
    """
    coefficients = (("c1", t.c1), ("c2", t.c2), ("c3", t.c3))
    errors: List[str] = [f"{name} must be finite ({value})"
              for name, value in coefficients if not math.isfinite(value)]
    if errors:
        return {"success": False, "errors": errors}
    for name, value in coefficients:
        if abs(value) > 1 + PARAM_TOL:
            errors.append(f"|{name}|≤1 violated ({value:.12g})")
    if abs(t.c1 + t.c2) > 1 - t.c3 + PARAM_TOL:
        errors.append("|c1+c2|≤1−c3 violated")
    if abs(t.c1 - t.c2) > 1 + t.c3 + PARAM_TOL:
        errors.append("|c1−c2|≤1+c3 violated")
    return {"success": not errors, "errors": errors}


def require_valid_x(x: XParams) -> None:
    """Raise StateValidationError naming every violated X-state constraint."""
    result = validate_x_params(x)
    if not result["success"]:
        raise StateValidationError("; ".join(result["errors"]))


def require_valid_t(t: TParams) -> None:
    """Raise StateValidationError naming every violated T-state constraint."""
    result = validate_t_params(t)
    if not result["success"]:
        raise StateValidationError("; ".join(result["errors"]))


def x_state_matrix(x: XParams, validate: bool = True) -> np.ndarray:
    """
    Build the 4x4 X-state density matrix.

    Args:
        x: State parameters
        validate: Reject parameters that do not describe a density matrix

    Returns:
        Density matrix in the |00>, |01>, |10>, |11> basis

    Raises:
        StateValidationError: If validation is on and a constraint fails
    """
    if validate:
        require_valid_x(x)
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = x.varsigma
    rho[1, 1] = x.kappa
    rho[2, 2] = x.zeta
    rho[3, 3] = x.d
    rho[0, 3] = rho[3, 0] = x.p
    rho[1, 2] = rho[2, 1] = x.q
    return rho


def t_to_x(t: TParams, validate: bool = True) -> XParams:
    """
    Map T-state coefficients to X-state parameters.

    varsigma = d = (1 + c3)/4, kappa = zeta = (1 - c3)/4,
    p = (c1 - c2)/4, q = (c1 + c2)/4.

    Args:
        t: T-state coefficients
        validate: Reject coefficients outside the T-state tetrahedron

    Raises:
        StateValidationError: If validation is on and a constraint fails
    """
    if validate:
        require_valid_t(t)
    diag_even = (1 + t.c3) / 4
    diag_odd = (1 - t.c3) / 4
    return XParams(diag_even, diag_odd, diag_odd, diag_even,
                   (t.c1 - t.c2) / 4, (t.c1 + t.c2) / 4)


def werner(alpha: float) -> TParams:
    """
    Singlet mixed with white noise at visibility alpha.

    Raises:
        StateValidationError: If alpha is outside [0, 1]
    """
    if not -PARAM_TOL <= alpha <= 1 + PARAM_TOL:
        raise StateValidationError(f"0≤α≤1 violated ({alpha:.12g})")
    return TParams(-alpha, -alpha, -alpha)


def alpha_state_t(alpha_prime: float) -> TParams:
    """T coefficients (alpha', -alpha', 2 alpha' - 1) of the alpha-state family."""
    if not -PARAM_TOL <= alpha_prime <= 1 + PARAM_TOL:
        raise StateValidationError(f"0≤α'≤1 violated ({alpha_prime:.12g})")
    return TParams(alpha_prime, -alpha_prime, 2 * alpha_prime - 1)


def alpha_state(alpha_prime: float) -> XParams:
    """
    Alpha state: |phi+> with weight alpha' mixed with (|01><01| + |10><10|)/2.

    Raises:
        StateValidationError: If alpha' is outside [0, 1]
    """
    alpha_state_t(alpha_prime)
    half = alpha_prime / 2
    rest = (1 - alpha_prime) / 2
    return XParams(half, rest, rest, half, half, 0.0)


def correlation_tensor(rho: Any) -> CorrelationTensor:
    """
    Correlation tensor of a two-qubit density matrix.

    Raises:
        MatrixError: If rho is not a valid 4x4 density matrix
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise MatrixError(f"Expected a 4x4 density matrix, got shape {rho.shape}")
    report = density_matrix_report(rho)
    if not report["valid"]:
        raise MatrixError(f"Not a density matrix: {report['error']}")

    t = np.empty((3, 3))
    for i, si in enumerate(PAULIS):
        for j, sj in enumerate(PAULIS):
            t[i, j] = float(np.real(np.trace(rho @ kron(si, sj))))
    return CorrelationTensor(t)


def horodecki_m(rho: Any) -> float:
    """
    Horodecki value M: sqrt of the two largest eigenvalues of t^T t.

    The maximal CHSH value of the state is 2M.
    """
    _, mid, high = sym3_eigenvalues(correlation_tensor(rho).gram())
    return clamped_sqrt(mid + high, "Horodecki radicand")


def chsh_report(rho: Any) -> Dict[str, Any]:
    """
    Horodecki value, maximal CHSH value and locality verdict.

    Returns:
        Dictionary with 'm', 'chsh' (= 2M) and 'verdict' (ChshVerdict)
    """
    m = horodecki_m(rho)
    cmp = compare_to_threshold(m)
    verdict = {1: ChshVerdict.NONLOCAL, 0: ChshVerdict.BOUNDARY, -1: ChshVerdict.LOCAL}[cmp]
    return {"m": m, "chsh": 2 * m, "verdict": verdict}


def locality_vars(x: XParams) -> LocalityVars:
    """
    Theta and epsilon/delta/xi variables of an X state.

    theta1 = 8(p²+q²), theta2 = E² + 4(p+q)², theta3 = E² + 4(p-q)²,
    with E = varsigma - kappa - zeta + d.
    """
    e = x.t_zz
    theta1 = 8 * (x.p ** 2 + x.q ** 2)
    theta2 = e ** 2 + 4 * (x.p + x.q) ** 2
    theta3 = e ** 2 + 4 * (x.p - x.q) ** 2
    return LocalityVars(1 - theta1, 1 - theta2, 1 - theta3, theta1, theta2, theta3)


def concurrence_t(t: TParams) -> float:
    """Concurrence max{0, (|c1-c2| - |1-c3|)/2, (|c1+c2| - |1+c3|)/2} of a T state."""
    return max(0.0,
               (abs(t.c1 - t.c2) - abs(1 - t.c3)) / 2,
               (abs(t.c1 + t.c2) - abs(1 + t.c3)) / 2)


def is_separable_t(t: TParams) -> bool:
    """T states are separable iff |c1| + |c2| + |c3| <= 1."""
    return abs(t.c1) + abs(t.c2) + abs(t.c3) <= 1 + PARAM_TOL


def concurrence_x_oracle(x: XParams) -> float:
    """Concurrence 2 max{0, |p| - sqrt(kappa zeta), |q| - sqrt(varsigma d)} of an X state."""
    return 2 * max(0.0,
                   abs(x.p) - math.sqrt(max(x.kappa * x.zeta, 0.0)),
                   abs(x.q) - math.sqrt(max(x.varsigma * x.d, 0.0)))


def sample_t_params(rng: np.random.Generator, size: int, separable: bool = False) -> np.ndarray:
    """
    Draw T-state coefficients uniformly from the valid tetrahedron.

    Rejection sampling from the cube [-1, 1]^3.

    Args:
        rng: numpy Generator
        size: Number of states
        separable: Restrict to the separable octahedron |c1|+|c2|+|c3| <= 1

    Returns:
        Array of shape (size, 3)
    """
    accepted: List[np.ndarray] = []
    count = 0
    while count < size:
        batch = rng.uniform(-1.0, 1.0, size=(max(2 * (size - count), 16), 3))
        c1, c2, c3 = batch[:, 0], batch[:, 1], batch[:, 2]
        if separable:
            keep = np.abs(batch).sum(axis=1) <= 1
        else:
            keep = (np.abs(c1 + c2) <= 1 - c3) & (np.abs(c1 - c2) <= 1 + c3)
        accepted.append(batch[keep])
        count += int(keep.sum())
    return np.concatenate(accepted)[:size]


def sample_x_params(rng: np.random.Generator, size: int) -> np.ndarray:
    """
    Draw X-state parameters: uniform simplex weights plus uniform admissible coherences.

    Returns:
        Array of shape (size, 6) in (varsigma, kappa, zeta, d, p, q) order
    """
    weights = rng.dirichlet(np.ones(4), size=size)
    p_max = np.sqrt(weights[:, 0] * weights[:, 3])
    q_max = np.sqrt(weights[:, 1] * weights[:, 2])
    p = rng.uniform(-1.0, 1.0, size=size) * p_max
    q = rng.uniform(-1.0, 1.0, size=size) * q_max
    return np.column_stack([weights, p, q])


def x_params_from_row(row: Any) -> XParams:
    """XParams from a length-6 sequence."""
    return XParams(*(float(v) for v in row))


def t_params_from_row(row: Any) -> TParams:
    """TParams from a length-3 sequence."""
    return TParams(*(float(v) for v in row))
