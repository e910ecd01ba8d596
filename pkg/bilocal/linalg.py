"""
Dense complex linear algebra for 2-, 4- and 16-dimensional quantum objects.

Matrices are numpy complex128 arrays. Qubit 0 is the most significant bit of
the computational-basis index.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Tuple

import numpy as np

from bilocal.exceptions import MatrixError
from config import HERMITIAN_TOL, JACOBI_MAX_SWEEPS, JACOBI_OFFDIAG_TOL, PSD_TOL, TRACE_TOL

logger = logging.getLogger(__name__)

IDENTITY_2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)


def as_matrix(m: Any) -> np.ndarray:
    """
    Coerce input to a square complex matrix.

    Args:
        m: Array-like square matrix

    Returns:
        complex128 numpy array

    Raises:
        MatrixError: If the input is not a square 2-D array
    """
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise MatrixError(f"Expected a non-empty square matrix, got shape {arr.shape}")
    return arr


def adjoint(m: Any) -> np.ndarray:
    """Conjugate transpose."""
    return as_matrix(m).conj().T


def kron(a: Any, b: Any) -> np.ndarray:
    """
    Kronecker product with entry [(i*dimB+k), (j*dimB+l)] = A[i,j] * B[k,l].

    Args:
        a: Left factor
        b: Right factor

    Returns:
        Matrix of dimension dim(A) * dim(B)
    """
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*factors: Any) -> np.ndarray:
    """Kronecker product of several factors, left to right."""
    result = np.ones((1, 1), dtype=complex)
    for factor in factors:
        result = np.kron(result, as_matrix(factor))
    return result


def qubit_count(m: np.ndarray) -> int:
    """
    Number of qubits a matrix acts on.

    Raises:
        MatrixError: If the dimension is not a power of two
    """
    dim = m.shape[0]
    k = dim.bit_length() - 1
    if dim != 1 << k:
        raise MatrixError(f"Dimension {dim} is not a power of two")
    return k


def partial_trace(rho: Any, traced: Iterable[int]) -> np.ndarray:
    """
    Trace out a set of qubits.

    Args:
        rho: Matrix over k qubits (dimension 2^k)
        traced: Indices of the qubits to trace out, qubit 0 most significant

    Returns:
        Reduced matrix over the remaining qubits, in their original order

    Raises:
        MatrixError: If a qubit index is out of range
    """
    rho = as_matrix(rho)
    k = qubit_count(rho)
    traced_set = set(int(q) for q in traced)
    bad = [q for q in traced_set if q < 0 or q >= k]
    if bad:
        raise MatrixError(f"Qubit index out of range for {k} qubits: {sorted(bad)}")

    tensor = rho.reshape([2] * (2 * k))
    remaining = k
    for q in sorted(traced_set, reverse=True):
        tensor = np.trace(tensor, axis1=q, axis2=q + remaining)
        remaining -= 1
    dim = 1 << remaining
    return tensor.reshape(dim, dim)


def hermiticity_deviation(m: Any) -> float:
    """Max absolute entry of M - adjoint(M)."""
    m = as_matrix(m)
    return float(np.max(np.abs(m - m.conj().T)))


def symmetrize(m: Any) -> np.ndarray:
    """Return (M + adjoint(M)) / 2."""
    m = as_matrix(m)
    return (m + m.conj().T) / 2


def _off_diagonal_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def hermitian_eigenvalues(m: Any) -> np.ndarray:
    """
    Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of a_pq and then applies the real
    Jacobi rotation that zeroes it. Sweeps stop once the off-diagonal
    Frobenius norm drops below JACOBI_OFFDIAG_TOL or after JACOBI_MAX_SWEEPS.

    Args:
        m: Hermitian matrix (within HERMITIAN_TOL)

    Returns:
        Real eigenvalues in ascending order

    Raises:
        MatrixError: If the input is not Hermitian
    """
    m = as_matrix(m)
    deviation = hermiticity_deviation(m)
    if deviation > HERMITIAN_TOL:
        raise MatrixError(f"Matrix is not Hermitian (max deviation {deviation:.3e})")

    a = symmetrize(m)
    n = a.shape[0]
    sweeps = 0
    while sweeps < JACOBI_MAX_SWEEPS and _off_diagonal_norm(a) >= JACOBI_OFFDIAG_TOL:
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                magnitude = abs(apq)
                if magnitude == 0.0:
                    continue
                phase = apq / magnitude
                tau = (a[q, q].real - a[p, p].real) / (2 * magnitude)
                sign = 1.0 if tau >= 0 else -1.0
                t = sign / (abs(tau) + math.sqrt(1 + tau * tau))
                c = 1 / math.sqrt(1 + t * t)
                s = t * c

                rot = np.eye(n, dtype=complex)
                rot[p, p] = c
                rot[p, q] = s
                rot[q, p] = -s * phase.conjugate()
                rot[q, q] = c * phase.conjugate()
                a = rot.conj().T @ a @ rot
        sweeps += 1

    if sweeps == JACOBI_MAX_SWEEPS:
        logger.warning(f"Jacobi stopped after {sweeps} sweeps, off-diagonal norm "
                       f"{_off_diagonal_norm(a):.3e}")
    logger.debug(f"Jacobi converged in {sweeps} sweeps for dimension {n}")
    return np.sort(np.real(np.diag(a)))


@dataclass(frozen=True)
class RealSym3:
    """Real symmetric 3x3 matrix stored by its upper triangle."""
    xx: float
    xy: float
    xz: float
    yy: float
    yz: float
    zz: float

    @classmethod
    def from_matrix(cls, m: Any) -> "RealSym3":
        """Build from a 3x3 array, reading only the upper triangle."""
        arr = np.asarray(m, dtype=float)
        if arr.shape != (3, 3):
            raise MatrixError(f"Expected a 3x3 matrix, got shape {arr.shape}")
        return cls(float(arr[0, 0]), float(arr[0, 1]), float(arr[0, 2]),
                   float(arr[1, 1]), float(arr[1, 2]), float(arr[2, 2]))

    @classmethod
    def gram(cls, t: Any) -> "RealSym3":
        """Build t^T t for a real 3x3 matrix t."""
        arr = np.asarray(t, dtype=float)
        return cls.from_matrix(arr.T @ arr)

    def to_matrix(self) -> np.ndarray:
        return np.array([
            [self.xx, self.xy, self.xz],
            [self.xy, self.yy, self.yz],
            [self.xz, self.yz, self.zz],
        ])

    def trace(self) -> float:
        return self.xx + self.yy + self.zz

    def det(self) -> float:
        return (self.xx * (self.yy * self.zz - self.yz * self.yz)
                - self.xy * (self.xy * self.zz - self.yz * self.xz)
                + self.xz * (self.xy * self.yz - self.yy * self.xz))


def sym3_eigenvalues(s: RealSym3) -> Tuple[float, float, float]:
    """
    Eigenvalues of a real symmetric 3x3 matrix by the trigonometric cubic method.

    Args:
        s: Matrix to diagonalize

    Returns:
        Eigenvalues in ascending order
    """
    p1 = s.xy ** 2 + s.xz ** 2 + s.yz ** 2
    if p1 == 0.0:
        low, mid, high = sorted((s.xx, s.yy, s.zz))
        return (low, mid, high)

    q = s.trace() / 3
    p2 = (s.xx - q) ** 2 + (s.yy - q) ** 2 + (s.zz - q) ** 2 + 2 * p1
    p = math.sqrt(p2 / 6)
    shifted = RealSym3((s.xx - q) / p, s.xy / p, s.xz / p,
                       (s.yy - q) / p, s.yz / p, (s.zz - q) / p)
    r = min(1.0, max(-1.0, shifted.det() / 2))
    phi = math.acos(r) / 3

    high = q + 2 * p * math.cos(phi)
    low = q + 2 * p * math.cos(phi + 2 * math.pi / 3)
    mid = 3 * q - high - low
    low, mid, high = sorted((low, mid, high))
    return (low, mid, high)


def density_matrix_report(rho: Any) -> Dict[str, Any]:
    """
    Check whether a matrix is a valid density matrix.

    Args:
        rho: Candidate density matrix

    Returns:
        Dictionary with hermiticity deviation, trace, minimum eigenvalue and
        'valid' flag; 'error' describes the first failed check
    """
    rho = as_matrix(rho)
    deviation = hermiticity_deviation(rho)
    trace = complex(np.trace(rho))
    report: Dict[str, Any] = {
        "hermiticity_deviation": deviation,
        "trace": trace.real,
        "min_eigenvalue": None,
        "valid": False,
        "error": None,
    }
    if deviation > HERMITIAN_TOL:
        report["error"] = f"not Hermitian (deviation {deviation:.3e})"
        return report
    if abs(trace - 1) > TRACE_TOL:
        report["error"] = f"trace {trace.real:.12g} is not 1"
        return report

    min_eig = float(hermitian_eigenvalues(rho)[0])
    report["min_eigenvalue"] = min_eig
    if min_eig < -PSD_TOL:
        report["error"] = f"negative eigenvalue {min_eig:.3e}"
        return report
    report["valid"] = True
    return report


def is_density_matrix(rho: Any) -> bool:
    """True if rho is Hermitian, unit trace and positive semidefinite."""
    return bool(density_matrix_report(rho)["valid"])
