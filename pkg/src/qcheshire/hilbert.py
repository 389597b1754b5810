"""Small dense complex linear algebra for finite Hilbert spaces.

Vectors and operators are plain complex128 numpy arrays. The helpers here
validate shapes, fix the tensor-product ordering and provide a Taylor
matrix exponential that serves as an independent oracle for the
closed-form rotation operators.

Composite basis ordering for the three-path problem is
``index = ((path * 2) + spin) * 2 + energy`` which is exactly what
``tensor(path_op, spin_op, energy_op)`` produces (numpy's ``kron`` puts the
left factor on the most significant digit).
"""

from __future__ import annotations

import math

import numpy as np

MAX_DIM = 4096


class DimensionError(ValueError):
    """Operands have incompatible or unsupported dimensions."""


class ConvergenceError(ArithmeticError):
    """An iterative routine hit its iteration cap."""


def cvec(amps) -> np.ndarray:
    v = np.asarray(amps, dtype=complex).reshape(-1)
    if v.size == 0 or v.size > MAX_DIM:
        raise DimensionError(f"vector dimension {v.size} outside 1..{MAX_DIM}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite amplitudes")
    return v


def cmat(entries) -> np.ndarray:
    m = np.asarray(entries, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"operator must be square, got shape {m.shape}")
    if m.shape[0] == 0 or m.shape[0] > MAX_DIM:
        raise DimensionError(f"operator dimension {m.shape[0]} outside 1..{MAX_DIM}")
    if not np.all(np.isfinite(m)):
        raise ValueError("operator has non-finite entries")
    return m


def basis(dim: int, index: int) -> np.ndarray:
    """Unit vector ``e_index`` of a ``dim``-dimensional space."""
    if not 0 <= index < dim:
        raise IndexError(f"basis index {index} outside 0..{dim - 1}")
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def tensor(*factors) -> np.ndarray:
    """Kronecker product of operators (or of vectors), left factor most significant.

    All factors must be of the same kind: either all 1-d vectors or all
    square matrices.
    """
    if not factors:
        raise ValueError("tensor needs at least one factor")
    arrays = [np.asarray(f, dtype=complex) for f in factors]
    ndims = {a.ndim for a in arrays}
    if ndims == {1}:
        dim = math.prod(a.size for a in arrays)
    elif ndims == {2}:
        for a in arrays:
            cmat(a)
        dim = math.prod(a.shape[0] for a in arrays)
    else:
        raise DimensionError("tensor factors must be all vectors or all square matrices")
    if dim > MAX_DIM:
        raise DimensionError(f"tensor product dimension {dim} exceeds {MAX_DIM}")
    out = arrays[0]
    for a in arrays[1:]:
        out = np.kron(out, a)
    return out


def inner(bra: np.ndarray, ket: np.ndarray) -> complex:
    """``<bra|ket>``, conjugate-linear in the first argument."""
    if bra.shape != ket.shape or bra.ndim != 1:
        raise DimensionError(f"inner product of shapes {bra.shape} and {ket.shape}")
    return complex(np.vdot(bra, ket))


def norm(v: np.ndarray) -> float:
    return float(np.sqrt(np.vdot(v, v).real))


def apply(op: np.ndarray, v: np.ndarray) -> np.ndarray:
    if op.ndim != 2 or v.ndim != 1 or op.shape[1] != v.shape[0]:
        raise DimensionError(f"cannot apply {op.shape} operator to {v.shape} vector")
    return op @ v


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(a).T


def expectation(op: np.ndarray, v: np.ndarray) -> complex:
    return inner(v, apply(op, v))


def projector(v: np.ndarray) -> np.ndarray:
    return np.outer(v, np.conj(v))


def expm(a: np.ndarray, tol: float = 1e-16, max_terms: int = 200) -> np.ndarray:
    """Matrix exponential by scaled Taylor series and repeated squaring.

    The input is divided by ``2**s`` so that its 1-norm is at most 1, the
    series is summed until the norm of the next term drops below ``tol``
    (relative to the partial sum) and the result is squared ``s`` times.
    Intended as a verification oracle for tiny matrices, not as a general
    purpose routine.

    Raises
    ------
    ConvergenceError
        If the series has not converged after ``max_terms`` terms.
    """
    a = cmat(a)
    if not 0.0 < tol <= 1e-6:
        raise ValueError(f"tolerance must lie in (0, 1e-6], got {tol}")
    n1 = float(np.max(np.sum(np.abs(a), axis=0)))
    squarings = max(0, math.ceil(math.log2(n1))) if n1 > 1.0 else 0
    scaled = a / (2.0 ** squarings)

    total = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, max_terms + 1):
        term = term @ scaled / k
        total = total + term
        if np.max(np.abs(term)) <= tol * max(1.0, np.max(np.abs(total))):
            break
    else:
        raise ConvergenceError(f"Taylor series did not converge in {max_terms} terms")

    for _ in range(squarings):
        total = total @ total
    return total


def is_unitary(u: np.ndarray, atol: float = 1e-10) -> bool:
    return bool(np.allclose(dagger(u) @ u, np.eye(u.shape[0]), atol=atol, rtol=0))


PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
