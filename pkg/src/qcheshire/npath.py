"""N-path generalisation with N-1 two-level properties.

Paths ``j`` and properties ``p`` are 1-based here, as in the usual
statement of the scheme: path 1 is the reference beam and property ``p`` is
flipped (1 -> 0) in path ``j = p + 1`` during preparation. The space is
path (N) x property 1 x ... x property N-1, each property a qubit whose
basis index equals its value.
"""

from __future__ import annotations

import math

import numpy as np

from . import hilbert as hb
from .model import Selection

MAX_PATHS = 6


def _check_n(n: int) -> None:
    if not 2 <= n <= MAX_PATHS:
        raise ValueError(f"number of paths must lie in 2..{MAX_PATHS}, got {n}")


def _check_indices(n: int, p: int | None, j: int) -> None:
    _check_n(n)
    if p is not None and not 1 <= p <= n - 1:
        raise ValueError(f"property index p={p} outside 1..{n - 1}")
    if not 1 <= j <= n:
        raise ValueError(f"path index j={j} outside 1..{n}")


def dim(n: int) -> int:
    _check_n(n)
    return n * 2 ** (n - 1)


def basis_index(n: int, path: int, bits) -> int:
    """Index of ``|path>|b_1,...,b_{N-1}>`` with ``path`` 1-based."""
    idx = path - 1
    for b in bits:
        idx = idx * 2 + int(b)
    return idx


def _chis(n: int, sel: Selection) -> tuple[float, ...]:
    if sel.chi_vec:
        if len(sel.chi_vec) != n:
            raise ValueError(f"selection has {len(sel.chi_vec)} phases for {n} paths")
        return sel.chi_vec
    return (0.0,) * n


def pan_states(n: int, sel: Selection) -> tuple[np.ndarray, np.ndarray]:
    """Preselected ``|i_N>`` and postselected ``|f_N>``."""
    d = dim(n)
    chis = _chis(n, sel)
    ones = [1] * (n - 1)
    i = np.zeros(d, dtype=complex)
    f = np.zeros(d, dtype=complex)
    for path in range(1, n + 1):
        bits = list(ones)
        if path > 1:
            bits[path - 2] = 0
        i[basis_index(n, path, bits)] = 1.0
        f[basis_index(n, path, ones)] = np.exp(1j * chis[path - 1])
    return i / math.sqrt(n), f / math.sqrt(n)


def sigma_x(n: int, p: int) -> np.ndarray:
    factors = [hb.identity(n)] + [hb.identity(2)] * (n - 1)
    factors[p] = hb.PAULI_X
    return hb.tensor(*factors)


def path_projector(n: int, j: int) -> np.ndarray:
    pj = np.zeros((n, n), dtype=complex)
    pj[j - 1, j - 1] = 1.0
    return hb.tensor(pj, hb.identity(2 ** (n - 1)))


def pan_operator(n: int, p: int, j: int, alpha: float) -> np.ndarray:
    """Closed-form ``exp(-i alpha/2 sigma^p_x Pi_j)``."""
    _check_indices(n, p, j)
    proj = path_projector(n, j)
    return (
        hb.identity(dim(n))
        - (1.0 - math.cos(alpha / 2)) * proj
        - 1j * math.sin(alpha / 2) * sigma_x(n, p) @ proj
    )


def pan_absorber(n: int, j: int, absorption: float) -> np.ndarray:
    _check_indices(n, None, j)
    if not 0.0 <= absorption <= 1.0:
        raise ValueError(f"absorption must lie in [0, 1], got {absorption}")
    return hb.identity(dim(n)) - (1.0 - math.sqrt(1.0 - absorption)) * path_projector(n, j)


def pan_intensity(n: int, p: int, j: int, alpha: float, sel: Selection) -> float:
    """``|<f_N|O^p_j(alpha)|i_N>|^2`` by propagating the state."""
    i, f = pan_states(n, sel)
    return abs(hb.inner(f, pan_operator(n, p, j, alpha) @ i)) ** 2


def pan_intensity_closed(n: int, p: int, j: int, alpha: float, sel: Selection) -> float:
    """Exact closed form of :func:`pan_intensity`.

    The cross term oscillates with the phase difference between the
    reference path 1 and the path ``p + 1`` that carries the flipped
    property.
    """
    _check_indices(n, p, j)
    chis = _chis(n, sel)
    s = math.sin(alpha / 2)
    hit = 1.0 if j == p + 1 else 0.0
    ref = 1.0 if j == 1 else 0.0
    dphi = chis[0] - chis[p]
    return (1.0 + 2 * hit * s * math.sin(dphi) + hit * s * s - ref * s * s) / n**2


def pan_absorber_intensity(n: int, j: int, absorption: float, sel: Selection) -> float:
    i, f = pan_states(n, sel)
    return abs(hb.inner(f, pan_absorber(n, j, absorption) @ i)) ** 2


def pan_weak_value(n: int, p: int | None, j: int, sel: Selection) -> complex:
    """Weak value of ``sigma^p_x Pi_j`` (or of ``Pi_j`` when ``p`` is None)."""
    _check_indices(n, p, j)
    i, f = pan_states(n, sel)
    op = path_projector(n, j) if p is None else sigma_x(n, p) @ path_projector(n, j)
    return hb.inner(f, op @ i) / hb.inner(f, i)
