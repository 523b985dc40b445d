"""2x2 complex matrix representation of the even spacetime algebra.

``rep`` sends sigma^k to the k-th Pauli matrix and the pseudoscalar to
``1j * Id``.  Spinors of the left ideal are read off as the second column of
their image (``rep(e) = diag(0, 1)``); dotted spinors as the second row.
"""

from __future__ import annotations

import numpy as np

from .clifford import STA, STA_CONSTANTS, Multivector
from .ideals import AlgebraicSpinor, DottedAlgebraicSpinor

ID2 = np.eye(2, dtype=complex)
SIGMA = (
    ID2,
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)
EPSILON = np.array([[0, 1], [-1, 0]], dtype=complex)
# epsilon_{AB} = epsilon^{AB} = adiag(1, -1), the same array
EPSILON_INDEX = EPSILON

SPINOR_COLUMN = 1
DOTTED_ROW = 1

_EVEN_ROWS = np.flatnonzero(STA.grades % 2 == 0)


def _generators():
    c = STA_CONSTANTS
    i = c.pseudoscalar
    elems = [STA.scalar(1.0), *c.sigma_upper[1:], *(i * s for s in c.sigma_upper[1:]), i]
    mats = [ID2, *SIGMA[1:], *(1j * s for s in SIGMA[1:]), 1j * ID2]
    return elems, mats


_ELEMENTS, _MATRICES = _generators()
_ELEMENT_TABLE = np.array([e.coeffs[_EVEN_ROWS] for e in _ELEMENTS])
_TO_GENERATORS = np.linalg.inv(_ELEMENT_TABLE.T)
_MATRIX_STACK = np.array(_MATRICES)


def rep(p: Multivector) -> np.ndarray:
    """Matrix image of an even element of Cl(1,3)."""
    if not isinstance(p, Multivector) or p.signature != STA.signature:
        raise TypeError("rep expects an element of Cl(1,3)")
    if not p.is_even():
        raise ValueError("rep is defined on the even subalgebra only")
    w = _TO_GENERATORS @ p.coeffs[_EVEN_ROWS]
    return np.tensordot(w, _MATRIX_STACK, axes=1)


def unrep(m) -> Multivector:
    """Inverse of :func:`rep`."""
    m = np.asarray(m, dtype=complex).reshape(2, 2)
    a0 = np.trace(m) / 2
    ak = [np.trace(m @ SIGMA[k]) / 2 for k in (1, 2, 3)]
    w = np.array([a0.real, *(a.real for a in ak), *(a.imag for a in ak), a0.imag])
    coeffs = np.zeros(STA.dim)
    coeffs[_EVEN_ROWS] = _ELEMENT_TABLE.T @ w
    return Multivector(STA, coeffs)


def column_of(phi: AlgebraicSpinor) -> np.ndarray:
    return rep(phi.value)[:, SPINOR_COLUMN].copy()


def row_of(xi: DottedAlgebraicSpinor) -> np.ndarray:
    return rep(xi.value)[DOTTED_ROW, :].copy()


def spinor_from_column(col) -> AlgebraicSpinor:
    m = np.zeros((2, 2), dtype=complex)
    m[:, SPINOR_COLUMN] = col
    return AlgebraicSpinor(unrep(m))


def dotted_from_row(row) -> DottedAlgebraicSpinor:
    m = np.zeros((2, 2), dtype=complex)
    m[DOTTED_ROW, :] = row
    return DottedAlgebraicSpinor(unrep(m))


def dotted_of(xi) -> np.ndarray:
    """Row spinor conj(xi) @ epsilon attached to a column spinor."""
    return np.conj(np.asarray(xi, dtype=complex)) @ EPSILON


def lower_index(column) -> np.ndarray:
    """phi_A = phi^B epsilon_{BA}."""
    return np.asarray(column, dtype=complex) @ EPSILON_INDEX


def raise_index(row) -> np.ndarray:
    """phi^B = epsilon^{BA} phi_A."""
    return EPSILON_INDEX @ np.asarray(row, dtype=complex)


def kronecker(column, row) -> np.ndarray:
    return np.outer(np.asarray(column, dtype=complex), np.asarray(row, dtype=complex))


def _raise_lower_sign() -> int:
    signs = set()
    for k in range(2):
        x = np.zeros(2, dtype=complex)
        x[k] = 1.0
        back = raise_index(lower_index(x))
        signs.add(int(round(back[k].real)))
    if len(signs) != 1:
        raise AssertionError("raise(lower(x)) is not a fixed multiple of x")
    return signs.pop()


RAISE_LOWER_SIGN = _raise_lower_sign()


def rep_projector_label() -> str:
    m = rep(STA_CONSTANTS.e_plus)
    return f"diag({m[0, 0].real:g},{m[1, 1].real:g})"
