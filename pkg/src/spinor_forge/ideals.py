"""Algebraic spinors: minimal ideals of the even spacetime algebra.

Undotted spinors live in the left ideal ``I = Cl(1,3)^(0) e`` and dotted
spinors in the right ideal ``eCl(1,3)^(0)``, with ``e = (1 + sigma_3)/2``.
The complex unit acting on both is the central pseudoscalar ``i``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import STA, STA_CONSTANTS, Multivector, SignatureError

MEMBERSHIP_RTOL = 1e-10

E = STA_CONSTANTS.e_plus
I = STA_CONSTANTS.pseudoscalar
SIGMA1 = STA_CONSTANTS.sigma_lower[1]

# coordinate bases: phi = phi^1 theta_1 + phi^2 theta_2
THETA = (E, SIGMA1 * E)
DOTTED_THETA = (E, E * SIGMA1)

# Bases whose matrix images are the standard column/row unit vectors under
# matrices.rep with second-column / second-row extraction.  These are the
# s_A, s^A-dot for which the sigma reconstruction identities hold exactly.
SPINOR_BASIS = (-(SIGMA1 * E), E)
DOTTED_BASIS = (-(E * SIGMA1), E)


class IdealMembershipError(ValueError):
    pass


def _check_member(value: Multivector, left: bool) -> None:
    if not isinstance(value, Multivector) or value.signature != STA.signature:
        raise SignatureError("spinors are elements of Cl(1,3)")
    scale = max(value.norm(), 1.0)
    if not value.is_even(MEMBERSHIP_RTOL * scale):
        raise IdealMembershipError("spinor value is not even")
    projected = value * E if left else E * value
    if (projected - value).norm() > MEMBERSHIP_RTOL * scale:
        side = "phi e = phi" if left else "e xi = xi"
        raise IdealMembershipError(f"value violates ideal condition {side}")


@dataclass(frozen=True)
class AlgebraicSpinor:
    """Element of the minimal left ideal ``Cl(1,3)^(0) e``."""

    value: Multivector

    def __post_init__(self):
        _check_member(self.value, left=True)

    def __add__(self, other: "AlgebraicSpinor") -> "AlgebraicSpinor":
        return AlgebraicSpinor(self.value + other.value)

    def __sub__(self, other: "AlgebraicSpinor") -> "AlgebraicSpinor":
        return AlgebraicSpinor(self.value - other.value)


@dataclass(frozen=True)
class DottedAlgebraicSpinor:
    """Element of the minimal right ideal ``e Cl(1,3)^(0)``."""

    value: Multivector

    def __post_init__(self):
        _check_member(self.value, left=False)

    def __add__(self, other: "DottedAlgebraicSpinor") -> "DottedAlgebraicSpinor":
        return DottedAlgebraicSpinor(self.value + other.value)

    def __sub__(self, other: "DottedAlgebraicSpinor") -> "DottedAlgebraicSpinor":
        return DottedAlgebraicSpinor(self.value - other.value)


ComplexPair = tuple[complex, complex]


def complex_scale(z: complex, mv: Multivector) -> Multivector:
    """Multiply by ``Re z + i Im z`` with ``i`` the pseudoscalar."""
    z = complex(z)
    return z.real * mv + z.imag * (I * mv)


def project_left(p: Multivector) -> AlgebraicSpinor:
    if not p.is_even():
        raise ValueError("project_left needs an even multivector")
    return AlgebraicSpinor(p * E)


def project_right(p: Multivector) -> DottedAlgebraicSpinor:
    if not p.is_even():
        raise ValueError("project_right needs an even multivector")
    return DottedAlgebraicSpinor(E * p)


def _dual(basis: tuple[Multivector, Multivector]) -> np.ndarray:
    real_basis = np.array([basis[0].coeffs, (I * basis[0]).coeffs,
                           basis[1].coeffs, (I * basis[1]).coeffs])
    gram = real_basis @ real_basis.T
    return np.linalg.solve(gram, real_basis)


_THETA_DUAL = _dual(THETA)
_DOTTED_DUAL = _dual(DOTTED_THETA)


def decompose(phi: AlgebraicSpinor) -> ComplexPair:
    """Complex coordinates (phi^1, phi^2) of ``phi`` on (theta_1, theta_2)."""
    if not isinstance(phi, AlgebraicSpinor):
        phi = AlgebraicSpinor(phi)
    a, b, c, d = _THETA_DUAL @ phi.value.coeffs
    return complex(a, b), complex(c, d)


def reconstruct(pair: ComplexPair) -> AlgebraicSpinor:
    return AlgebraicSpinor(complex_scale(pair[0], THETA[0]) + complex_scale(pair[1], THETA[1]))


def decompose_dotted(xi: DottedAlgebraicSpinor) -> ComplexPair:
    """Coordinates of a dotted spinor on (e, e sigma_1)."""
    if not isinstance(xi, DottedAlgebraicSpinor):
        xi = DottedAlgebraicSpinor(xi)
    a, b, c, d = _DOTTED_DUAL @ xi.value.coeffs
    return complex(a, b), complex(c, d)


def reconstruct_dotted(pair: ComplexPair) -> DottedAlgebraicSpinor:
    return DottedAlgebraicSpinor(
        complex_scale(pair[0], DOTTED_THETA[0]) + complex_scale(pair[1], DOTTED_THETA[1])
    )


def iota(phi: AlgebraicSpinor, xi: DottedAlgebraicSpinor) -> Multivector:
    """The Clifford product phi xi-dot, an even multivector."""
    if not isinstance(phi, AlgebraicSpinor):
        phi = AlgebraicSpinor(phi)
    if not isinstance(xi, DottedAlgebraicSpinor):
        xi = DottedAlgebraicSpinor(xi)
    return phi.value * xi.value


def sigma_reconstructions(
    spinors: tuple[Multivector, Multivector] = SPINOR_BASIS,
    dotted: tuple[Multivector, Multivector] = DOTTED_BASIS,
) -> tuple[Multivector, Multivector, Multivector, Multivector]:
    """Reassemble sigma_0..sigma_3 from products of basis spinors.

    Returns the four right-hand sides

        s1 s^1 + s2 s^2,  -(s1 s^2 + s2 s^1),  i(s1 s^2 - s2 s^1),  -(s1 s^1 - s2 s^2)

    which equal 1, sigma_1, sigma_2, sigma_3 for the default bases.
    """
    s1, s2 = spinors
    d1, d2 = dotted
    return (
        s1 * d1 + s2 * d2,
        -(s1 * d2 + s2 * d1),
        I * (s1 * d2 - s2 * d1),
        -(s1 * d1 - s2 * d2),
    )


def _component_matrix() -> np.ndarray:
    cols = []
    for a in range(2):
        for b in range(2):
            prod = SPINOR_BASIS[a] * DOTTED_BASIS[b]
            cols.append(prod.coeffs)
            cols.append((I * prod).coeffs)
    return np.array(cols).T


_COMPONENTS = _component_matrix()
_EVEN_ROWS = np.flatnonzero(STA.grades % 2 == 0)
_COMPONENTS_INV = np.linalg.inv(_COMPONENTS[_EVEN_ROWS])


def pauli_from_spinor_components(x, y) -> Multivector:
    """Build ``sum (X + iY)^A_B s_A s^B`` over the matrix-aligned spinor bases."""
    x = np.asarray(x, dtype=float).reshape(2, 2)
    y = np.asarray(y, dtype=float).reshape(2, 2)
    weights = np.empty(8)
    weights[0::2] = x.ravel()
    weights[1::2] = y.ravel()
    return Multivector(STA, _COMPONENTS @ weights)


def spinor_components_from_pauli(p: Multivector) -> tuple[np.ndarray, np.ndarray]:
    if not p.is_even():
        raise ValueError("expected an even multivector")
    w = _COMPONENTS_INV @ p.coeffs[_EVEN_ROWS]
    return w[0::2].reshape(2, 2), w[1::2].reshape(2, 2)
