"""Spin connection of a tetrad and the derivatives built from it.

``omega[c, a, b]`` holds omega^c_{ab} with ``D_{e_a} e_b = omega^c_{ab} e_c``.
The bivector ``omega_{e_a} = 1/2 omega_a^{bc} e_b e_c`` uses
``omega_a^{bc} = omega^b_{ad} eta^{dc}``, which is the placement that makes
``D_{e_a} v = 1/2 [omega_{e_a}, v]`` on frame vectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .clifford import STA, STA_CONSTANTS, Multivector, commutator
from .geometry import (
    ETA,
    Spacetime,
    Tetrad,
    christoffel,
    gradient,
    paravectors_from_h,
    require_tetrad,
)
from .ideals import AlgebraicSpinor, DottedAlgebraicSpinor, iota
from .matrices import EPSILON, rep

C = STA_CONSTANTS
E_LOWER = C.m_lower
E0_UPPER = C.m_upper[0]

# Which operand order is used by omega_from_q by default.  The order with the
# checked paravector on the left of the bracket reproduces -omega^dagger.
OMEGA_FROM_Q_FORM = "q_mu (d q-check^mu + Gamma q-check)"


@dataclass(frozen=True)
class SpinConnectionAtPoint:
    x: np.ndarray
    h: np.ndarray  # h^a_m
    inv: np.ndarray  # inv[m, a] = h_a^m
    omega: np.ndarray  # omega^c_{ab} as [c, a, b]
    omega_up: np.ndarray  # omega_a^{bc} as [a, b, c]
    bivectors: tuple[Multivector, ...]  # omega_{e_a}
    matrices: tuple[np.ndarray, ...]  # Omega_{e_a}

    def coordinate(self, rho: int) -> Multivector:
        """omega_rho = h^a_rho omega_{e_a}."""
        return combine(self.h[:, rho], self.bivectors)

    def frame_derivative(self, a: int, b: int) -> Multivector:
        """D_{e_a} e_b as a vector of the spacetime algebra."""
        return combine(self.omega[:, a, b], E_LOWER)

    def antisymmetry_residual(self) -> float:
        return float(np.max(np.abs(self.omega_up + np.swapaxes(self.omega_up, 1, 2))))


def combine(weights, mvs) -> Multivector:
    return Multivector(STA, np.asarray(weights, dtype=float) @ np.array([m.coeffs for m in mvs]))


def _pair_table() -> np.ndarray:
    return np.array([[(E_LOWER[b] * E_LOWER[c]).coeffs for c in range(4)] for b in range(4)])


_PAIRS = _pair_table()


def bivector_from_coefficients(w_up: np.ndarray) -> Multivector:
    """1/2 w^{bc} e_b e_c."""
    return Multivector(STA, 0.5 * np.einsum("bc,bck->k", w_up, _PAIRS))


def spin_connection(s: Spacetime, t: Tetrad, x, check: bool = True) -> SpinConnectionAtPoint:
    x = np.asarray(x, dtype=float)
    if check:
        require_tetrad(s, t, x)
    h = t.h(x)
    inv = np.linalg.inv(h)
    dinv = gradient(t.inverse, x)  # dinv[n, g, b] = d_n h_b^g
    G = christoffel(s, x)
    inner = dinv + np.einsum("gnm,mb->ngb", G, inv)
    omega = np.einsum("cg,na,ngb->cab", h, inv, inner)
    omega_up = np.einsum("bad,dc->abc", omega, ETA)
    # only the antisymmetric part is a bivector; the remainder is stencil noise
    anti = 0.5 * (omega_up - np.swapaxes(omega_up, 1, 2))
    biv = tuple(bivector_from_coefficients(anti[a]) for a in range(4))
    mats = tuple(rep(b) for b in biv)
    return SpinConnectionAtPoint(x, h, inv, omega, omega_up, biv, mats)


# ---------------------------------------------------------------------------
# Hermitian structure


def dagger(mv: Multivector) -> Multivector:
    """omega^dagger = -e^0 omega e^0."""
    return -(E0_UPPER * mv * E0_UPPER)


def _mnorm(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


@dataclass(frozen=True)
class HermitianResiduals:
    dagger: float  # rep(-e^0 w e^0) vs Omega^H
    epsilon_conjugate: float  # Omega vs eps Omega^H eps
    epsilon_transpose: float  # Omega vs eps Omega^T eps (diagnostic)


def hermitian_residuals_of(w: Multivector) -> HermitianResiduals:
    m = rep(w)
    mh = m.conj().T
    return HermitianResiduals(
        _mnorm(rep(dagger(w)) - mh),
        _mnorm(m - EPSILON @ mh @ EPSILON),
        _mnorm(m - EPSILON @ m.T @ EPSILON),
    )


def hermitian_checks(sc: SpinConnectionAtPoint) -> HermitianResiduals:
    rs = [hermitian_residuals_of(b) for b in sc.bivectors]
    return HermitianResiduals(
        max(r.dagger for r in rs),
        max(r.epsilon_conjugate for r in rs),
        max(r.epsilon_transpose for r in rs),
    )


# ---------------------------------------------------------------------------
# covariant derivatives of fields


def _coeff_field(field: Callable) -> Callable[[np.ndarray], np.ndarray]:
    def f(y):
        v = field(y)
        if isinstance(v, (AlgebraicSpinor, DottedAlgebraicSpinor)):
            v = v.value
        return v.coeffs

    return f


def directional(sc: SpinConnectionAtPoint, a: int, field: Callable) -> Multivector:
    """h_a^n d_n applied coefficientwise to a multivector-valued field."""
    grad = gradient(_coeff_field(field), sc.x)
    return Multivector(STA, sc.inv[:, a] @ grad)


def _value(v):
    return v.value if isinstance(v, (AlgebraicSpinor, DottedAlgebraicSpinor)) else v


def cov_deriv_spinor(sc: SpinConnectionAtPoint, a: int, phi: Callable) -> AlgebraicSpinor:
    here = _value(phi(sc.x))
    return AlgebraicSpinor(directional(sc, a, phi) + 0.5 * (sc.bivectors[a] * here))


def cov_deriv_dotted(sc: SpinConnectionAtPoint, a: int, xi: Callable) -> DottedAlgebraicSpinor:
    here = _value(xi(sc.x))
    return DottedAlgebraicSpinor(directional(sc, a, xi) - 0.5 * (here * sc.bivectors[a]))


def cov_deriv_pauli(sc: SpinConnectionAtPoint, a: int, P: Callable) -> Multivector:
    return directional(sc, a, P) + 0.5 * commutator(sc.bivectors[a], P(sc.x))


def leibniz_residual(sc: SpinConnectionAtPoint, a: int, phi: Callable, xi: Callable) -> float:
    """|D(phi xi) - (D phi) xi - phi (D xi)| for spinor fields."""
    lhs = cov_deriv_pauli(sc, a, lambda y: iota(phi(y), xi(y)))
    rhs = (iota(cov_deriv_spinor(sc, a, phi), xi(sc.x))
           + iota(phi(sc.x), cov_deriv_dotted(sc, a, xi)))
    return (lhs - rhs).norm()


# ---------------------------------------------------------------------------
# Sachs' paravector derivatives


@dataclass(frozen=True)
class QDerivatives:
    """Everything about q needed at one point, computed once."""

    sc: SpinConnectionAtPoint
    gamma: np.ndarray
    q: tuple[Multivector, ...]
    q_check: tuple[Multivector, ...]
    q_up: tuple[Multivector, ...]  # q^m = g^{mn} q_n
    q_check_up: tuple[Multivector, ...]
    dq: np.ndarray  # dq[n, m] = coefficients of d_n q_m
    dq_check_up: np.ndarray
    dq_up: np.ndarray

    def partial_q(self, mu: int, nu: int) -> Multivector:
        return Multivector(STA, self.dq[nu, mu])


def _q_coeffs(s: Spacetime, t: Tetrad, y) -> np.ndarray:
    """[q_m, q-check_m, q^m, q-check^m] coefficient arrays at y."""
    p = paravectors_from_h(t.h(y))
    q = np.array([m.coeffs for m in p.q])
    qc = np.array([m.coeffs for m in p.q_check])
    ginv = np.linalg.inv(s.metric(y))
    return np.array([q, qc, ginv @ q, ginv @ qc])


def q_derivatives(s: Spacetime, t: Tetrad, x) -> QDerivatives:
    sc = spin_connection(s, t, x)
    here = _q_coeffs(s, t, sc.x)
    grad = gradient(lambda y: _q_coeffs(s, t, y), sc.x)  # [n, which, m, k]
    mv = lambda arr: tuple(Multivector(STA, c) for c in arr)  # noqa: E731
    return QDerivatives(
        sc=sc,
        gamma=christoffel(s, sc.x),
        q=mv(here[0]),
        q_check=mv(here[1]),
        q_up=mv(here[2]),
        q_check_up=mv(here[3]),
        dq=grad[:, 0],
        dq_check_up=grad[:, 3],
        dq_up=grad[:, 2],
    )


def _gamma_q(qd: QDerivatives, mu: int, nu: int) -> Multivector:
    return combine(qd.gamma[:, nu, mu], qd.q)


def sachs_deriv_q(qd: QDerivatives, mu: int, nu: int) -> Multivector:
    """d_nu q_mu + 1/2 omega_nu q_mu + 1/2 q_mu omega_nu^dagger."""
    w = qd.sc.coordinate(nu)
    q = qd.q[mu]
    return qd.partial_q(mu, nu) + 0.5 * (w * q) + 0.5 * (q * dagger(w))


def clifford_deriv_q(qd: QDerivatives, mu: int, nu: int) -> Multivector:
    """Clifford-field derivative d_nu q_mu + 1/2 [omega_nu, q_mu]."""
    w = qd.sc.coordinate(nu)
    return qd.partial_q(mu, nu) + 0.5 * commutator(w, qd.q[mu])


def product_rule_q(qd: QDerivatives, mu: int, nu: int) -> Multivector:
    """(D_nu e_mu) e_0 + e_mu (D_nu e_0) = Gamma^a_{nu mu} q_a + e_mu (D_nu e_0)."""
    sc = qd.sc
    e_mu = combine(sc.h[:, mu], E_LOWER)
    d_e0 = combine(sc.omega[:, :, 0] @ sc.h[:, nu], E_LOWER)
    return _gamma_q(qd, mu, nu) + e_mu * d_e0


def sachs_total_deriv(qd: QDerivatives, mu: int, nu: int) -> Multivector:
    """D^S_nu q_mu = D_nu q_mu - Gamma^a_{nu mu} q_a; vanishes identically."""
    return sachs_deriv_q(qd, mu, nu) - _gamma_q(qd, mu, nu)


def sachs_total_max(qd: QDerivatives) -> float:
    return max(sachs_total_deriv(qd, m, n).norm() for m in range(4) for n in range(4))


def omega_from_q(qd: QDerivatives, rho: int, printed: bool = False) -> Multivector:
    """Reconstruct omega_rho from the paravector field.

    Default: -1/2 q_m (d_rho q-check^m + Gamma^m_{rho t} q-check^t).
    ``printed=True`` swaps the roles of q and q-check, which yields
    -omega_rho^dagger instead.
    """
    left = qd.q_check if printed else qd.q
    up = qd.q_up if printed else qd.q_check_up
    dup = qd.dq_up if printed else qd.dq_check_up
    acc = STA.zero()
    for m in range(4):
        inner = Multivector(STA, dup[rho, m]) + combine(qd.gamma[m, rho, :], up)
        acc = acc + left[m] * inner
    return -0.5 * acc


def trace_identities(qd: QDerivatives) -> tuple[float, float]:
    """Residuals of q^m q-check_m = -4 and max_rho |q^m omega_rho q-check_m|."""
    up = qd.q_up
    s = STA.zero()
    for m in range(4):
        s = s + up[m] * qd.q_check[m]
    first = (s + 4.0).norm()
    second = 0.0
    for rho in range(4):
        w = qd.sc.coordinate(rho)
        acc = STA.zero()
        for m in range(4):
            acc = acc + up[m] * w * qd.q_check[m]
        second = max(second, acc.norm())
    return first, second


# ---------------------------------------------------------------------------
# Dirac-gamma identity


def dirac_identity_residual(sc: SpinConnectionAtPoint, a: int, b: int) -> float:
    """|omega^c_{ab} e_c - 1/2 omega_{e_a} e_b + 1/2 e_b omega_{e_a}|."""
    w = sc.bivectors[a]
    e_b = E_LOWER[b]
    return (sc.frame_derivative(a, b) - 0.5 * (w * e_b) + 0.5 * (e_b * w)).norm()


_SIGMA_MATS = tuple(rep(s) for s in C.sigma_lower)


def dirac_matrix_residual(sc: SpinConnectionAtPoint, a: int, b: int) -> float:
    """Even image of the identity (right-multiplied by e_0) in 2x2 matrices."""
    lhs = sum(sc.omega[c, a, b] * _SIGMA_MATS[c] for c in range(4))
    om = sc.matrices[a]
    sb = _SIGMA_MATS[b]
    return _mnorm(lhs - 0.5 * om @ sb - 0.5 * sb @ om.conj().T)
