"""Property suites for the algebra layers: products, isomorphisms, ideals."""

from __future__ import annotations

import numpy as np

from .clifford import (
    PAULI,
    QUATERNION,
    STA,
    STA_CONSTANTS,
    Multivector,
    algebra,
    embed_pauli,
    embed_quaternion,
    pauli_split,
    quaternion_to_pauli,
    random_multivector,
)
from .constraints import CheckResult
from .ideals import (
    DOTTED_BASIS,
    DOTTED_THETA,
    E,
    I,
    SPINOR_BASIS,
    THETA,
    AlgebraicSpinor,
    DottedAlgebraicSpinor,
    decompose,
    decompose_dotted,
    iota,
    reconstruct,
    reconstruct_dotted,
    sigma_reconstructions,
)
from .matrices import column_of, kronecker, rep, row_of, unrep

ALGEBRA_TOL = 1e-12
SUITE_ALGEBRAS = ((1, 3), (3, 0), (0, 2), (2, 1), (4, 2))


def _check(name: str, residual: float, tol: float = ALGEBRA_TOL, note: str = "",
           gating: bool = True) -> CheckResult:
    return CheckResult(name, tol, (float(residual),), note=note, gating=gating, margin=1.0)


def _bilinear(alg, u: np.ndarray, v: np.ndarray) -> float:
    squares = np.array([alg.signature.square(k) for k in range(alg.n)], dtype=float)
    return float(np.sum(squares * u * v))


def _vector(alg, c) -> Multivector:
    coeffs = np.zeros(alg.dim)
    for k in range(alg.n):
        coeffs[1 << k] = c[k]
    return Multivector(alg, coeffs)


def algebra_suite(seed: int = 0, n: int = 1000) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    out = []
    for p, q in SUITE_ALGEBRAS:
        alg = algebra(p, q)
        assoc = anti = 0.0
        for _ in range(n):
            a, b, c = (random_multivector(alg, rng) for _ in range(3))
            assoc = max(assoc, ((a * b) * c - a * (b * c)).norm())
            u, v = rng.integers(-4, 5, size=(2, alg.n)).astype(float)
            uu, vv = _vector(alg, u), _vector(alg, v)
            anti = max(anti, (uu * vv + vv * uu - 2.0 * _bilinear(alg, u, v)).norm())
        label = f"Cl({p},{q})"
        out.append(_check(f"associativity {label}", assoc, note=f"{n} random triples"))
        out.append(_check(f"anticommutation {label}", anti, note=f"{n} random vector pairs"))

    c = STA_CONSTANTS
    sig = c.sigma_upper
    pauli_prod = paravector = 0.0
    for _ in range(n):
        u, v = rng.integers(-4, 5, size=(2, 3)).astype(float)
        uu = sum(u[k] * sig[k + 1] for k in range(3))
        vv = sum(v[k] * sig[k + 1] for k in range(3))
        cross = np.cross(u, v)
        expected = float(u @ v) + c.pseudoscalar * sum(cross[k] * sig[k + 1] for k in range(3))
        pauli_prod = max(pauli_prod, (uu * vv - expected).norm())
        al, be = rng.integers(-4, 5, size=(2, 4)).astype(float)
        s_a = sum(al[k] * c.sigma_lower[k] for k in range(4))
        s_b = sum(be[k] * c.sigma_lower[k] for k in range(4))
        sc_a = sum(al[k] * c.sigma_check[k] for k in range(4))
        sc_b = sum(be[k] * c.sigma_check[k] for k in range(4))
        eta = al[0] * be[0] - al[1:] @ be[1:]
        paravector = max(paravector, (s_a * sc_b + s_b * sc_a + 2.0 * eta).norm())
    out.append(_check("pauli products sigma^i sigma^j", pauli_prod,
                      note="u v = u.v + i (u x v).sigma on random vectors"))
    out.append(_check("paravector relation", paravector,
                      note="sigma_a sigma-check_b + sigma_b sigma-check_a = -2 eta_ab"))
    return out


def isomorphism_suite(seed: int = 0, n: int = 500) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    hp = hq = hqp = hrep = split = 0.0
    roundtrip = 0.0
    for _ in range(n):
        a, b = random_multivector(PAULI, rng), random_multivector(PAULI, rng)
        hp = max(hp, (embed_pauli(a * b) - embed_pauli(a) * embed_pauli(b)).norm())
        q1, q2 = pauli_split(a)
        split = max(split, (embed_pauli(q1) + I * embed_pauli(q2) - embed_pauli(a)).norm())
        x, y = random_multivector(QUATERNION, rng), random_multivector(QUATERNION, rng)
        hq = max(hq, (embed_quaternion(x * y) - embed_quaternion(x) * embed_quaternion(y)).norm())
        hqp = max(hqp, (quaternion_to_pauli(x * y) - quaternion_to_pauli(x) * quaternion_to_pauli(y)).norm())
        u, v = random_multivector(STA, rng, even=True), random_multivector(STA, rng, even=True)
        hrep = max(hrep, float(np.max(np.abs(rep(u * v) - rep(u) @ rep(v)))))
        # dyadic coefficients are exactly representable, so the round trip must be exact
        d = Multivector(STA, u.coeffs / 8.0)
        roundtrip = max(roundtrip, (unrep(rep(d)) - d).norm())
    return [
        _check("embed_pauli homomorphism", hp, note=f"{n} random pairs"),
        _check("embed_quaternion homomorphism", hq, note=f"{n} random pairs"),
        _check("quaternion_to_pauli homomorphism", hqp, note=f"{n} random pairs"),
        _check("pauli split P = Q1 + i Q2", split),
        _check("rep homomorphism", hrep, note=f"{n} random even pairs"),
        _check("rep/unrep round trip (dyadic)", roundtrip, tol=0.0),
    ]


def ideal_suite(seed: int = 0, n: int = 500) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    target = (STA.scalar(1.0),) + STA_CONSTANTS.sigma_lower[1:]
    aligned = max((r - t).norm() for r, t in zip(sigma_reconstructions(), target))
    literal = max((r - t).norm() for r, t in zip(sigma_reconstructions(THETA, DOTTED_THETA), target))
    rt = rt_dot = kron = 0.0
    for _ in range(n):
        phi = AlgebraicSpinor(random_multivector(STA, rng, even=True, integer=False) * E)
        xi = DottedAlgebraicSpinor(E * random_multivector(STA, rng, even=True, integer=False))
        rt = max(rt, (reconstruct(decompose(phi)).value - phi.value).norm())
        rt_dot = max(rt_dot, (reconstruct_dotted(decompose_dotted(xi)).value - xi.value).norm())
        kron = max(kron, float(np.max(np.abs(rep(iota(phi, xi)) - kronecker(column_of(phi), row_of(xi))))))
    basis_images = max(
        float(np.max(np.abs(column_of(AlgebraicSpinor(s)) - np.eye(2)[k]))) for k, s in enumerate(SPINOR_BASIS)
    )
    basis_images = max(basis_images, max(
        float(np.max(np.abs(row_of(DottedAlgebraicSpinor(s)) - np.eye(2)[k]))) for k, s in enumerate(DOTTED_BASIS)
    ))
    return [
        _check("idempotent e^2 = e", (E * E - E).norm(), tol=0.0),
        _check("sigma reconstructions", aligned, tol=0.0,
               note="matrix-aligned bases (-sigma_1 e, e) and (-e sigma_1, e)"),
        _check("sigma reconstructions, (e, sigma_1 e) bases", literal, tol=0.0, gating=False,
               note="diagnostic: sigma_1 and sigma_3 come out with flipped sign"),
        _check("spinor bases map to unit columns/rows", basis_images, tol=0.0),
        _check("decompose/reconstruct round trip", rt, note=f"{n} random spinors"),
        _check("dotted decompose/reconstruct round trip", rt_dot, note=f"{n} random spinors"),
        _check("rep of iota equals kronecker product", kron, note=f"{n} random pairs"),
    ]


SUITES = {
    "algebra": algebra_suite,
    "isomorphism": isomorphism_suite,
    "ideal": ideal_suite,
}


def run_selftest(seed: int = 0) -> dict[str, list[CheckResult]]:
    return {name: fn(seed) for name, fn in SUITES.items()}
