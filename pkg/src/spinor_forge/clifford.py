"""Real Clifford algebras Cl(p, q) on a dense blade-bitmask basis.

A multivector of Cl(p, q) stores ``2**(p+q)`` real coefficients.  The
coefficient at bitmask ``b`` multiplies the blade built from the basis
vectors whose bits are set in ``b``, taken in increasing index order.
Basis vector ``k`` squares to +1 when ``k < p`` and to -1 otherwise.

The module also carries the three concrete algebras used throughout the
package: the spacetime algebra Cl(1,3), the Pauli algebra Cl(3,0) and the
quaternions Cl(0,2), with the embeddings between them.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

MAX_DIMENSION = 6


class SignatureError(ValueError):
    """Operands live in different algebras, or in the wrong one."""


@dataclass(frozen=True)
class Signature:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 0 or self.q < 0:
            raise ValueError(f"negative signature ({self.p}, {self.q})")
        if self.p + self.q > MAX_DIMENSION:
            raise ValueError(f"dimension {self.p + self.q} exceeds {MAX_DIMENSION}")

    @property
    def n(self) -> int:
        return self.p + self.q

    def square(self, k: int) -> int:
        """Square of basis vector ``k`` (+1 or -1)."""
        return 1 if k < self.p else -1


def _reorder_sign(a: int, b: int) -> int:
    # number of transpositions needed to merge blade a followed by blade b
    swaps = 0
    a >>= 1
    while a:
        swaps += bin(a & b).count("1")
        a >>= 1
    return -1 if swaps & 1 else 1


class Algebra:
    """Product tables for one signature.  Obtain instances through :func:`algebra`."""

    def __init__(self, signature: Signature, prefix: str = "e"):
        self.signature = signature
        self.prefix = prefix
        self.n = signature.n
        self.dim = 1 << self.n
        idx = np.arange(self.dim)
        self.grades = np.array([bin(b).count("1") for b in idx])
        sign = np.empty((self.dim, self.dim))
        for a in range(self.dim):
            for b in range(self.dim):
                s = _reorder_sign(a, b)
                common = a & b
                for k in range(self.n):
                    if common >> k & 1:
                        s *= signature.square(k)
                sign[a, b] = s
        self.sign = sign
        self.index = idx[:, None] ^ idx[None, :]
        self.wedge_mask = (idx[:, None] & idx[None, :]) == 0
        self.lc_mask = (idx[:, None] & idx[None, :]) == idx[:, None]
        self._flat_index = self.index.ravel()

    def __repr__(self):
        return f"Algebra(Cl({self.signature.p},{self.signature.q}))"

    # construction helpers

    def scalar(self, value: float = 1.0) -> "Multivector":
        c = np.zeros(self.dim)
        c[0] = value
        return Multivector(self, c)

    def zero(self) -> "Multivector":
        return Multivector(self, np.zeros(self.dim))

    def blade(self, mask: int, value: float = 1.0) -> "Multivector":
        if not 0 <= mask < self.dim:
            raise IndexError(f"bitmask {mask} out of range for {self}")
        c = np.zeros(self.dim)
        c[mask] = value
        return Multivector(self, c)

    def vector(self, k: int) -> "Multivector":
        if not 0 <= k < self.n:
            raise IndexError(f"basis vector {k} out of range for {self}")
        return self.blade(1 << k)

    def basis(self) -> list["Multivector"]:
        return [self.blade(b) for b in range(self.dim)]

    def blade_name(self, mask: int) -> str:
        if mask == 0:
            return "1"
        return "^".join(f"{self.prefix}{k}" for k in range(self.n) if mask >> k & 1)

    def _product(self, a: np.ndarray, b: np.ndarray, mask: np.ndarray | None = None) -> np.ndarray:
        terms = np.outer(a, b) * self.sign
        if mask is not None:
            terms = terms * mask
        return np.bincount(self._flat_index, weights=terms.ravel(), minlength=self.dim)


@lru_cache(maxsize=None)
def algebra(p: int, q: int) -> Algebra:
    """Shared :class:`Algebra` for signature (p, q)."""
    prefix = "m" if (p, q) == (1, 3) else "e"
    return Algebra(Signature(p, q), prefix)


@contextlib.contextmanager
def corrupted_product_table(alg: Algebra, a: int = 1, b: int = 2) -> Iterator[None]:
    """Flip one sign in ``alg``'s product table while the block runs.

    Test-only negative control for the algebra self-test.
    """
    original = alg.sign
    broken = original.copy()
    broken[a, b] = -broken[a, b]
    alg.sign = broken
    try:
        yield
    finally:
        alg.sign = original


class Multivector:
    """Immutable element of a real Clifford algebra."""

    __slots__ = ("algebra", "coeffs")

    def __init__(self, alg: Algebra, coeffs: Sequence[float] | np.ndarray):
        arr = np.array(coeffs, dtype=float)
        if arr.shape != (alg.dim,):
            raise ValueError(f"expected {alg.dim} coefficients, got shape {arr.shape}")
        arr.flags.writeable = False
        object.__setattr__(self, "algebra", alg)
        object.__setattr__(self, "coeffs", arr)

    def __setattr__(self, name, value):
        raise AttributeError("Multivector is immutable")

    @property
    def signature(self) -> Signature:
        return self.algebra.signature

    @property
    def scalar(self) -> float:
        return float(self.coeffs[0])

    def _check(self, other: "Multivector") -> None:
        if other.algebra.signature != self.algebra.signature:
            raise SignatureError(
                f"signature mismatch: Cl({self.signature.p},{self.signature.q}) vs "
                f"Cl({other.signature.p},{other.signature.q})"
            )

    def _coerce(self, other) -> "Multivector | None":
        if isinstance(other, Multivector):
            self._check(other)
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return self.algebra.scalar(float(other))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Multivector(self.algebra, self.coeffs + o.coeffs)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Multivector(self.algebra, self.coeffs - o.coeffs)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return Multivector(self.algebra, o.coeffs - self.coeffs)

    def __neg__(self):
        return Multivector(self.algebra, -self.coeffs)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, Multivector):
            return geometric_product(self, other)
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self.algebra, self.coeffs * float(other))
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self.algebra, self.coeffs * float(other))
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Multivector(self.algebra, self.coeffs / float(other))
        return NotImplemented

    def __xor__(self, other):
        if isinstance(other, Multivector):
            return wedge(self, other)
        return NotImplemented

    def __lshift__(self, other):
        if isinstance(other, Multivector):
            return left_contraction(self, other)
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.signature == other.signature and np.array_equal(self.coeffs, other.coeffs)

    __hash__ = None

    def grade(self, k: int) -> "Multivector":
        return grade_projection(self, k)

    def even(self) -> "Multivector":
        return even_part(self)

    def odd(self) -> "Multivector":
        return self - even_part(self)

    def reverse(self) -> "Multivector":
        g = self.algebra.grades
        flip = np.where((g * (g - 1) // 2) % 2 == 1, -1.0, 1.0)
        return Multivector(self.algebra, self.coeffs * flip)

    def is_even(self, tol: float = 0.0) -> bool:
        odd = self.coeffs[self.algebra.grades % 2 == 1]
        return bool(np.all(np.abs(odd) <= tol))

    def norm(self) -> float:
        """Max absolute coefficient in the blade basis."""
        return float(np.max(np.abs(self.coeffs)))

    def allclose(self, other: "Multivector", atol: float = 1e-12) -> bool:
        self._check(other)
        return bool(np.max(np.abs(self.coeffs - other.coeffs)) <= atol)

    def __repr__(self):
        terms = []
        for mask in range(self.algebra.dim):
            c = self.coeffs[mask]
            if c != 0.0:
                terms.append(f"{c:+g}*{self.algebra.blade_name(mask)}")
        body = " ".join(terms) if terms else "0"
        return f"<Cl({self.signature.p},{self.signature.q}) {body}>"


def _same(a: Multivector, b: Multivector) -> None:
    if not isinstance(a, Multivector) or not isinstance(b, Multivector):
        raise TypeError("operands must be multivectors")
    a._check(b)


def geometric_product(a: Multivector, b: Multivector) -> Multivector:
    _same(a, b)
    return Multivector(a.algebra, a.algebra._product(a.coeffs, b.coeffs))


def wedge(a: Multivector, b: Multivector) -> Multivector:
    """Outer product: the grade r+s part of each grade-r by grade-s blade product."""
    _same(a, b)
    return Multivector(a.algebra, a.algebra._product(a.coeffs, b.coeffs, a.algebra.wedge_mask))


def left_contraction(a: Multivector, b: Multivector) -> Multivector:
    """Grade s-r part of each grade-r by grade-s blade product, zero when r > s."""
    _same(a, b)
    return Multivector(a.algebra, a.algebra._product(a.coeffs, b.coeffs, a.algebra.lc_mask))


def scalar_product(a: Multivector, b: Multivector) -> float:
    _same(a, b)
    return geometric_product(a, b).scalar


def grade_projection(a: Multivector, k: int) -> Multivector:
    if not 0 <= k <= a.algebra.n:
        raise ValueError(f"grade {k} out of range 0..{a.algebra.n}")
    return Multivector(a.algebra, np.where(a.algebra.grades == k, a.coeffs, 0.0))


def even_part(a: Multivector) -> Multivector:
    return Multivector(a.algebra, np.where(a.algebra.grades % 2 == 0, a.coeffs, 0.0))


def commutator(a: Multivector, b: Multivector) -> Multivector:
    return geometric_product(a, b) - geometric_product(b, a)


def random_multivector(alg: Algebra, rng: np.random.Generator, low: int = -4, high: int = 4,
                       integer: bool = True, even: bool = False) -> Multivector:
    """Random element with small-integer (exactly multipliable) or uniform coefficients."""
    if integer:
        c = rng.integers(low, high + 1, size=alg.dim).astype(float)
    else:
        c = rng.uniform(low, high, size=alg.dim)
    mv = Multivector(alg, c)
    return even_part(mv) if even else mv


# ---------------------------------------------------------------------------
# Concrete algebras

STA = algebra(1, 3)
PAULI = algebra(3, 0)
QUATERNION = algebra(0, 2)


@dataclass(frozen=True)
class SpacetimeConstants:
    """Named elements of the spacetime algebra Cl(1,3).

    Basis vector ``k`` of :data:`STA` is ``m_k``; the reciprocal vectors are
    ``m^0 = m_0`` and ``m^k = -m_k``.  ``sigma_upper[0]`` and
    ``sigma_lower[0]`` are the scalar 1.
    """

    m_lower: tuple[Multivector, ...]
    m_upper: tuple[Multivector, ...]
    m5: Multivector
    sigma_upper: tuple[Multivector, ...]
    sigma_lower: tuple[Multivector, ...]
    sigma_check: tuple[Multivector, ...]
    pseudoscalar: Multivector
    e_plus: Multivector
    e_minus: Multivector


def _spacetime_constants() -> SpacetimeConstants:
    one = STA.scalar(1.0)
    m_lower = tuple(STA.vector(k) for k in range(4))
    m_upper = (m_lower[0],) + tuple(-m for m in m_lower[1:])
    m5 = m_upper[0] * m_upper[1] * m_upper[2] * m_upper[3]
    sigma_upper = (one,) + tuple(m_upper[i] * m_upper[0] for i in (1, 2, 3))
    sigma_lower = (one,) + tuple(m_lower[i] * m_lower[0] for i in (1, 2, 3))
    sigma_check = (-one,) + sigma_lower[1:]
    ps = sigma_upper[1] * sigma_upper[2] * sigma_upper[3]
    e_plus = 0.5 * (one + sigma_lower[3])
    e_minus = 0.5 * (one - sigma_lower[3])
    return SpacetimeConstants(m_lower, m_upper, m5, sigma_upper, sigma_lower, sigma_check,
                              ps, e_plus, e_minus)


STA_CONSTANTS = _spacetime_constants()


def _require(mv: Multivector, alg: Algebra, what: str) -> None:
    if not isinstance(mv, Multivector) or mv.signature != alg.signature:
        raise SignatureError(f"{what} expects an element of Cl({alg.signature.p},{alg.signature.q})")


def _blade_images(src: Algebra, generators: Sequence[Multivector]) -> np.ndarray:
    tgt = generators[0].algebra
    images = np.zeros((src.dim, tgt.dim))
    for mask in range(src.dim):
        img = tgt.scalar(1.0)
        for k in range(src.n):
            if mask >> k & 1:
                img = img * generators[k]
        images[mask] = img.coeffs
    return images


_PAULI_IMAGES = _blade_images(PAULI, STA_CONSTANTS.sigma_upper[1:])
_QUATERNION_IMAGES = _blade_images(
    QUATERNION, [STA_CONSTANTS.pseudoscalar * STA_CONSTANTS.sigma_upper[k] for k in (1, 2)]
)
_PAULI_I = PAULI.blade(0b111)
_QUATERNION_TO_PAULI = _blade_images(QUATERNION, [_PAULI_I * PAULI.vector(k) for k in (0, 1)])


def embed_pauli(p: Multivector) -> Multivector:
    """Cl(3,0) -> even part of Cl(1,3), sending basis vector k to sigma^(k+1) = m^(k+1) m^0."""
    _require(p, PAULI, "embed_pauli")
    return Multivector(STA, p.coeffs @ _PAULI_IMAGES)


def embed_quaternion(q: Multivector) -> Multivector:
    """Cl(0,2) -> even part of Cl(1,3).

    The quaternion units i-hat, j-hat go to i*sigma^1, i*sigma^2 (i the
    pseudoscalar).  Their product i-hat*j-hat then lands on -i*sigma^3; see
    :data:`QUATERNION_IJ_SIGN`.
    """
    _require(q, QUATERNION, "embed_quaternion")
    return Multivector(STA, q.coeffs @ _QUATERNION_IMAGES)


def quaternion_to_pauli(q: Multivector) -> Multivector:
    """Cl(0,2) -> even part of Cl(3,0), i-hat -> I e1, j-hat -> I e2 with I = e1 e2 e3."""
    _require(q, QUATERNION, "quaternion_to_pauli")
    return Multivector(PAULI, q.coeffs @ _QUATERNION_TO_PAULI)


def _ij_sign() -> int:
    ij = embed_quaternion(QUATERNION.blade(0b11))
    k_hat = STA_CONSTANTS.pseudoscalar * STA_CONSTANTS.sigma_upper[3]
    if ij == k_hat:
        return 1
    if ij == -k_hat:
        return -1
    raise AssertionError("quaternion product lands outside span of i*sigma^3")


QUATERNION_IJ_SIGN = _ij_sign()


def pauli_split(p: Multivector) -> tuple[Multivector, Multivector]:
    """Write a Pauli number as ``Q1 + I*Q2`` with both parts in the even subalgebra."""
    _require(p, PAULI, "pauli_split")
    q1 = even_part(p)
    q2 = -(_PAULI_I * (p - q1))
    return q1, q2
