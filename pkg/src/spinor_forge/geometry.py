"""Numerical Lorentzian geometry on a single chart.

Index conventions used throughout:

* ``g[m, n]`` is g_{mn}; signature (+,-,-,-).
* ``gamma[a, n, m]`` is Gamma^a_{nm}, with ``D_{e_n} e_m = Gamma^a_{nm} e_a``.
* ``h[a, m]`` is the tetrad form component h^a_m (row = frame index);
  ``inv[m, a]`` is h_a^m, so that e_a = h_a^m d_m.
* ``riemann[a, b, m, n]`` is R^a_{bmn}; ``ricci[b, n] = R^a_{ban}``.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.stats import qmc

from .clifford import STA, STA_CONSTANTS, Multivector

ETA = np.diag([1.0, -1.0, -1.0, -1.0])
TOL_ALG = 1e-9
TOL_GEO = 1e-5

_STEP_REL = 1e-4
_STEP_MIN = 1e-4


class GeometryError(ValueError):
    pass


class StencilError(GeometryError):
    """A finite-difference stencil left the spacetime domain."""


class DomainViolation(GeometryError):
    pass


class TetradError(GeometryError):
    pass


def thread_count() -> int:
    raw = os.environ.get("SPINOR_FORGE_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def map_points(fn: Callable, points: Sequence) -> list:
    """Order-preserving map over points, parallel up to SPINOR_FORGE_THREADS."""
    n = thread_count()
    if n == 1 or len(points) < 2:
        return [fn(p) for p in points]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, points))


# ---------------------------------------------------------------------------
# spacetimes and tetrads


@dataclass(frozen=True)
class Spacetime:
    name: str
    metric_fn: Callable[[np.ndarray], np.ndarray]
    domain_fn: Callable[[np.ndarray], bool]
    box: np.ndarray  # (4, 2) sampling box, strictly inside the domain
    christoffel_fn: Callable[[np.ndarray], np.ndarray] | None = None
    params: dict = field(default_factory=dict)
    coordinates: tuple[str, ...] = ("x0", "x1", "x2", "x3")

    def in_domain(self, x) -> bool:
        return bool(self.domain_fn(np.asarray(x, dtype=float)))

    def metric(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if not self.domain_fn(x):
            raise StencilError(f"{self.name}: point {x.tolist()} is outside the domain")
        return np.asarray(self.metric_fn(x), dtype=float)

    @property
    def analytic(self) -> bool:
        return self.christoffel_fn is not None


@dataclass(frozen=True)
class Tetrad:
    name: str
    h_fn: Callable[[np.ndarray], np.ndarray]

    def h(self, x) -> np.ndarray:
        return np.asarray(self.h_fn(np.asarray(x, dtype=float)), dtype=float)

    def inverse(self, x) -> np.ndarray:
        h = self.h(x)
        if abs(np.linalg.det(h)) < 1e-300:
            raise TetradError(f"tetrad {self.name!r} is singular at {list(x)}")
        return np.linalg.inv(h)


def tetrad_residual(s: Spacetime, t: Tetrad, x) -> float:
    """max |h^a_m h^b_n eta_ab - g_mn|."""
    h = t.h(x)
    return float(np.max(np.abs(h.T @ ETA @ h - s.metric(x))))


def require_tetrad(s: Spacetime, t: Tetrad, x, tol: float = TOL_ALG) -> None:
    g = s.metric(x)
    r = tetrad_residual(s, t, x)
    if r > tol * max(1.0, float(np.max(np.abs(g)))):
        raise TetradError(f"tetrad {t.name!r} does not reproduce {s.name} metric at {list(x)} (residual {r:.3e})")


def minkowski() -> Spacetime:
    return Spacetime(
        name="minkowski",
        metric_fn=lambda x: ETA.copy(),
        domain_fn=lambda x: bool(np.all(np.isfinite(x))),
        box=np.array([[-10.0, 10.0]] * 4),
        christoffel_fn=lambda x: np.zeros((4, 4, 4)),
        params={"vacuum": True},
        coordinates=("t", "x", "y", "z"),
    )


def inertial_tetrad() -> Tetrad:
    return Tetrad("inertial", lambda x: np.eye(4))


def _schwarzschild_metric(M: float):
    def metric(x):
        r, th = x[1], x[2]
        f = 1.0 - 2.0 * M / r
        s = math.sin(th)
        return np.diag([f, -1.0 / f, -r * r, -r * r * s * s])

    return metric


def _schwarzschild_christoffel(M: float):
    def christoffel(x):
        r, th = x[1], x[2]
        f = 1.0 - 2.0 * M / r
        s, c = math.sin(th), math.cos(th)
        G = np.zeros((4, 4, 4))
        G[0, 0, 1] = G[0, 1, 0] = M / (r * r * f)
        G[1, 0, 0] = M * f / (r * r)
        G[1, 1, 1] = -M / (r * r * f)
        G[1, 2, 2] = -r * f
        G[1, 3, 3] = -r * f * s * s
        G[2, 1, 2] = G[2, 2, 1] = 1.0 / r
        G[2, 3, 3] = -s * c
        G[3, 1, 3] = G[3, 3, 1] = 1.0 / r
        G[3, 2, 3] = G[3, 3, 2] = c / s
        return G

    return christoffel


def schwarzschild(mass: float = 1.0, analytic: bool = True) -> Spacetime:
    if not mass > 0:
        raise GeometryError("mass must be positive")
    M = float(mass)
    return Spacetime(
        name="schwarzschild",
        metric_fn=_schwarzschild_metric(M),
        domain_fn=lambda x: bool(x[1] > 2.0 * M and 0.0 < x[2] < math.pi),
        box=np.array([[0.0, 10.0], [4.0 * M, 50.0 * M], [0.3, math.pi - 0.3], [0.0, 2 * math.pi]]),
        christoffel_fn=_schwarzschild_christoffel(M) if analytic else None,
        params={"mass": M, "vacuum": True},
        coordinates=("t", "r", "th", "ph"),
    )


def static_tetrad(mass: float = 1.0) -> Tetrad:
    M = float(mass)

    def h(x):
        r, th = x[1], x[2]
        f = 1.0 - 2.0 * M / r
        return np.diag([math.sqrt(f), 1.0 / math.sqrt(f), r, r * math.sin(th)])

    return Tetrad("static", h)


def eds_scale(t: float) -> tuple[float, float]:
    """Scale factor a = t^(2/3) and its time derivative."""
    a = t ** (2.0 / 3.0)
    return a, (2.0 / 3.0) * a / t


def _eds_metric(x):
    a, _ = eds_scale(x[0])
    return np.diag([1.0, -a * a, -a * a, -a * a])


def _eds_christoffel(x):
    a, ad = eds_scale(x[0])
    G = np.zeros((4, 4, 4))
    for i in (1, 2, 3):
        G[0, i, i] = a * ad
        G[i, 0, i] = G[i, i, 0] = ad / a
    return G


def einstein_de_sitter(analytic: bool = True) -> Spacetime:
    return Spacetime(
        name="eds",
        metric_fn=_eds_metric,
        domain_fn=lambda x: bool(x[0] > 0.0),
        box=np.array([[0.5, 5.0], [-10.0, 10.0], [-10.0, 10.0], [-10.0, 10.0]]),
        christoffel_fn=_eds_christoffel if analytic else None,
        coordinates=("t", "x", "y", "z"),
    )


def comoving_tetrad() -> Tetrad:
    # forms h^a_m = diag(1, a, a, a); the frame vectors are diag(1, 1/a, 1/a, 1/a)
    def h(x):
        a, _ = eds_scale(x[0])
        return np.diag([1.0, a, a, a])

    return Tetrad("comoving", h)


def gram_schmidt_tetrad(s: Spacetime, name: str = "gram-schmidt") -> Tetrad:
    """Orthonormalize the coordinate basis (d_0 first) against g."""

    def h(x):
        g = s.metric(x)
        frame = []
        for m in range(4):
            v = np.zeros(4)
            v[m] = 1.0
            for a, u in enumerate(frame):
                v = v - ETA[a, a] * (u @ g @ v) * u
            n2 = v @ g @ v
            if abs(n2) < 1e-14:
                raise TetradError(f"coordinate vector {m} is null at {list(x)}")
            expected = 1.0 if m == 0 else -1.0
            if np.sign(n2) != expected:
                raise TetradError(f"coordinate basis has the wrong causal order at {list(x)}")
            frame.append(v / math.sqrt(abs(n2)))
        inv = np.array(frame).T  # inv[m, a] = h_a^m
        return np.linalg.inv(inv)

    return Tetrad(name, h)


# ---------------------------------------------------------------------------
# finite differences


def step_sizes(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.maximum(_STEP_MIN, _STEP_REL * np.abs(x))


def partial(f: Callable[[np.ndarray], np.ndarray], x, mu: int, h: float | None = None) -> np.ndarray:
    """Fourth-order central difference of an array-valued function along x^mu."""
    x = np.asarray(x, dtype=float)
    if h is None:
        h = float(step_sizes(x)[mu])
    def at(k):
        y = x.copy()
        y[mu] += k * h
        return np.asarray(f(y), dtype=float)

    # symmetric differences first so constant fields give exact zeros
    return (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * h)


def gradient(f: Callable[[np.ndarray], np.ndarray], x) -> np.ndarray:
    """Stack of partials, leading axis = derivative direction."""
    return np.array([partial(f, x, mu) for mu in range(4)])


def metric_derivative(s: Spacetime, x) -> np.ndarray:
    """dg[l, m, n] = d_l g_{mn}."""
    return gradient(s.metric, x)


def metric_second_derivative(s: Spacetime, x) -> np.ndarray:
    """ddg[k, l, m, n] = d_k d_l g_{mn} by nested first-derivative stencils."""
    return gradient(lambda y: metric_derivative(s, y), x)


def _christoffel_from(ginv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    # lowered[b, n, m] = d_n g_{bm} + d_m g_{bn} - d_b g_{nm}
    lowered = np.einsum("nbm->bnm", dg) + np.einsum("mbn->bnm", dg) - dg
    return 0.5 * np.einsum("ab,bnm->anm", ginv, lowered)


def christoffel(s: Spacetime, x, numeric: bool = False) -> np.ndarray:
    """Gamma^a_{nm}; analytic when available unless ``numeric`` is set."""
    if s.christoffel_fn is not None and not numeric:
        s.metric(x)  # domain check
        return np.asarray(s.christoffel_fn(np.asarray(x, dtype=float)), dtype=float)
    g = s.metric(x)
    try:
        ginv = np.linalg.inv(g)
    except np.linalg.LinAlgError:
        raise GeometryError(f"singular metric at {list(x)}") from None
    return _christoffel_from(ginv, metric_derivative(s, x))


def christoffel_derivative(s: Spacetime, x) -> np.ndarray:
    """dG[l, a, n, m] = d_l Gamma^a_{nm}."""
    if s.christoffel_fn is not None:
        return gradient(lambda y: christoffel(s, y), x)
    g = s.metric(x)
    ginv = np.linalg.inv(g)
    dg = metric_derivative(s, x)
    ddg = metric_second_derivative(s, x)
    dginv = -np.einsum("ab,lbc,cd->lad", ginv, dg, ginv)
    lowered = np.einsum("nbm->bnm", dg) + np.einsum("mbn->bnm", dg) - dg
    dlowered = (np.einsum("lnbm->lbnm", ddg) + np.einsum("lmbn->lbnm", ddg)
                - np.einsum("lbnm->lbnm", ddg))
    return 0.5 * (np.einsum("lab,bnm->lanm", dginv, lowered)
                  + np.einsum("ab,lbnm->lanm", ginv, dlowered))


def riemann(s: Spacetime, x) -> np.ndarray:
    G = christoffel(s, x)
    dG = christoffel_derivative(s, x)
    return (np.einsum("manb->abmn", dG) - np.einsum("namb->abmn", dG)
            + np.einsum("aml,lnb->abmn", G, G) - np.einsum("anl,lmb->abmn", G, G))


def ricci(s: Spacetime, x) -> np.ndarray:
    return np.einsum("abam->bm", riemann(s, x))


def ricci_frame(s: Spacetime, t: Tetrad, x) -> np.ndarray:
    """Ric(e_a, e_b)."""
    inv = t.inverse(x)
    return inv.T @ ricci(s, x) @ inv


def metric_compatibility_residual(s: Spacetime, x) -> float:
    g = s.metric(x)
    G = christoffel(s, x)
    dg = metric_derivative(s, x)
    cov = dg - np.einsum("blm,bn->lmn", G, g) - np.einsum("bln,mb->lmn", G, g)
    return float(np.max(np.abs(cov)))


def bianchi_residual(s: Spacetime, x) -> float:
    """First Bianchi identity plus antisymmetry in the last pair."""
    R = riemann(s, x)
    cyclic = R + np.einsum("amnb->abmn", R) + np.einsum("anbm->abmn", R)
    anti = R + np.einsum("abnm->abmn", R)
    return float(max(np.max(np.abs(cyclic)), np.max(np.abs(anti))))


# ---------------------------------------------------------------------------
# sampling


def sample_points(s: Spacetime, n: int = 64, seed: int = 0) -> np.ndarray:
    """Deterministic scrambled-Halton points inside the sampling box and domain."""
    if n < 1:
        raise ValueError("point count must be >= 1")
    sampler = qmc.Halton(d=4, scramble=True, seed=seed)
    lo, hi = s.box[:, 0], s.box[:, 1]
    out: list[np.ndarray] = []
    draws = 0
    while len(out) < n:
        batch = qmc.scale(sampler.random(max(n, 16)), lo, hi)
        draws += len(batch)
        out.extend(p for p in batch if s.in_domain(p))
        if draws > 100 * n and not out:
            raise DomainViolation(f"no sample point of {s.name} lies inside its domain")
    return np.array(out[:n])


# ---------------------------------------------------------------------------
# Sachs' paravector field


@dataclass(frozen=True)
class ParavectorAtPoint:
    q: tuple[Multivector, ...]
    q_check: tuple[Multivector, ...]


def paravectors_from_h(h: np.ndarray) -> ParavectorAtPoint:
    c = STA_CONSTANTS
    basis = np.array([s.coeffs for s in c.sigma_lower])
    check = np.array([s.coeffs for s in c.sigma_check])
    q = tuple(Multivector(STA, h[:, m] @ basis) for m in range(4))
    qc = tuple(Multivector(STA, h[:, m] @ check) for m in range(4))
    return ParavectorAtPoint(q, qc)


def paravectors(t: Tetrad, x) -> ParavectorAtPoint:
    return paravectors_from_h(t.h(x))


def q_tensor_square(t: Tetrad, x, s: Spacetime | None = None):
    """Symmetric and antisymmetric parts of q_m q-check_n."""
    if s is not None:
        require_tetrad(s, t, x)
    p = paravectors(t, x)
    prod = [[p.q[m] * p.q_check[n] for n in range(4)] for m in range(4)]
    sym = [[0.5 * (prod[m][n] + prod[n][m]) for n in range(4)] for m in range(4)]
    anti = [[0.5 * (prod[m][n] - prod[n][m]) for n in range(4)] for m in range(4)]
    return sym, anti


def sym_residual(s: Spacetime, t: Tetrad, x) -> float:
    """max over (m, n) of the norm of sym_{mn} + g_{mn}."""
    sym, _ = q_tensor_square(t, x)
    g = s.metric(x)
    return max((sym[m][n] + g[m, n]).norm() for m in range(4) for n in range(4))


_I_SIGMA = tuple(STA_CONSTANTS.pseudoscalar * STA_CONSTANTS.sigma_lower[k] for k in (1, 2, 3))

# F'^k_{mn} = F_NORMALIZATION * eps_{ijk} h^i_m h^j_n
F_NORMALIZATION = -1.0


def bivector_coefficient(mv: Multivector, k: int) -> float:
    """Coefficient of i sigma_k (k = 1, 2, 3)."""
    b = _I_SIGMA[k - 1]
    return float(mv.coeffs @ b.coeffs / (b.coeffs @ b.coeffs))


def F_components(t: Tetrad, x) -> np.ndarray:
    """F[k-1, m, n] = coefficient of i sigma_k in the antisymmetric part."""
    _, anti = q_tensor_square(t, x)
    return np.array([[[bivector_coefficient(anti[m][n], k) for n in range(4)]
                      for m in range(4)] for k in (1, 2, 3)])


def F_closed_form(h: np.ndarray) -> np.ndarray:
    eps = np.zeros((3, 3, 3))
    for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        eps[i, j, k], eps[j, i, k] = 1.0, -1.0
    hs = h[1:, :]
    return F_NORMALIZATION * np.einsum("ijk,im,jn->kmn", eps, hs, hs)


# ---------------------------------------------------------------------------
# frame kinematics


@dataclass(frozen=True)
class FrameKinematics:
    acceleration: np.ndarray
    rotation: np.ndarray
    shear: np.ndarray
    expansion: float
    projector: np.ndarray
    gradient: np.ndarray  # Z_{m;n}

    def reassembly_residual(self, z_form: np.ndarray) -> float:
        rebuilt = (np.outer(self.acceleration, z_form) + self.rotation + self.shear
                   + self.expansion / 3.0 * self.projector)
        return float(np.max(np.abs(rebuilt - self.gradient)))


def frame_kinematics(s: Spacetime, Z: Callable[[np.ndarray], np.ndarray], x,
                     tol: float = TOL_ALG) -> FrameKinematics:
    x = np.asarray(x, dtype=float)
    g = s.metric(x)
    ginv = np.linalg.inv(g)
    z = np.asarray(Z(x), dtype=float)
    norm = z @ g @ z
    if abs(norm - 1.0) > tol:
        raise GeometryError(f"Z is not a unit timelike vector at {x.tolist()} (g(Z,Z) = {norm})")
    zf = g @ z

    def z_form(y):
        return s.metric(y) @ np.asarray(Z(y), dtype=float)

    dz = gradient(z_form, x)  # dz[n, m] = d_n Z_m
    G = christoffel(s, x)
    T = dz.T - np.einsum("anm,a->mn", G, zf)  # T[m, n] = Z_{m;n}
    acc = T @ z
    E = float(np.einsum("mn,mn->", ginv, T))
    p = g - np.outer(zf, zf)
    pm = p @ ginv  # p_m^a
    anti = 0.5 * (T - T.T)
    sym = 0.5 * (T + T.T)
    rot = pm @ anti @ pm.T
    shear = pm @ sym @ pm.T - E / 3.0 * p
    return FrameKinematics(acc, rot, shear, E, p, T)


def frame_vector_field(t: Tetrad, a: int = 0) -> Callable[[np.ndarray], np.ndarray]:
    """Coordinate components of e_a as a field."""
    return lambda y: t.inverse(y)[:, a]
