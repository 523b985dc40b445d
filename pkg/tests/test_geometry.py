import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from spinor_forge.clifford import STA, STA_CONSTANTS
from spinor_forge.geometry import (
    ETA,
    F_NORMALIZATION,
    TOL_ALG,
    TOL_GEO,
    DomainViolation,
    GeometryError,
    Spacetime,
    StencilError,
    Tetrad,
    TetradError,
    F_closed_form,
    F_components,
    bianchi_residual,
    bivector_coefficient,
    christoffel,
    comoving_tetrad,
    einstein_de_sitter,
    eds_scale,
    frame_kinematics,
    frame_vector_field,
    gram_schmidt_tetrad,
    inertial_tetrad,
    map_points,
    metric_compatibility_residual,
    minkowski,
    paravectors,
    partial,
    q_tensor_square,
    require_tetrad,
    ricci,
    ricci_frame,
    riemann,
    sample_points,
    schwarzschild,
    static_tetrad,
    sym_residual,
    tetrad_residual,
)

C = STA_CONSTANTS
X_SCH = np.array([0.0, 10.0, math.pi / 2, 0.0])
X_EDS = np.array([1.0, 0.3, -0.2, 0.5])


# --- connection and curvature ----------------------------------------------------------


def test_minkowski_zeros():
    s = minkowski()
    x = np.array([1.0, -2.0, 3.0, 0.5])
    assert np.array_equal(christoffel(s, x), np.zeros((4, 4, 4)))
    assert np.array_equal(christoffel(s, x, numeric=True), np.zeros((4, 4, 4)))
    assert np.max(np.abs(riemann(s, x))) == 0.0
    assert np.max(np.abs(ricci(s, x))) == 0.0


def test_schwarzschild_christoffel_against_oracle():
    want = oracle.christoffel(oracle.schwarzschild_metric, X_SCH)
    assert want[0, 0, 1] == pytest.approx(0.0125, rel=1e-6)
    for s in (schwarzschild(1.0), schwarzschild(1.0, analytic=False)):
        got = christoffel(s, X_SCH)
        assert got[0, 0, 1] == pytest.approx(1 / (10 * 8), rel=1e-9)
        assert np.max(np.abs(got - want)) < 1e-7


def test_eds_christoffel_against_oracle():
    want = oracle.christoffel(oracle.eds_metric, X_EDS)
    assert want[1, 0, 1] == pytest.approx(2 / 3, rel=1e-6)
    for s in (einstein_de_sitter(), einstein_de_sitter(analytic=False)):
        got = christoffel(s, X_EDS)
        assert got[1, 0, 1] == pytest.approx(2 / 3, rel=1e-9)
        assert np.max(np.abs(got - want)) < 1e-7


def test_christoffel_symmetric_lower():
    s = schwarzschild(2.0, analytic=False)
    G = christoffel(s, [1.0, 11.0, 1.0, 2.0])
    assert np.max(np.abs(G - np.swapaxes(G, 1, 2))) == 0.0


@pytest.mark.parametrize("analytic", [True, False])
def test_schwarzschild_vacuum(analytic):
    s = schwarzschild(1.0, analytic=analytic)
    for x in sample_points(s, 8, seed=3):
        assert np.max(np.abs(ricci(s, x))) <= TOL_GEO
        assert bianchi_residual(s, x) <= TOL_GEO
        assert metric_compatibility_residual(s, x) <= TOL_GEO
    # curved: the Riemann tensor does not vanish
    assert np.max(np.abs(riemann(s, X_SCH))) > 1e-3


def test_eds_ricci_nonzero_and_matches_oracle():
    s, t = einstein_de_sitter(), comoving_tetrad()
    x = np.array([1.0, 0.0, 0.0, 0.0])
    r00 = ricci_frame(s, t, x)[0, 0]
    assert abs(r00) > 10 * TOL_GEO
    assert r00 == pytest.approx(oracle.ricci(oracle.eds_metric, x)[0, 0], rel=1e-4)
    assert r00 == pytest.approx(2 / 3, rel=1e-6)
    assert np.max(np.abs(ricci(s, x) - oracle.ricci(oracle.eds_metric, x))) < 1e-4


def test_partial_is_fourth_order():
    f = lambda y: np.array([math.sin(y[0]) * y[1] ** 3])  # noqa: E731
    x = np.array([0.4, 1.3, 0.0, 0.0])
    assert partial(f, x, 0)[0] == pytest.approx(math.cos(0.4) * 1.3 ** 3, rel=1e-12)
    assert partial(f, x, 1)[0] == pytest.approx(3 * math.sin(0.4) * 1.3 ** 2, rel=1e-12)
    assert partial(f, x, 2)[0] == 0.0


def test_stencil_outside_domain():
    s = schwarzschild(1.0)
    with pytest.raises(StencilError):
        christoffel(schwarzschild(1.0, analytic=False), [0.0, 2.00001, 1.0, 0.0])
    with pytest.raises(GeometryError):
        s.metric([0.0, 1.0, 1.0, 0.0])


def test_schwarzschild_rejects_bad_mass():
    with pytest.raises(GeometryError):
        schwarzschild(0.0)


# --- tetrads ---------------------------------------------------------------------------


@pytest.mark.parametrize("factory", [
    lambda: (minkowski(), inertial_tetrad()),
    lambda: (schwarzschild(1.0), static_tetrad(1.0)),
    lambda: (einstein_de_sitter(), comoving_tetrad()),
])
def test_builtin_tetrads(factory):
    s, t = factory()
    for x in sample_points(s, 16, seed=1):
        assert tetrad_residual(s, t, x) <= TOL_ALG
        require_tetrad(s, t, x)


def test_comoving_frame_vectors():
    t = comoving_tetrad()
    a, _ = eds_scale(2.0)
    x = [2.0, 0.0, 0.0, 0.0]
    assert np.allclose(t.h(x), np.diag([1, a, a, a]), atol=0)
    assert np.allclose(t.inverse(x), np.diag([1, 1 / a, 1 / a, 1 / a]), rtol=1e-15)


def test_wrong_tetrad_rejected():
    with pytest.raises(TetradError):
        require_tetrad(schwarzschild(1.0), inertial_tetrad(), X_SCH)
    with pytest.raises(TetradError):
        q_tensor_square(inertial_tetrad(), X_SCH, schwarzschild(1.0))
    with pytest.raises(TetradError):
        Tetrad("zero", lambda x: np.zeros((4, 4))).inverse(X_SCH)


@pytest.mark.parametrize("s", [minkowski(), schwarzschild(1.0), einstein_de_sitter()], ids=lambda s: s.name)
def test_gram_schmidt_reproduces_metric(s):
    t = gram_schmidt_tetrad(s)
    for x in sample_points(s, 8):
        assert tetrad_residual(s, t, x) <= 1e-12


def test_gram_schmidt_causal_order():
    swapped = Spacetime("swapped", lambda x: np.diag([-1.0, 1.0, -1.0, -1.0]), lambda x: True,
                        np.array([[0.0, 1.0]] * 4))
    with pytest.raises(TetradError):
        gram_schmidt_tetrad(swapped).h(np.zeros(4))


# --- Q tensor square and F -------------------------------------------------------------


def test_paravectors_grades():
    p = paravectors(static_tetrad(1.0), X_SCH)
    for q in p.q + p.q_check:
        assert (q - q.grade(0) - q.grade(2)).norm() == 0.0
        assert q.is_even()
    assert p.q_check[0] == -p.q[0]


def test_q_square_minkowski():
    sym, anti = q_tensor_square(inertial_tetrad(), np.zeros(4))
    for m in range(4):
        for n in range(4):
            assert sym[m][n] == STA.scalar(-ETA[m, n])
            assert anti[m][n] == -anti[n][m]
        assert anti[m][m] == STA.zero()
    s = C.sigma_lower
    assert anti[1][2] == s[1] * s[2]
    assert anti[1][2] == 0.5 * (s[1] * C.sigma_check[2] - s[2] * C.sigma_check[1])
    # sigma_1 sigma_2 = sigma^1 sigma^2 = i sigma^3 = -i sigma_3
    assert anti[1][2] == -(C.pseudoscalar * s[3])


@pytest.mark.parametrize("s,t", [
    (minkowski(), inertial_tetrad()),
    (schwarzschild(1.0), static_tetrad(1.0)),
    (einstein_de_sitter(), comoving_tetrad()),
], ids=["minkowski", "schwarzschild", "eds"])
def test_q_square_symmetric_is_minus_g(s, t):
    for x in sample_points(s, 16, seed=2):
        assert sym_residual(s, t, x) <= TOL_ALG
        _, anti = q_tensor_square(t, x)
        for m in range(4):
            for n in range(4):
                assert (anti[m][n] - anti[m][n].grade(2)).norm() <= TOL_ALG


def test_F_minkowski_value():
    F = F_components(inertial_tetrad(), np.zeros(4))
    assert F_NORMALIZATION == -1.0
    assert F[2, 1, 2] == -1.0
    # the i sigma_3 coefficient of sigma_1 sigma_2 taken from the product table
    assert bivector_coefficient(C.sigma_lower[1] * C.sigma_lower[2], 3) == -1.0
    assert F[2, 1, 2] == bivector_coefficient(q_tensor_square(inertial_tetrad(), np.zeros(4))[1][1][2], 3)


@settings(max_examples=30, deadline=None, derandomize=True)
@given(st.integers(0, 10**6))
def test_F_antisymmetric_and_closed_form(seed):
    rng = np.random.default_rng(seed)
    h = np.eye(4) + 0.3 * rng.normal(size=(4, 4))
    t = Tetrad("random", lambda x: h)
    F = F_components(t, np.zeros(4))
    assert np.max(np.abs(F + np.swapaxes(F, 1, 2))) < 1e-14
    assert np.max(np.abs(F - F_closed_form(h))) < 1e-12


@pytest.mark.parametrize("lam", [0.5, 3.0])
def test_F_scales_quadratically(lam):
    base = F_components(inertial_tetrad(), np.zeros(4))
    h = np.diag([1.0, lam, lam, lam])
    scaled = F_components(Tetrad("scaled", lambda x: h), np.zeros(4))
    assert np.allclose(scaled, lam ** 2 * base, atol=1e-14)


def test_antisymmetric_part_has_boost_parts_for_time_index():
    # mixed time/space entries carry sigma_k (boost) parts, not only i sigma_k
    _, anti = q_tensor_square(inertial_tetrad(), np.zeros(4))
    assert anti[0][1] == C.sigma_lower[1]
    assert bivector_coefficient(anti[0][1], 1) == 0.0


# --- kinematics ------------------------------------------------------------------------


def test_kinematics_minkowski():
    s = minkowski()
    fk = frame_kinematics(s, frame_vector_field(inertial_tetrad(), 0), np.array([1.0, 2.0, 3.0, 4.0]))
    for part in (fk.acceleration, fk.rotation, fk.shear, fk.gradient):
        assert np.max(np.abs(part)) == 0.0
    assert fk.expansion == 0.0


def test_kinematics_eds():
    s = einstein_de_sitter()
    x = np.array([1.0, 0.0, 0.0, 0.0])
    fk = frame_kinematics(s, frame_vector_field(comoving_tetrad(), 0), x)
    assert fk.expansion == pytest.approx(2.0, abs=1e-4)
    for part in (fk.acceleration, fk.rotation, fk.shear):
        assert np.max(np.abs(part)) <= TOL_GEO
    assert fk.reassembly_residual(s.metric(x) @ np.array([1.0, 0, 0, 0])) <= TOL_GEO
    # projector annihilates Z
    assert np.max(np.abs(fk.projector @ np.array([1.0, 0, 0, 0]))) == 0.0


def test_kinematics_schwarzschild_static():
    s = schwarzschild(1.0)
    Z = frame_vector_field(static_tetrad(1.0), 0)
    fk = frame_kinematics(s, Z, X_SCH)
    assert Z(X_SCH)[0] == pytest.approx(1 / math.sqrt(0.8))
    # a_r = -M / (r^2 f) in form components; nonzero
    assert fk.acceleration[1] == pytest.approx(-1 / (100 * 0.8), rel=1e-8)
    assert abs(fk.acceleration[1]) > 1e-3
    for part in (fk.rotation, fk.shear):
        assert np.max(np.abs(part)) <= TOL_GEO
    assert abs(fk.expansion) <= TOL_GEO
    assert np.allclose(fk.rotation, -fk.rotation.T, atol=0)
    assert np.allclose(fk.shear, fk.shear.T, atol=1e-15)


def test_kinematics_requires_unit_timelike():
    with pytest.raises(GeometryError):
        frame_kinematics(minkowski(), lambda y: np.array([2.0, 0, 0, 0]), np.zeros(4))


# --- sampling / threading --------------------------------------------------------------


def test_sampling_deterministic_and_in_box():
    s = schwarzschild(1.0)
    a, b = sample_points(s, 64, 0), sample_points(s, 64, 0)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, sample_points(s, 64, 1))
    assert np.all(a >= s.box[:, 0]) and np.all(a <= s.box[:, 1])
    assert np.all(a[:, 1] >= 4.0) and np.all(a[:, 1] <= 50.0)
    e = sample_points(einstein_de_sitter(), 64, 0)
    assert np.all((e[:, 0] >= 0.5) & (e[:, 0] <= 5.0))
    with pytest.raises(ValueError):
        sample_points(s, 0)


def test_sampling_empty_domain():
    s = Spacetime("empty", lambda x: ETA, lambda x: False, np.array([[0.0, 1.0]] * 4))
    with pytest.raises(DomainViolation):
        sample_points(s, 4)


def test_map_points_thread_independent(monkeypatch):
    s = schwarzschild(1.0)
    pts = list(sample_points(s, 12))
    fn = lambda x: float(np.sum(ricci(s, x)))  # noqa: E731
    monkeypatch.setenv("SPINOR_FORGE_THREADS", "1")
    serial = map_points(fn, pts)
    monkeypatch.setenv("SPINOR_FORGE_THREADS", "4")
    assert map_points(fn, pts) == serial
