import math

import numpy as np
import pytest

from xideform.errors import DomainError, SingularMatrixError
from xideform.gaussmat import RhoMatrix, closed_form_e, quadratic_form_minors, rescale_class
from xideform.quadrature import QuadSpec, tensor_integrate

SQRT_PI = math.sqrt(math.pi)


def random_convergent_rho(rng, d):
    while True:
        base = rng.normal(size=(d, d))
        sym = 0.2 * (base + base.T) / 2 + np.diag(rng.uniform(0.6, 1.6, size=d))
        im = 0.1 * (lambda b: (b + b.T) / 2)(rng.normal(size=(d, d)))
        rho = RhoMatrix.from_array(sym + 1j * im)
        if rho.convergence_ok():
            return rho


def test_closed_form_d1():
    assert closed_form_e(RhoMatrix.scalar(1.0), [0.0]) == pytest.approx(SQRT_PI, rel=1e-15)


def test_closed_form_d2_explicit():
    r11, r12, r22 = 1.0, 0.25, 0.8
    rho = RhoMatrix.from_array([[r11, r12], [r12, r22]])
    s1, s2 = 0.7 + 0.2j, -0.4
    det = r11 * r22 - r12**2
    expected = (
        math.pi
        * np.exp((r11 * s2**2 + r22 * s1**2 - 2 * r12 * s1 * s2) / (16 * det))
        / math.sqrt(det)
    )
    assert closed_form_e(rho, [s1, s2]) == pytest.approx(expected, rel=1e-14)


def test_d3_quadratic_form_minor_expansion():
    rho = RhoMatrix.from_array([[1.3, 0.2, -0.1], [0.2, 1.1, 0.15], [-0.1, 0.15, 0.9]])
    s = np.array([0.4 + 0.2j, -0.3, 0.7])
    adjugate_path = s @ rho.inverse() @ s
    assert quadratic_form_minors(rho, s) == pytest.approx(adjugate_path, rel=1e-13)


def test_det_d3_explicit_expansion():
    a = np.array([[1.2, 0.3, -0.2], [0.3, 0.9, 0.1], [-0.2, 0.1, 1.4]])
    rho = RhoMatrix.from_array(a)
    assert rho.det() == pytest.approx(np.linalg.det(a), rel=1e-13)


def test_minor_symmetries():
    rho = RhoMatrix.from_array([[1.2, 0.3, -0.2], [0.3, 0.9, 0.1], [-0.2, 0.1, 1.4]])
    assert rho.minor_R(0, 2) == rho.minor_R(2, 0)
    assert rho.minor_T(0, 1, 2) == rho.minor_T(1, 0, 2)
    d2 = RhoMatrix.from_array([[1.0, 0.4], [0.4, 0.9]])
    assert d2.minor_R(0, 1) == pytest.approx(d2.det())


def test_reduce_k_d2():
    rho = RhoMatrix.from_array([[1.0, 0.3], [0.3, 0.8]])
    red = rho.reduce_k(1)
    assert red.d == 1
    assert red.entries[0][0] == pytest.approx(rho.det() / 0.8)


def test_reduce_k_d3():
    rho = RhoMatrix.from_array([[1.2, 0.3, -0.2], [0.3, 0.9, 0.1], [-0.2, 0.1, 1.4]])
    red = rho.reduce_k(0)
    a = rho.array()
    assert red.entries[0][0] == pytest.approx(rho.minor_R(1, 0) / a[0, 0])
    assert red.entries[1][1] == pytest.approx(rho.minor_R(2, 0) / a[0, 0])
    assert red.entries[0][1] == pytest.approx(rho.minor_T(1, 2, 0) / a[0, 0])


def test_reduce_k_diagonal_unchanged():
    rho = RhoMatrix.from_array(np.diag([0.5, 1.0, 2.0]))
    red = rho.reduce_k(1)
    assert np.allclose(red.array(), np.diag([0.5, 2.0]))


def test_reduce_marginalization_consistency():
    # integrating axis k out of the pure Gaussian reproduces the reduced closed form
    rho = RhoMatrix.from_array([[1.2, 0.3, -0.2], [0.3, 0.9, 0.1], [-0.2, 0.1, 1.4]])
    s = np.array([0.5, -0.2 + 0.1j, 0.8])
    k = 2
    a = rho.array()
    shifted = np.array([s[i] - s[k] * a[i, k] / a[k, k] for i in range(3) if i != k])
    lhs = closed_form_e(rho, s)
    rhs = np.sqrt(np.pi / a[k, k]) * np.exp(s[k] ** 2 / (16 * a[k, k])) * closed_form_e(rho.reduce_k(k), shifted)
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_flip_involution_and_det():
    rho = RhoMatrix.from_array([[1.2, 0.3, -0.2], [0.3, 0.9, 0.1], [-0.2, 0.1, 1.4]])
    flipped = rho.flip_k(1)
    assert np.allclose(flipped.flip_k(1).array(), rho.array())
    assert flipped.det() == pytest.approx(rho.det())
    d2 = RhoMatrix.from_array([[1.0, 0.4], [0.4, 0.9]])
    assert np.allclose(d2.flip_k(1).array(), [[1.0, -0.4], [-0.4, 0.9]])


def test_rescale_class():
    rho = RhoMatrix.scalar(1.0)
    scaled, s_new, pref = rescale_class(rho, [2.0], [2.0])
    assert scaled.entries[0][0] == pytest.approx(0.25)
    assert s_new[0] == pytest.approx(1.0)
    assert pref == pytest.approx(0.5)
    assert closed_form_e(rho, [2.0]) == pytest.approx(pref * closed_form_e(scaled, s_new), rel=1e-14)


def test_rescale_identity_and_predicate_preserved():
    rng = np.random.default_rng(3)
    rho = random_convergent_rho(rng, 3)
    s = rng.normal(size=3)
    same, s_same, pref = rescale_class(rho, s, np.ones(3))
    assert pref == 1.0
    assert np.allclose(same.array(), rho.array())
    scaled, _, _ = rescale_class(rho, s, [0.5, 2.0, 1.3])
    assert scaled.convergence_ok()


def test_errors():
    with pytest.raises(DomainError):
        RhoMatrix.from_array([[1.0, 0.2], [0.3, 1.0]])
    with pytest.raises(SingularMatrixError):
        closed_form_e(RhoMatrix.from_array([[1.0, 1.0], [1.0, 1.0]]), [0, 0])
    with pytest.raises(DomainError):
        closed_form_e(RhoMatrix.from_array([[-1.0, 0.0], [0.0, 1.0]]), [0, 0])
    with pytest.raises(DomainError):
        rescale_class(RhoMatrix.scalar(1.0), [1.0], [-1.0])


def test_factorisation_predicate():
    diag = RhoMatrix.from_array(np.diag([1.0, 0.8, 1.2]))
    assert diag.factorisation_ok(0, 1, 2)
    generic = RhoMatrix.from_array([[1.2, 0.3, -0.2], [0.3, 0.9, 0.1], [-0.2, 0.1, 1.4]])
    assert not generic.factorisation_ok(0, 1, 2)
    # T_012 = rho01 rho22 - rho02 rho12 = 0 while the matrix stays coupled
    crafted = RhoMatrix.from_array([[1.0, 0.1, 0.5], [0.1, 1.0, 0.2], [0.5, 0.2, 1.0]])
    a = crafted.array().copy()
    a[0, 1] = a[1, 0] = a[0, 2] * a[1, 2] / a[2, 2]
    crafted = RhoMatrix.from_array(a)
    assert crafted.factorisation_ok(0, 1, 2)


def test_partial_marginalization_matches_quadrature():
    # integrating two axes of the 3D Gaussian at fixed x3 leaves the reduced kernel
    rho = RhoMatrix.from_array([[1.2, 0.3, -0.2], [0.3, 0.9, 0.1], [-0.2, 0.1, 1.4]])
    a = rho.array().real
    s = np.array([0.4, -0.2, 0.0])
    x3 = 0.7

    def integrand(p):
        x1, x2 = p[:, 0], p[:, 1]
        quad = a[0, 0] * x1**2 + a[1, 1] * x2**2 + 2 * a[0, 1] * x1 * x2
        cross = 2 * x3 * (a[0, 2] * x1 + a[1, 2] * x2)
        return np.exp(-quad - cross + (s[0] / 2) * x1 + (s[1] / 2) * x2)

    res = tensor_integrate(integrand, d=2, x_lo=-9, x_hi=9)
    det12 = a[0, 0] * a[1, 1] - a[0, 1] ** 2
    pref = (
        math.pi
        * np.exp((a[0, 0] * s[1] ** 2 + a[1, 1] * s[0] ** 2 - 2 * a[0, 1] * s[0] * s[1]) / (16 * det12))
        / math.sqrt(det12)
    )
    # reduced t3-kernel per the dimension-reduction display: multiplying back the
    # omitted e^{-rho33 x3^2} would leave exactly -(rho33 + (2 r12 r13 r23 - r11 r23^2
    # - r22 r13^2)/det12) x3^2
    red_quad = (2 * a[0, 1] * a[0, 2] * a[1, 2] - a[0, 0] * a[1, 2] ** 2 - a[1, 1] * a[0, 2] ** 2) / det12
    red_lin = (s[0] * (a[0, 1] * a[1, 2] - a[1, 1] * a[0, 2]) + s[1] * (a[0, 1] * a[0, 2] - a[0, 0] * a[1, 2])) / (
        2 * det12
    )
    expected = pref * math.exp(-red_quad * x3**2 + red_lin * x3)
    assert res.value.real == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_closed_form_matches_quadrature(d):
    rng = np.random.default_rng(100 + d)
    spec = QuadSpec(abs_tol=1e-11, rel_tol=1e-10) if d < 3 else QuadSpec(abs_tol=1e-10, rel_tol=1e-9)
    draws = 7 if d < 3 else 6
    for _ in range(draws):
        rho = random_convergent_rho(rng, d)
        s = rng.normal(size=d) + 1j * 0.3 * rng.normal(size=d)
        a = rho.array()

        def integrand(p):
            quad = np.einsum("ni,ij,nj->n", p, a, p)
            return np.exp(-quad + p @ (s / 2.0))

        res = tensor_integrate(integrand, d=d, spec=spec, x_lo=-8.5, x_hi=8.5)
        expected = closed_form_e(rho, s)
        assert abs(res.value - expected) < 1e-8 * max(1.0, abs(expected))
