import numpy as np
import pytest

from g2deform import fields
from g2deform.frames import clifford_rep
from g2deform.g2core import cross

N = 6


@pytest.fixture(scope="module")
def S():
    return fields.standard_splitting()


def rand_field(rng, fiber, n=N, complex_=False):
    f = rng.standard_normal((n, n, n, fiber))
    if complex_:
        f = f + 1j * rng.standard_normal((n, n, n, fiber))
    return fields.band_limit(f)


def test_grid_size_validation():
    for bad in (2, 5, 7):
        with pytest.raises(fields.GridError):
            fields.check_grid_size(bad)
    assert fields.check_grid_size(8) == 8


def test_deriv_examples(rng):
    p = fields.grid_points(8)
    assert np.abs(fields.deriv(np.ones((8, 8, 8)), 0)).max() < 1e-14
    f = np.sin(2 * np.pi * p[..., 0])
    np.testing.assert_allclose(fields.deriv(f, 0), 2 * np.pi * np.cos(2 * np.pi * p[..., 0]), atol=1e-12)
    assert np.abs(fields.deriv(f, 1)).max() < 1e-12
    with pytest.raises(fields.GridError):
        fields.deriv(f, 3)


def test_deriv_matches_fourier_symbol_on_every_mode():
    n = 8
    p = fields.grid_points(n)[..., 2]
    for k in range(-(n // 2) + 1, n // 2):
        f = np.exp(2j * np.pi * k * p)
        np.testing.assert_allclose(fields.deriv(f, 2), 2j * np.pi * k * f, atol=1e-11)


def test_deriv_skew_adjoint(rng):
    f, g = rng.standard_normal((2, 8, 8, 8))
    for j in range(3):
        assert abs(fields.grid_inner(fields.deriv(f, j), g) + fields.grid_inner(f, fields.deriv(g, j))) < 1e-10


def test_dirac_examples(S):
    n = 8
    p = fields.grid_points(n)
    x = np.zeros((n, n, n, 4))
    x[..., 0] = 1.0
    assert np.abs(fields.dirac(x, S)).max() < 1e-14
    # Vbasis = (e4, e7, -e5, -e6), so rho(e1) e4 = e5 is -Vbasis[2]
    x[..., 0] = np.cos(2 * np.pi * p[..., 0])
    expected = np.zeros_like(x)
    expected[..., 2] = 2 * np.pi * np.sin(2 * np.pi * p[..., 0])
    np.testing.assert_allclose(fields.dirac(x, S), expected, atol=1e-11)
    np.testing.assert_array_equal(S.vbasis[2], -np.eye(7)[4])


def test_dirac_symmetric(S, rng):
    x, y = rng.standard_normal((2, N, N, N, 4))
    lhs = fields.grid_inner(fields.dirac(x, S), y)
    rhs = fields.grid_inner(x, fields.dirac(y, S))
    assert abs(lhs - rhs) < 1e-10 * np.linalg.norm(x) * np.linalg.norm(y)


def test_dirac_square_is_minus_laplacian(S, rng):
    x = rand_field(rng, 4)
    D2 = fields.dirac(fields.dirac(x, S), S)
    assert np.linalg.norm(D2 + fields.laplacian(x)) < 1e-8 * np.linalg.norm(x)


def test_tangent_clifford_matches_cross(S, rng):
    rho = fields.tangent_clifford(S)
    c = rng.standard_normal(4)
    for j in range(3):
        np.testing.assert_allclose(S.from_v(rho[j] @ c), cross(S.G, np.eye(7)[j], S.from_v(c)), atol=1e-14)


def test_dirac_twisted(S, rng):
    x = rng.standard_normal((N, N, N, 4))
    zero = np.zeros((3, N, N, N, 4, 4))
    np.testing.assert_array_equal(fields.dirac_twisted(x, zero, S), fields.dirac(x, S))
    # constant x and constant skew twist: pointwise sum_j e_j x (a_j x)
    c = rng.standard_normal(4)
    xc = np.broadcast_to(c, (N, N, N, 4)).copy()
    M = rng.standard_normal((3, 4, 4))
    skew = M - np.swapaxes(M, 1, 2)
    a = np.broadcast_to(skew[:, None, None, None], (3, N, N, N, 4, 4)).copy()
    expected = sum(S.to_v(cross(S.G, np.eye(7)[j], S.from_v(skew[j] @ c))) for j in range(3))
    np.testing.assert_allclose(fields.dirac_twisted(xc, a, S), np.broadcast_to(expected, xc.shape), atol=1e-12)
    with pytest.raises(fields.GridError):
        fields.dirac_twisted(x, a + np.eye(4), S)


def test_dirac_twisted_symmetric_when_rho_a_symmetric(S, rng):
    # rho(e_j) a_j is symmetric when a_j commutes with rho(e_j); take a_j = c_j rho(e_j)
    rho = fields.tangent_clifford(S)
    c = rng.standard_normal((3, N, N, N))
    a = c[..., None, None] * rho[:, None, None, None]
    x, y = rng.standard_normal((2, N, N, N, 4))
    lhs = fields.grid_inner(fields.dirac_twisted(x, a, S), y)
    rhs = fields.grid_inner(x, fields.dirac_twisted(y, a, S))
    assert abs(lhs - rhs) < 1e-10 * np.linalg.norm(x) * np.linalg.norm(y)


def test_dirac_form_twist(S, rng):
    x = rng.standard_normal((N, N, N, 4))
    np.testing.assert_array_equal(fields.dirac_form_twist(x, np.zeros((N, N, N, 3)), S), fields.dirac(x, S))
    c = rng.standard_normal(4)
    xc = np.broadcast_to(c, (N, N, N, 4)).copy()
    a = np.zeros((N, N, N, 3))
    a[..., 0] = 1.0
    out = fields.dirac_form_twist(xc, a, S)
    np.testing.assert_allclose(out, np.broadcast_to(clifford_rep(np.eye(7)[0], S) @ c, xc.shape), atol=1e-13)
    assert np.abs(out).max() > 0


def test_double_cross_identity(S, rng):
    a = rng.standard_normal((1000, 3)) @ S.ebasis
    x = rng.standard_normal((1000, 4)) @ S.vbasis
    lhs = cross(S.G, a, cross(S.G, a, x))
    np.testing.assert_allclose(lhs, -np.sum(a * a, 1)[:, None] * x, atol=1e-12)


def test_kernel_flat_dirac_small_grid(S):
    res = fields.kernel_dim(lambda x: fields.dirac(x, S), 4)
    assert res.dim == 4
    assert res.smallest[4] == pytest.approx(2 * np.pi, abs=1e-9)


def test_flat_square_spectrum_matches_assembled(S):
    n = 4
    M = fields.assemble(lambda x: fields.dirac(fields.dirac(x, S), S), n, 4)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(M)), fields.flat_dirac_square_spectrum(n), atol=1e-8)


def test_constant_form_twist_kills_kernel(S):
    n = 4
    a = np.zeros((n, n, n, 3))
    a[..., 0] = 1.0
    res = fields.kernel_dim(lambda x: fields.dirac_form_twist(x, a, S), n, symmetric=False)
    assert res.dim == 0


def test_kernel_rejects_asymmetric_operator(S):
    a = np.zeros((4, 4, 4, 3))
    a[..., 0] = 1.0
    with pytest.raises(fields.EigenSolveError):
        fields.kernel_dim(lambda x: fields.dirac_form_twist(x, a, S), 4, symmetric=True)


def test_band_limited_basis_orthonormal():
    Q = fields.band_limited_basis(4, 2)
    np.testing.assert_allclose(Q.T @ Q, np.eye(Q.shape[1]), atol=1e-12)
    assert Q.shape == (4 ** 3 * 2, 3 ** 3 * 2)


# -- Seiberg-Witten-type system


def test_spinor_clifford_relations(S):
    rho = fields.spinor_clifford(S)
    for i in range(3):
        for j in range(3):
            np.testing.assert_allclose(rho[i] @ rho[j] + rho[j] @ rho[i], -2 * (i == j) * np.eye(2), atol=1e-14)


def test_sw_residual_examples(S, rng):
    x0 = np.zeros((N, N, N, 2), dtype=complex)
    for A in (np.zeros((3, N, N, N)), np.broadcast_to(rng.standard_normal(3)[:, None, None, None], (3, N, N, N))):
        r1, r2 = fields.sw_residual(x0, A, S)
        assert np.abs(r1).max() < 1e-14 and np.abs(r2).max() < 1e-14
    c = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    xc = np.broadcast_to(c, (N, N, N, 2)).copy()
    r1, r2 = fields.sw_residual(xc, np.zeros((3, N, N, N)), S)
    assert np.abs(r1).max() < 1e-13
    np.testing.assert_allclose(np.linalg.norm(r2, axis=-1), np.sum(np.abs(c) ** 2) / 2, rtol=1e-12)


def test_sw_residual_zero_at_closed_connection(S, rng):
    # A = d(phi) is closed for any periodic function phi
    phi = fields.band_limit(rng.standard_normal((N, N, N)))
    A = np.stack([fields.deriv(phi, j) for j in range(3)])
    r1, r2 = fields.sw_residual(np.zeros((N, N, N, 2)), A, S)
    assert np.abs(r1).max() == 0 and np.abs(r2).max() < 1e-12


def test_sigma_forms_match_sigma_field(S, rng):
    x = rng.standard_normal((N, N, N, 2)) + 1j * rng.standard_normal((N, N, N, 2))
    Q = fields._sigma_forms(S)
    quad = np.real(np.einsum("...i,kij,...j->...k", np.conj(x), Q, x))
    np.testing.assert_allclose(quad, fields.sigma_field(x, S), atol=1e-12)


def test_sw_gradient_finite_differences(S, rng):
    n = 4
    x = 0.3 * (rng.standard_normal((n, n, n, 2)) + 1j * rng.standard_normal((n, n, n, 2)))
    A = 0.3 * rng.standard_normal((3, n, n, n))
    gx, gA = fields.sw_gradient(x, A, S)
    h = 1e-5
    for _ in range(10):
        dx = rng.standard_normal(x.shape) + 1j * rng.standard_normal(x.shape)
        dA = rng.standard_normal(A.shape)
        fd = (fields.sw_energy(x + h * dx, A + h * dA, S) - fields.sw_energy(x - h * dx, A - h * dA, S)) / (2 * h)
        an = float(np.real(np.vdot(gx, dx)) + np.sum(gA * dA))
        assert abs(fd - an) <= 1e-5 * abs(an)


def test_descent_from_zero_converges_immediately(S):
    res = fields.sw_descent(np.zeros((N, N, N, 2)), np.zeros((3, N, N, N)), S)
    assert res.converged and res.norms == [0.0]


def test_descent_monotone(S, rng):
    n = 4
    x = 0.1 * (rng.standard_normal((n, n, n, 2)) + 1j * rng.standard_normal((n, n, n, 2)))
    A = 0.1 * rng.standard_normal((3, n, n, n))
    res = fields.sw_descent(x, A, S, steps=50)
    assert res.status in ("budget_exhausted", "converged")
    assert all(b < a for a, b in zip(res.norms, res.norms[1:]))
    assert res.norms[-1] < 0.5 * res.norms[0]


# -- chi-flow


def test_flat_inclusion_is_fixed(G):
    d = np.zeros((N, N, N, 7))
    df = fields.defect(d, G)
    assert (df.L2, df.max, df.calib_min) == (0.0, 0.0, 1.0)
    assert np.array_equal(fields.chi_flow_step(d, 0.05, G), d)


def test_defect_bounds(G, rng):
    d = 0.05 * fields.band_limit(rng.standard_normal((N, N, N, 7)))
    df = fields.defect(d, G)
    assert -1 <= df.calib_min <= 1
    assert df.max <= 2
    assert df.L2 ** 2 <= N ** 3 * df.max ** 2 + 1e-12
    c = fields.chi_field(d, G)
    q = fields.orthonormal_tangents(d, G)
    np.testing.assert_allclose(np.einsum("...ji,...i->...j", q, c), 0, atol=1e-12)


def test_degenerate_frame_reports_location(G):
    n = 4
    d = np.zeros((n, n, n, 7))
    p = fields.grid_points(n)
    # displacement -p1 e1 (band-limited part) collapses the first tangent where its derivative is -1
    d[..., 0] = -np.sin(2 * np.pi * p[..., 0]) / (2 * np.pi)
    with pytest.raises(fields.DegenerateFrameError) as exc:
        fields.defect(d, G)
    assert exc.value.index[0] == 0


def test_flow_result_statuses(G):
    res = fields.chi_flow(np.zeros((4, 4, 4, 7)), 0.1, 3, G)
    assert res.status == "ok" and len(res.defects) == 4 and res.step_changes == [0.0] * 3
    with pytest.raises(ValueError):
        fields.chi_flow(np.zeros((4, 4, 4, 7)), 0.0, 1, G)


def test_linearized_flow_rates(G):
    # to first order the flow is d' = D d with D the symmetric Dirac operator: modes grow or decay
    # as exp(+-2 pi |k| t), so explicit Euler multiplies the dominant mode by 1 + 2 pi dt per step
    dt = 0.05
    res = fields.chi_flow(fields.perturbed_inclusion(16, 1e-7), dt, 30, G)
    L2 = np.array([d.L2 for d in res.defects])
    ratios = L2[1:] / L2[:-1]
    assert ratios[0] == pytest.approx(np.sqrt(1 + (2 * np.pi * dt) ** 2), rel=1e-6)
    assert ratios[-1] == pytest.approx(1 + 2 * np.pi * dt, rel=1e-4)


def test_perturbed_inclusion_shape():
    d = fields.perturbed_inclusion(8, 0.01)
    assert d.shape == (8, 8, 8, 7)
    assert np.abs(d[..., [0, 1, 2, 4, 5, 6]]).max() == 0
    assert np.abs(d[..., 3]).max() == pytest.approx(0.01)
