import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from g2deform.exterior import (
    AltForm,
    FormError,
    basis_form,
    eval_form,
    form_inner,
    hodge,
    interior,
    perm_sign,
    volume_form,
    wedge,
)
from g2deform.g2core import phi0


def brute_wedge(a: AltForm, b: AltForm) -> np.ndarray:
    """Full antisymmetric tensor of a^b from the shuffle sum over all permutations."""
    p, q, n = a.degree, b.degree, a.dim
    A, B = a.to_tensor(), b.to_tensor()
    out = np.zeros((n,) * (p + q))
    for idx in itertools.product(range(n), repeat=p + q):
        if len(set(idx)) < p + q:
            continue
        total = 0.0
        for perm in itertools.permutations(range(p + q)):
            s = perm_sign(perm)
            j = [idx[k] for k in perm]
            total += s * A[tuple(j[:p])] * B[tuple(j[p:])]
        out[idx] = total / (math.factorial(p) * math.factorial(q))
    return out


def brute_hodge(a: AltForm) -> AltForm:
    """Solve b ^ *a = <b, a> mu over all basis b by a linear system."""
    n, p = a.dim, a.degree
    idx_p = list(itertools.combinations(range(n), p))
    idx_q = list(itertools.combinations(range(n), n - p))
    M = np.zeros((len(idx_p), len(idx_q)))
    for r, I in enumerate(idx_p):
        eI = AltForm(p, n, {I: 1.0})
        for c, J in enumerate(idx_q):
            M[r, c] = wedge(eI, AltForm(n - p, n, {J: 1.0})).top_coefficient()
    rhs = np.array([a.terms.get(I, 0.0) for I in idx_p])
    sol = np.linalg.solve(M, rhs)
    return AltForm(n - p, n, {J: c for J, c in zip(idx_q, sol)})


def random_form(rng, deg, n=7, integer=False):
    terms = {}
    for I in itertools.combinations(range(n), deg):
        if rng.random() < 0.5:
            terms[I] = float(rng.integers(-3, 4)) if integer else rng.standard_normal()
    return AltForm(deg, n, terms)


def test_wedge_basis():
    assert wedge(basis_form(7, 1), basis_form(7, 2)) == basis_form(7, 1, 2)
    assert wedge(basis_form(7, 1, 2), basis_form(7, 1, 3)) == AltForm.zero(4, 7)


def test_phi_wedge_star_phi_is_seven_volumes():
    phi = phi0()
    assert wedge(phi, hodge(phi)) == volume_form(7, 7.0)


def test_star_phi0_matches_linear_solve():
    phi = phi0()
    assert hodge(phi).allclose(brute_hodge(phi), 1e-12)
    expected = {(1, 2, 4, 7): -1, (1, 2, 5, 6): -1, (1, 3, 4, 6): -1, (1, 3, 5, 7): 1,
                (2, 3, 4, 5): 1, (2, 3, 6, 7): 1, (4, 5, 6, 7): 1}
    star = hodge(phi)
    for idx, c in expected.items():
        assert star.coeff(*idx) == c
    assert len(star.terms) == 7


@pytest.mark.parametrize("p,q", [(1, 1), (1, 2), (2, 2), (1, 3), (3, 1)])
def test_wedge_matches_shuffle_oracle(p, q):
    rng = np.random.default_rng(p * 10 + q)
    a, b = random_form(rng, p, 5), random_form(rng, q, 5)
    np.testing.assert_allclose(wedge(a, b).to_tensor(), brute_wedge(a, b), atol=1e-12)


def test_wedge_overflow_gives_zero():
    out = wedge(basis_form(3, 1, 2), basis_form(3, 2, 3))
    assert out.degree == 3 and not out.terms
    assert wedge(basis_form(3, 1, 2, 3), basis_form(3, 1)).terms == {}


def test_dimension_mismatch_raises():
    with pytest.raises(FormError):
        wedge(basis_form(7, 1), basis_form(4, 1))


def test_interior_examples():
    e = np.eye(7)
    assert interior(e[0], basis_form(7, 1, 2, 3)) == basis_form(7, 2, 3)
    assert interior(e[3], basis_form(7, 1, 2, 3)) == AltForm.zero(2, 7)
    expected = basis_form(7, 2, 3) + basis_form(7, 4, 5) + basis_form(7, 6, 7)
    assert interior(e[0], phi0()) == expected


def test_interior_of_scalar_raises():
    with pytest.raises(FormError):
        interior(np.eye(7)[0], AltForm.scalar(1.0, 7))


def test_hodge_examples():
    assert hodge(volume_form(7)) == AltForm.scalar(1.0, 7)
    assert hodge(basis_form(7, 1)) == basis_form(7, 2, 3, 4, 5, 6, 7)


def test_hodge_rejects_degenerate_inputs():
    with pytest.raises(FormError):
        hodge(basis_form(7, 1), mu=AltForm.zero(7, 7))
    g = np.eye(7)
    g[0, 0] = -1.0
    with pytest.raises(FormError):
        hodge(basis_form(7, 1), g=g)


def test_hodge_general_metric_defining_identity(rng):
    M = rng.standard_normal((4, 4))
    g = M @ M.T + 4 * np.eye(4)
    # the volume form of g is sqrt(det g) e^{1234}
    mu = volume_form(4, np.sqrt(np.linalg.det(g)))
    for p in range(5):
        a, b = random_form(rng, p, 4), random_form(rng, p, 4)
        lhs = wedge(b, hodge(a, g, mu)).top_coefficient()
        rhs = form_inner(b, a, g) * mu.top_coefficient()
        assert lhs == pytest.approx(rhs, abs=1e-10)


@pytest.mark.parametrize("deg", range(8))
def test_double_star_sign_exact(deg):
    rng = np.random.default_rng(deg)
    for _ in range(20):
        a = random_form(rng, deg, integer=True)
        assert hodge(hodge(a)) == a * (-1) ** (deg * (7 - deg))


def test_eval_form_examples(E):
    phi = phi0()
    assert eval_form(phi, [E[0], E[1], E[2]]) == 1
    assert eval_form(phi, [E[0], E[1], E[3]]) == 0
    assert eval_form(phi, [E[1], E[0], E[2]]) == -1


def test_eval_form_arity_error(E):
    with pytest.raises(FormError):
        eval_form(phi0(), [E[0], E[1]])


def test_eval_form_determinant_oracle(rng):
    a = random_form(rng, 3)
    vs = rng.standard_normal((3, 7))
    direct = sum(c * np.linalg.det(vs[:, list(I)]) for I, c in a.terms.items())
    assert eval_form(a, vs) == pytest.approx(direct, abs=1e-12)


def test_json_roundtrip_is_one_based():
    phi = phi0()
    text = phi.to_json()
    assert "[1, 2, 3]" in text
    assert AltForm.from_json(text) == phi


def test_unsorted_indices_rejected():
    with pytest.raises(FormError):
        AltForm(2, 7, {(2, 1): 1.0})
    assert AltForm.from_unsorted(2, 7, [((1, 0), 1.0)]) == AltForm(2, 7, {(0, 1): -1.0})


vec7 = st.lists(st.floats(-3, 3, allow_nan=False), min_size=7, max_size=7).map(np.array)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 3), st.integers(1, 3))
def test_interior_is_derivation(seed, p, q):
    rng = np.random.default_rng(seed)
    a, b = random_form(rng, p), random_form(rng, q)
    v = rng.standard_normal(7)
    lhs = interior(v, wedge(a, b))
    rhs = wedge(interior(v, a), b) + wedge(a, interior(v, b)) * (-1) ** p
    assert lhs.allclose(rhs, 1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 4), st.integers(0, 3))
def test_wedge_graded_commutative(seed, p, q):
    rng = np.random.default_rng(seed)
    a, b = random_form(rng, p), random_form(rng, q)
    assert wedge(a, b).allclose(wedge(b, a) * (-1) ** (p * q), 1e-12)


@settings(max_examples=60, deadline=None)
@given(vec7, vec7, vec7)
def test_eval_form_alternating(u, v, w):
    phi = phi0()
    assert eval_form(phi, [u, v, w]) == -eval_form(phi, [v, u, w])
    assert eval_form(phi, [u, u, w]) == 0
