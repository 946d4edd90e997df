"""
Splittings R^7 = E + V induced by an orthonormal 2-frame {u, v}, the
hypercomplex triple on V, the real and spinor Clifford representations of
E, the quadratic map sigma, and the phi_lambda family of G2 structures
sharing one metric.

Frame conventions
-----------------
For a splitting with unit section w of V we store

    Vbasis = (w, J1 w, J2 w, J3 w),   J1 = J_{u x v}, J2 = J_u, J3 = J_v,

where J_xi(x) = x cross xi.  The spinor frame is

    (f4, f5, f6, f7) = (w, -J1 w, -J2 w, J3 w),

which is the coordinate frame (e4, e5, e6, e7) when (u x v, u, v, w) =
(e1, e2, e3, e4).  Spinor coordinates (z, w) refer to the ordered basis
(E1, -conj(E2)) with E1 = f4 + i f5 and E2 = f6 + i f7.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exterior import AltForm, hodge, interior, wedge
from .g2core import G2Structure, chi, cross
from .grassmann import FrameError, gram_schmidt

FRAME_TOL = 1e-10
ROUNDTRIP_TOL = 1e-9


class LambdaError(ValueError):
    pass


def J_xi(xi, x, G: G2Structure) -> np.ndarray:
    """Complex structure x -> x cross xi on the complement of a unit xi."""
    return cross(G, x, xi)


@dataclass(frozen=True, eq=False)
class Splitting:
    u: np.ndarray
    v: np.ndarray
    e3: np.ndarray
    vbasis: np.ndarray
    G: G2Structure

    @property
    def ebasis(self) -> np.ndarray:
        """(u, v, u x v) as rows."""
        return np.stack([self.u, self.v, self.e3])

    @property
    def frame7(self) -> np.ndarray:
        return np.vstack([self.ebasis, self.vbasis])

    @property
    def spinor_frame(self) -> np.ndarray:
        """(f4, f5, f6, f7) as rows."""
        return self.vbasis * np.array([1.0, -1.0, -1.0, 1.0])[:, None]

    def to_v(self, x) -> np.ndarray:
        """Ambient vectors (..., 7) to Vbasis coordinates (..., 4)."""
        return np.einsum("ai,ij,...j->...a", self.vbasis, self.G.g, x)

    def from_v(self, c) -> np.ndarray:
        return np.einsum("...a,ai->...i", c, self.vbasis)

    def spinor_basis(self) -> np.ndarray:
        """The complex vectors E1 and -conj(E2) as rows of a 2x7 array."""
        f4, f5, f6, f7 = self.spinor_frame
        return np.stack([f4 + 1j * f5, -(f6 - 1j * f7)])


def split(u, v, G: G2Structure, w_hint=None) -> Splitting:
    """E = <u, v, u x v> and V its complement, with a J-adapted basis of V."""
    try:
        q = gram_schmidt([u, v], G)
    except FrameError:
        raise FrameError("u and v are parallel") from None
    u, v = q
    e3 = cross(G, u, v)
    E = np.stack([u, v, e3])
    candidates = [np.asarray(w_hint, dtype=float)] if w_hint is not None else list(np.eye(7)[3:]) + list(np.eye(7)[:3])
    w = None
    for cand in candidates:
        comp = cand - (E @ G.g @ cand) @ E
        n = G.norm(comp)
        if n > 1e-6 * max(1.0, G.norm(cand)):
            w = comp / n
            break
    if w is None:
        raise FrameError("w_hint lies inside E")
    vbasis = np.stack([w, J_xi(e3, w, G), J_xi(u, w, G), J_xi(v, w, G)])
    return Splitting(u, v, e3, vbasis, G)


def check_splitting(S: Splitting, tol: float = FRAME_TOL) -> float:
    """Largest deviation of the 7-frame from orthonormality."""
    F = S.frame7
    err = float(np.abs(F @ S.G.g @ F.T - np.eye(7)).max())
    if err > tol:
        raise FrameError(f"splitting frame not orthonormal ({err:.3e})")
    return err


def _operator_matrix(S: Splitting, fn) -> np.ndarray:
    """Matrix in Vbasis coordinates of a linear map on ambient vectors."""
    images = np.stack([fn(b) for b in S.vbasis])
    return S.to_v(images).T


@dataclass(frozen=True, eq=False)
class HyperComplex:
    J1: np.ndarray
    J2: np.ndarray
    J3: np.ndarray

    def as_tuple(self):
        return self.J1, self.J2, self.J3


def hypercomplex(S: Splitting) -> HyperComplex:
    G = S.G
    return HyperComplex(
        _operator_matrix(S, lambda x: J_xi(S.e3, x, G)),
        _operator_matrix(S, lambda x: J_xi(S.u, x, G)),
        _operator_matrix(S, lambda x: J_xi(S.v, x, G)),
    )


def _check_in_E(a, S: Splitting, tol=1e-10):
    a = np.asarray(a, dtype=float)
    resid = a - (S.ebasis @ S.G.g @ a) @ S.ebasis
    if np.abs(resid).max() > tol * max(1.0, np.abs(a).max()):
        raise FrameError("vector is not in E")
    return a


def clifford_rep(a, S: Splitting) -> np.ndarray:
    """rho(a) x = a cross x on V, as a 4x4 matrix in Vbasis coordinates."""
    a = _check_in_E(a, S)
    return _operator_matrix(S, lambda x: cross(S.G, a, x))


def spinor_rep(a, S: Splitting) -> np.ndarray:
    """rho_C(a) on S = <E1, -conj(E2)> as a complex 2x2 matrix."""
    a = _check_in_E(a, S)
    basis = S.spinor_basis()
    images = np.stack([cross(S.G, a, b.real) + 1j * cross(S.G, a, b.imag) for b in basis])
    # E1 and -conj(E2) are Hermitian-orthogonal with squared norm 2
    gram = basis.conj() @ S.G.g @ basis.T
    coeffs = (basis.conj() @ S.G.g @ images.T) / np.diag(gram).real[:, None]
    resid = np.abs(basis.T @ coeffs - images.T).max()
    if resid > 1e-10:
        raise FrameError(f"cross product does not preserve the spinor plane ({resid:.3e})")
    return coeffs


def realify(M: np.ndarray) -> np.ndarray:
    """Real 4x4 matrix of a complex 2x2 map on (Re z, Im z, Re w, Im w)."""
    R = np.zeros((4, 4))
    for r in range(2):
        for c in range(2):
            a, b = M[r, c].real, M[r, c].imag
            R[2 * r:2 * r + 2, 2 * c:2 * c + 2] = [[a, -b], [b, a]]
    return R


def spinor_to_v_matrix(S: Splitting) -> np.ndarray:
    """Real isomorphism S -> V, x -> Re(x), from (Re z, Im z, Re w, Im w) to Vbasis coordinates."""
    s1, s2 = S.spinor_basis()
    cols = [s1.real, -s1.imag, s2.real, -s2.imag]
    return S.to_v(np.stack(cols)).T


@dataclass(frozen=True)
class SpinorPoint:
    z: complex
    w: complex

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.z, self.w], dtype=complex)

    def norm_sq(self) -> float:
        return abs(self.z) ** 2 + abs(self.w) ** 2


def sigma_coefficients(z, w) -> np.ndarray:
    """(u, v, u x v) coefficients of sigma(z, w); broadcasts over arrays."""
    z, w = np.asarray(z), np.asarray(w)
    return np.stack([
        np.real(z * np.conj(w)),
        np.imag(w * np.conj(z)),
        (np.abs(z) ** 2 - np.abs(w) ** 2) / 2,
    ], axis=-1)


def sigma(p: SpinorPoint, S: Splitting) -> np.ndarray:
    """(|z|^2 - |w|^2)/2 u x v + Re(z conj w) u + Im(w conj z) v."""
    cu, cv, cuv = sigma_coefficients(p.z, p.w)
    return cuv * S.e3 + cu * S.u + cv * S.v


def sigma_matrix(p: SpinorPoint) -> np.ndarray:
    """sigma(z, w) as the traceless Hermitian 2x2 matrix."""
    z, w = p.z, p.w
    d = (abs(z) ** 2 - abs(w) ** 2) / 2
    return np.array([[d, z * np.conj(w)], [w * np.conj(z), -d]], dtype=complex)


def sigma_pairing(p: SpinorPoint) -> float:
    """<sigma(x) x, x>, equal to |x|^4 / 2."""
    x = p.vector
    return float(np.real(np.conj(x) @ sigma_matrix(p) @ x))


def chirality(S: Splitting) -> tuple:
    """Hodge-star eigenvalue (+1 or -1) of each omega_p(x, y) = <J_p x, y> on V.

    V carries the orientation of the spinor frame f4^f5^f6^f7, which equals
    that of Vbasis.  Raises if some omega_p is neither self-dual nor
    anti-self-dual.
    """
    out = []
    for J in hypercomplex(S).as_tuple():
        omega = AltForm.from_tensor(J.T)
        star = hodge(omega)
        if star.allclose(omega, 1e-10):
            out.append(1)
        elif star.allclose(-omega, 1e-10):
            out.append(-1)
        else:
            raise FrameError("omega is neither self-dual nor anti-self-dual")
    return tuple(out)


@dataclass(frozen=True)
class Lambda:
    """Projective parameter [a, alpha] with a^2 + |alpha|^2 = 1 (alpha stored as a vector)."""

    a: float
    alpha: np.ndarray

    def __post_init__(self):
        alpha = np.array(self.alpha, dtype=float)
        if alpha.shape != (7,):
            raise LambdaError("alpha must be a 7-vector")
        if abs(self.a ** 2 + alpha @ alpha - 1.0) > 1e-10:
            raise LambdaError(f"a^2 + |alpha|^2 = {self.a ** 2 + alpha @ alpha!r}, expected 1")
        alpha.setflags(write=False)
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "alpha", alpha)

    def __neg__(self) -> "Lambda":
        return Lambda(-self.a, -self.alpha)

    @classmethod
    def random(cls, rng: np.random.Generator, alpha_max: float = 1.0) -> "Lambda":
        alpha = rng.standard_normal(7)
        alpha *= rng.uniform(0, alpha_max) / np.linalg.norm(alpha)
        a = np.sqrt(1.0 - alpha @ alpha) * rng.choice([-1.0, 1.0])
        return cls(a, alpha)


def phi_lambda(G: G2Structure, lam: Lambda) -> AltForm:
    """phi - 2 alpha# _| [a (*phi) + alpha ^ phi]."""
    alpha_sharp = lam.alpha
    alpha_flat = AltForm(1, 7, {(i,): c for i, c in enumerate(G.g @ alpha_sharp)})
    bracket = lam.a * G.star_phi + wedge(alpha_flat, G.phi)
    return G.phi - 2.0 * interior(alpha_sharp, bracket)


def cross_lambda(G: G2Structure, u, v, lam: Lambda) -> np.ndarray:
    """(u x v)_lambda from the closed-form expansion in the undeformed products."""
    u, v = np.asarray(u, dtype=float), np.asarray(v, dtype=float)
    al = lam.alpha
    uv = cross(G, u, v)
    alpha_u, alpha_v = G.inner(al, u), G.inner(al, v)
    half = (
        uv / 2
        - G.inner(al, al) * uv
        - lam.a * chi(G, u, v, al)
        + alpha_v * cross(G, u, al)
        - alpha_u * cross(G, v, al)
        + al * G.inner(uv, al)
    )
    return 2.0 * half


def deformed_structure(G: G2Structure, lam: Lambda) -> G2Structure:
    return G2Structure(phi_lambda(G, lam), G.mu)


def cross_lambda_direct(G: G2Structure, u, v, lam: Lambda) -> np.ndarray:
    """(u x v)_lambda read off phi_lambda with its own recovered metric."""
    return cross(deformed_structure(G, lam), u, v)


def deformation_target_q(G: G2Structure, u, v, w) -> np.ndarray:
    """q = J_{v x u}(w0_perp) with w0 = ((u x v) - w) / 2."""
    S = split(u, v, G)
    w = np.asarray(w, dtype=float)
    w0 = 0.5 * (S.e3 - w)
    w0_perp = w0 - (S.ebasis @ G.g @ w0) @ S.ebasis
    return J_xi(cross(G, S.v, S.u), w0_perp, G)


def solve_alpha_for_w(G: G2Structure, u, v, w, tol: float = 1e-12) -> Lambda:
    """lambda = [a, alpha] with alpha in V and (u x v)_lambda = w.

    The V-component of the target fixes alpha# = -(1/a) J(w0_perp), and the
    constraint a^2 + |alpha|^2 = 1 then gives a^4 - a^2 + |q|^2 = 0.  Of
    its two roots, the one consistent with the (u x v)-component of the
    target has a^2 = (1 + <w, u x v>) / 2; this is the root nearest 1
    whenever w leans toward u x v.  a is taken positive.
    """
    u, v, w = (np.asarray(t, dtype=float) for t in (u, v, w))
    if abs(G.norm(u) - 1) > 1e-10 or abs(G.norm(v) - 1) > 1e-10 or abs(G.inner(u, v)) > 1e-10:
        raise LambdaError("u, v must be orthonormal")
    if abs(G.norm(w) - 1.0) > 1e-10:
        raise LambdaError("target w must be a unit vector")
    if max(abs(G.inner(w, u)), abs(G.inner(w, v))) > 1e-10:
        raise LambdaError("target w must be orthogonal to u and v")
    S = split(u, v, G)
    q = deformation_target_q(G, u, v, w)
    q2 = float(G.inner(q, q))
    if np.sqrt(q2) > 0.5 + tol:
        raise LambdaError(f"|q| = {np.sqrt(q2):.6f} exceeds 1/2; no admissible lambda")
    disc = np.sqrt(max(0.0, 1.0 - 4.0 * q2))
    c = float(G.inner(w, S.e3))
    a2 = (1.0 + disc) / 2 if c >= 0 else (1.0 - disc) / 2
    if a2 <= tol:
        raise LambdaError("target is -(u x v); a vanishes and alpha is undetermined")
    a = np.sqrt(a2)
    alpha = -q / a
    n = G.norm(alpha)
    if n > 0:
        # |alpha|^2 = |q|^2 / a^2 = 1 - a^2 up to rounding
        alpha = alpha * (np.sqrt(1.0 - a2) / n)
    return Lambda(a, alpha)
