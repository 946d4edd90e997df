"""
Oriented 3- and 4-planes in R^7, the normal field chi on 3-planes and the
tangent space of the associative Grassmannian.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .g2core import G2Structure, chi, cross, phi_eval

ORTHO_TOL = 1e-10
ASSOC_TOL = 1e-8


class FrameError(ValueError):
    pass


def _check_orthonormal(vectors: np.ndarray, G: G2Structure, tol: float = ORTHO_TOL):
    gram = vectors @ G.g @ vectors.T
    err = np.abs(gram - np.eye(len(vectors))).max()
    if err > tol:
        raise FrameError(f"frame is not orthonormal (Gram defect {err:.3e})")


@dataclass(frozen=True)
class OrientedFrame3:
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray

    def __post_init__(self):
        for name in ("e1", "e2", "e3"):
            v = np.array(getattr(self, name), dtype=float)
            if v.shape != (7,):
                raise FrameError(f"{name} must be a 7-vector")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def vectors(self) -> np.ndarray:
        return np.stack([self.e1, self.e2, self.e3])

    def check(self, G: G2Structure, tol: float = ORTHO_TOL) -> "OrientedFrame3":
        _check_orthonormal(self.vectors, G, tol)
        return self


@dataclass(frozen=True)
class OrientedFrame4:
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    e4: np.ndarray

    @property
    def vectors(self) -> np.ndarray:
        return np.stack([np.asarray(v, dtype=float) for v in (self.e1, self.e2, self.e3, self.e4)])


@dataclass(frozen=True)
class GrassTangent:
    """The tangent vector sum_j e^j (x) v_j with each v_j normal to the plane."""

    v1: np.ndarray
    v2: np.ndarray
    v3: np.ndarray

    @property
    def vectors(self) -> np.ndarray:
        return np.stack([np.asarray(v, dtype=float) for v in (self.v1, self.v2, self.v3)])

    @classmethod
    def from_vectors(cls, vs) -> "GrassTangent":
        vs = np.asarray(vs, dtype=float)
        return cls(vs[0], vs[1], vs[2])

    def check(self, L: OrientedFrame3, G: G2Structure, tol: float = ORTHO_TOL) -> "GrassTangent":
        overlap = np.abs(self.vectors @ G.g @ L.vectors.T).max()
        if overlap > tol:
            raise FrameError(f"tangent components are not normal to the plane ({overlap:.3e})")
        return self


def gram_schmidt(vectors, G: G2Structure | None = None, tol: float = 1e-12) -> np.ndarray:
    """Ordered Gram-Schmidt in the metric of ``G`` (Euclidean if None)."""
    g = np.eye(7) if G is None else G.g
    out = []
    for v in np.asarray(vectors, dtype=float):
        w = v.copy()
        for q in out:
            w = w - (q @ g @ w) * q
        n = np.sqrt(w @ g @ w)
        if n <= tol * max(1.0, np.sqrt(v @ g @ v)):
            raise FrameError("vectors are linearly dependent")
        out.append(w / n)
    return np.array(out)


def random_frame(rng: np.random.Generator, k: int, G: G2Structure | None = None) -> np.ndarray:
    """k orthonormal vectors from Gaussian samples and Gram-Schmidt."""
    return gram_schmidt(rng.standard_normal((k, 7)), G)


def is_associative(L: OrientedFrame3, G: G2Structure, tol: float = ASSOC_TOL) -> bool:
    L.check(G)
    return bool(phi_eval(G, L.e1, L.e2, L.e3) >= 1.0 - tol)


def is_coassociative(X: OrientedFrame4, G: G2Structure, tol: float = ASSOC_TOL) -> bool:
    vs = X.vectors
    _check_orthonormal(vs, G)
    worst = max(
        abs(float(phi_eval(G, vs[a], vs[b], vs[c])))
        for a, b, c in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3))
    )
    return worst < tol


def chi_normal(L: OrientedFrame3, G: G2Structure) -> np.ndarray:
    """chi(e1, e2, e3): normal to L, zero exactly when L is associative."""
    return chi(G, L.e1, L.e2, L.e3)


def associative_plane_from(u, v, G: G2Structure) -> OrientedFrame3:
    """The associative plane <u, v, u x v> after orthonormalizing u, v."""
    try:
        q = gram_schmidt([u, v], G)
    except FrameError:
        raise FrameError("u and v are parallel") from None
    return OrientedFrame3(q[0], q[1], cross(G, q[0], q[1]))


def tangent_constraint(L: OrientedFrame3, t: GrassTangent, G: G2Structure) -> np.ndarray:
    """sum_j e_j x v_j; zero iff t is tangent to the associative Grassmannian."""
    return cross(G, L.vectors, t.vectors).sum(axis=0)


def constraint_matrix(L: OrientedFrame3, G: G2Structure):
    """The constraint as a linear map on (R^4)^3.

    Returns (C, B): B is a 4x7 orthonormal basis of the normal space (rows)
    and C the 4x12 matrix of t -> sum e_j x v_j in those coordinates, with
    t flattened as (v1, v2, v3) each in B-coordinates.
    """
    B = normal_basis(L, G)
    blocks = []
    for e in L.vectors:
        # columns: image of each normal basis vector, expressed back in B
        images = cross(G, np.broadcast_to(e, B.shape), B)
        blocks.append(B @ G.g @ images.T)
    return np.hstack(blocks), B


def normal_basis(L: OrientedFrame3, G: G2Structure) -> np.ndarray:
    """Orthonormal basis (rows) of the orthogonal complement of L."""
    E = L.vectors
    # complete E with the coordinate vectors, keep what survives Gram-Schmidt
    out = list(E)
    g = G.g
    for v in np.eye(7):
        w = v.copy()
        for q in out:
            w = w - (q @ g @ w) * q
        n = np.sqrt(w @ g @ w)
        if n > 1e-6:
            out.append(w / n)
        if len(out) == 7:
            break
    return np.array(out[3:])


def project_to_associative_tangent(L: OrientedFrame3, t: GrassTangent, G: G2Structure) -> GrassTangent:
    """Closest tangent (flat metric on (R^4)^3) satisfying sum e_j x v_j = 0."""
    C, B = constraint_matrix(L, G)
    coords = (t.vectors @ G.g @ B.T).reshape(12)
    correction = np.linalg.pinv(C) @ (C @ coords)
    projected = (coords - correction).reshape(3, 4)
    return GrassTangent.from_vectors(projected @ B)
