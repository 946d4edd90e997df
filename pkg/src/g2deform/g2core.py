"""
The model G2 structure on R^7 and the products it induces.

All vector operations broadcast over leading axes: ``u`` of shape (..., 7).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .exterior import AltForm, FormError, basis_form, hodge, interior, volume_form, wedge

PHI0_TERMS = (
    ((1, 2, 3), 1.0),
    ((1, 4, 5), 1.0),
    ((1, 6, 7), 1.0),
    ((2, 4, 6), 1.0),
    ((2, 5, 7), -1.0),
    ((3, 4, 7), -1.0),
    ((3, 5, 6), -1.0),
)


def phi0() -> AltForm:
    """e^123 + e^145 + e^167 + e^246 - e^257 - e^347 - e^356."""
    out = AltForm.zero(3, 7)
    for idx, c in PHI0_TERMS:
        out = out + c * basis_form(7, *idx)
    return out


def mu0() -> AltForm:
    return volume_form(7)


def metric_from_phi(phi: AltForm, mu: AltForm, u, v) -> float:
    """<u, v> = [(u _| phi) ^ (v _| phi) ^ phi] / (6 mu)."""
    m = mu.top_coefficient()
    if m == 0.0:
        raise FormError("zero orientation form")
    top = wedge(wedge(interior(u, phi), interior(v, phi)), phi)
    return top.top_coefficient() / (6.0 * m)


def metric_matrix(phi: AltForm, mu: AltForm) -> np.ndarray:
    n = phi.dim
    e = np.eye(n)
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = metric_from_phi(phi, mu, e[i], e[j])
    return g


@dataclass(frozen=True, eq=False)
class G2Structure:
    """A 3-form with its orientation, recovered metric and cached 4-form *phi.

    ``g`` is recovered from ``phi`` and ``mu`` unless supplied.  The dense
    tensors are cached for the broadcasting products below.
    """

    phi: AltForm
    mu: AltForm
    g: np.ndarray = None
    star_phi: AltForm = None
    phi_t: np.ndarray = field(init=False, repr=False)
    star_t: np.ndarray = field(init=False, repr=False)
    ginv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.phi.degree != 3 or self.phi.dim != 7:
            raise FormError("phi must be a 3-form on R^7")
        g = metric_matrix(self.phi, self.mu) if self.g is None else np.asarray(self.g, dtype=float)
        if not np.allclose(g, g.T, atol=1e-12):
            raise FormError("metric is not symmetric")
        if np.linalg.eigvalsh(g).min() <= 0:
            raise FormError("recovered metric is not positive-definite")
        g = g.copy()
        g.setflags(write=False)
        object.__setattr__(self, "g", g)
        if self.star_phi is None:
            object.__setattr__(self, "star_phi", hodge(self.phi, g, self.mu))
        ginv = np.eye(7) if np.array_equal(g, np.eye(7)) else np.linalg.inv(g)
        object.__setattr__(self, "ginv", ginv)
        object.__setattr__(self, "phi_t", self.phi.to_tensor())
        object.__setattr__(self, "star_t", self.star_phi.to_tensor())

    @classmethod
    def model(cls) -> "G2Structure":
        return _model()

    def inner(self, u, v) -> np.ndarray:
        return np.einsum("...i,ij,...j->...", u, self.g, v)

    def norm(self, u) -> np.ndarray:
        return np.sqrt(self.inner(u, u))

    def raise_index(self, w) -> np.ndarray:
        return np.einsum("ij,...j->...i", self.ginv, w)


@lru_cache(maxsize=1)
def _model() -> G2Structure:
    return G2Structure(phi0(), mu0())


def phi_eval(G: G2Structure, u, v, w) -> np.ndarray:
    return np.einsum("ijk,...i,...j,...k->...", G.phi_t, u, v, w)


def cross(G: G2Structure, u, v) -> np.ndarray:
    """phi(u, v, w) = <u x v, w>."""
    return G.raise_index(np.einsum("ijk,...i,...j->...k", G.phi_t, u, v))


def psi(G: G2Structure, u, v) -> np.ndarray:
    """<psi(u, v), w> = phi(u, v, w), computed by contracting the stored form."""
    one_form = interior(np.asarray(v, dtype=float), interior(np.asarray(u, dtype=float), G.phi))
    lowered = np.zeros(7)
    for (i,), c in one_form.terms.items():
        lowered[i] = c
    # v _| u _| phi puts u in the first slot and v in the second
    return G.raise_index(lowered)


def chi_via_star(G: G2Structure, u, v, w) -> np.ndarray:
    """<chi(u, v, w), z> = *phi(u, v, w, z)."""
    return G.raise_index(np.einsum("ijkl,...i,...j,...k->...l", G.star_t, u, v, w))


def chi_via_cross(G: G2Structure, u, v, w) -> np.ndarray:
    """chi(u, v, w) = -u x (v x w) - <u, v> w + <u, w> v."""
    u, v, w = (np.asarray(a, dtype=float) for a in (u, v, w))
    return (
        -cross(G, u, cross(G, v, w))
        - G.inner(u, v)[..., None] * w
        + G.inner(u, w)[..., None] * v
    )


chi = chi_via_cross


def two_form_action(G: G2Structure, a, b, x, route: str = "cross") -> np.ndarray:
    """Clifford action of the 2-form a^b on x.

    route="cross":       (1/2)[a x (b x x) - b x (a x x)]
    route="contraction": (1/2) x _| (a^b) - chi(a, b, x)
    """
    a, b, x = (np.asarray(t, dtype=float) for t in (a, b, x))
    if route == "cross":
        return 0.5 * (cross(G, a, cross(G, b, x)) - cross(G, b, cross(G, a, x)))
    if route == "contraction":
        contracted = G.inner(x, a)[..., None] * b - G.inner(x, b)[..., None] * a
        return 0.5 * contracted - chi(G, a, b, x)
    raise ValueError(f"unknown route {route!r}")


def triple_volume_sq(G: G2Structure, u, v, w) -> np.ndarray:
    """|u ^ v ^ w|^2 as the Gram determinant."""
    M = np.stack([u, v, w], axis=-2)
    gram = np.einsum("...ai,ij,...bj->...ab", M, G.g, M)
    return np.linalg.det(gram)


def associator_defect(G: G2Structure, u, v, w) -> np.ndarray:
    """phi(u,v,w)^2 + |chi(u,v,w)|^2 - |u^v^w|^2; vanishes identically.

    With the octonion associator [u,v,w] = 2 chi(u,v,w) this is the familiar
    phi^2 + |[u,v,w]|^2 / 4 = |u^v^w|^2.
    """
    c = chi(G, u, v, w)
    return phi_eval(G, u, v, w) ** 2 + G.inner(c, c) - triple_volume_sq(G, u, v, w)
