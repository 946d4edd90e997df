"""
Octonions over the basis <1, i, j, k, l, li, lj, lk>.

Coefficient slot m (m = 1..7) of an Octonion is the imaginary unit e_m of
R^7, so ``Octonion.from_imag(v)`` is the standard embedding im O = R^7.

Multiplication is Cayley-Dickson doubling of the quaternions,

    (a, b)(c, d) = (ac - conj(d) b,  d a + b conj(c)),

applied to the pair (a, b) = ((x0, x1, x2, x3), (x4, x5, x6, -x7)).  The
sign flip on the last slot is what makes the induced cross product agree
with the 3-form phi_0.  In this convention

    i.l = e5,   j.l = e6,   k.l = -e7,
    l.i = -e5,  l.j = -e6,  l.k = e7,

so the slots named li, lj only hold l.i, l.j up to sign.
"""

from __future__ import annotations

import numpy as np

_PAIR_SIGN = np.array([1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, -1.0])
_CONJ_SIGN = np.array([1.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0, -1.0])
NAMES = ("1", "i", "j", "k", "l", "li", "lj", "lk")


def quat_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Hamilton product on the last axis (length 4), broadcasting."""
    a1, b1, c1, d1 = np.moveaxis(p, -1, 0)
    a2, b2, c2, d2 = np.moveaxis(q, -1, 0)
    return np.stack([
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ], axis=-1)


def quat_conj(p: np.ndarray) -> np.ndarray:
    return p * np.array([1.0, -1.0, -1.0, -1.0])


def oct_mul_array(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Octonion product of coefficient arrays of shape (..., 8)."""
    x = np.asarray(x, dtype=float) * _PAIR_SIGN
    y = np.asarray(y, dtype=float) * _PAIR_SIGN
    a, b = x[..., :4], x[..., 4:]
    c, d = y[..., :4], y[..., 4:]
    first = quat_mul(a, c) - quat_mul(quat_conj(d), b)
    second = quat_mul(d, a) + quat_mul(b, quat_conj(c))
    return np.concatenate([first, second], axis=-1) * _PAIR_SIGN


class Octonion:
    __slots__ = ("c",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.shape != (8,):
            raise ValueError(f"an octonion needs 8 coefficients, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite octonion coefficient")
        c.setflags(write=False)
        self.c = c

    @classmethod
    def unit(cls, m: int) -> "Octonion":
        """Basis element number m: 0 is 1, 1..7 are e_1..e_7."""
        c = np.zeros(8)
        c[m] = 1.0
        return cls(c)

    @classmethod
    def real(cls, r: float) -> "Octonion":
        return cls([r, 0, 0, 0, 0, 0, 0, 0])

    @classmethod
    def from_imag(cls, v) -> "Octonion":
        v = np.asarray(v, dtype=float)
        if v.shape != (7,):
            raise ValueError("imaginary part must be a 7-vector")
        return cls(np.concatenate([[0.0], v]))

    def __mul__(self, other):
        if isinstance(other, Octonion):
            return Octonion(oct_mul_array(self.c, other.c))
        return Octonion(self.c * float(other))

    def __rmul__(self, other):
        return Octonion(self.c * float(other))

    def __add__(self, other: "Octonion") -> "Octonion":
        return Octonion(self.c + other.c)

    def __sub__(self, other: "Octonion") -> "Octonion":
        return Octonion(self.c - other.c)

    def __neg__(self) -> "Octonion":
        return Octonion(-self.c)

    def __eq__(self, other) -> bool:
        return isinstance(other, Octonion) and np.array_equal(self.c, other.c)

    def __hash__(self):
        return hash(self.c.tobytes())

    def conj(self) -> "Octonion":
        return Octonion(self.c * _CONJ_SIGN)

    def re(self) -> float:
        return float(self.c[0])

    def im(self) -> np.ndarray:
        """Imaginary part as a 7-vector."""
        return self.c[1:].copy()

    def norm(self) -> float:
        return float(np.linalg.norm(self.c))

    def allclose(self, other: "Octonion", atol=1e-12) -> bool:
        return bool(np.allclose(self.c, other.c, rtol=0, atol=atol))

    def __repr__(self):
        parts = [f"{v:+g}{'' if n == '1' else n}" for v, n in zip(self.c, NAMES) if v != 0]
        return "Octonion(" + (" ".join(parts) if parts else "0") + ")"


def conj(x: Octonion) -> Octonion:
    return x.conj()


def re(x: Octonion) -> float:
    return x.re()


def im(x: Octonion) -> np.ndarray:
    return x.im()


def cross_from_oct(u, v) -> np.ndarray:
    """u x v = im(conj(v) . u) with u, v read as imaginary octonions."""
    u8 = np.concatenate([np.zeros(np.shape(u)[:-1] + (1,)), u], axis=-1)
    v8 = np.concatenate([np.zeros(np.shape(v)[:-1] + (1,)), v], axis=-1)
    return oct_mul_array(v8 * _CONJ_SIGN, u8)[..., 1:]


def associator_im(u, v, w) -> np.ndarray:
    """im((u.v).w - u.(v.w)) for imaginary u, v, w given as 7-vectors."""
    def emb(x):
        return np.concatenate([np.zeros(np.shape(x)[:-1] + (1,)), x], axis=-1)
    u8, v8, w8 = emb(u), emb(v), emb(w)
    left = oct_mul_array(oct_mul_array(u8, v8), w8)
    right = oct_mul_array(u8, oct_mul_array(v8, w8))
    return (left - right)[..., 1:]
