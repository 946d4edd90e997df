"""
Exact multilinear algebra on R^n: alternating forms stored as sparse maps
from strictly increasing index tuples to float coefficients.

Indices are 0-based internally.  Serialization and the ``basis_form``
helper use 1-based indices so that ``basis_form(7, 1, 2, 3)`` is e^{123}.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Sequence, Tuple

import numpy as np

Index = Tuple[int, ...]


class FormError(ValueError):
    pass


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 if an entry repeats."""
    seq = list(seq)
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    # count inversions
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class AltForm:
    """A degree-``degree`` alternating form on an ``dim``-dimensional space."""

    degree: int
    dim: int
    terms: Mapping[Index, float] = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.degree <= self.dim:
            raise FormError(f"degree {self.degree} outside 0..{self.dim}")
        clean: Dict[Index, float] = {}
        for idx, c in self.terms.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != self.degree:
                raise FormError(f"index {idx} has wrong length for degree {self.degree}")
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise FormError(f"index {idx} is not strictly increasing")
            if idx and not (0 <= idx[0] and idx[-1] < self.dim):
                raise FormError(f"index {idx} out of range for dim {self.dim}")
            c = float(c)
            if not np.isfinite(c):
                raise FormError("non-finite coefficient")
            if c != 0.0:
                clean[idx] = clean.get(idx, 0.0) + c
        object.__setattr__(self, "terms", {k: v for k, v in clean.items() if v != 0.0})

    # -- construction -----------------------------------------------------

    @classmethod
    def zero(cls, degree: int, dim: int) -> "AltForm":
        return cls(degree, dim, {})

    @classmethod
    def scalar(cls, value: float, dim: int) -> "AltForm":
        return cls(0, dim, {(): value})

    @classmethod
    def from_unsorted(cls, degree: int, dim: int, items: Iterable[Tuple[Index, float]]) -> "AltForm":
        """Build from possibly unsorted index tuples, applying permutation signs."""
        acc: Dict[Index, float] = {}
        for idx, c in items:
            s = perm_sign(idx)
            if s == 0:
                continue
            key = tuple(sorted(idx))
            acc[key] = acc.get(key, 0.0) + s * c
        return cls(degree, dim, acc)

    @classmethod
    def from_tensor(cls, t: np.ndarray) -> "AltForm":
        """Read coefficients off a fully antisymmetric tensor of shape (n,)*p."""
        t = np.asarray(t, dtype=float)
        p, n = t.ndim, (t.shape[0] if t.ndim else 0)
        if p == 0:
            raise FormError("use AltForm.scalar for degree 0")
        terms = {idx: t[idx] for idx in itertools.combinations(range(n), p)}
        return cls(p, n, terms)

    # -- arithmetic -------------------------------------------------------

    def _check_same(self, other: "AltForm"):
        if not isinstance(other, AltForm):
            raise TypeError(f"expected AltForm, got {type(other).__name__}")
        if self.dim != other.dim:
            raise FormError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "AltForm") -> "AltForm":
        self._check_same(other)
        if self.degree != other.degree:
            raise FormError("cannot add forms of different degree")
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, 0.0) + v
        return AltForm(self.degree, self.dim, acc)

    def __neg__(self) -> "AltForm":
        return AltForm(self.degree, self.dim, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other: "AltForm") -> "AltForm":
        return self + (-other)

    def __mul__(self, c: float) -> "AltForm":
        return AltForm(self.degree, self.dim, {k: c * v for k, v in self.terms.items()})

    __rmul__ = __mul__

    def __truediv__(self, c: float) -> "AltForm":
        return self * (1.0 / c)

    def __eq__(self, other) -> bool:
        if not isinstance(other, AltForm):
            return NotImplemented
        return (self.degree, self.dim) == (other.degree, other.dim) and self.terms == other.terms

    def __hash__(self):
        return hash((self.degree, self.dim, tuple(sorted(self.terms.items()))))

    def __xor__(self, other: "AltForm") -> "AltForm":
        return wedge(self, other)

    def coeff(self, *idx1: int) -> float:
        """Coefficient of e^{idx} with 1-based (possibly unsorted) indices."""
        idx = tuple(i - 1 for i in idx1)
        s = perm_sign(idx)
        if s == 0:
            return 0.0
        return s * self.terms.get(tuple(sorted(idx)), 0.0)

    def allclose(self, other: "AltForm", atol: float = 1e-12) -> bool:
        self._check_same(other)
        if self.degree != other.degree:
            return False
        keys = set(self.terms) | set(other.terms)
        return all(abs(self.terms.get(k, 0.0) - other.terms.get(k, 0.0)) <= atol for k in keys)

    def max_abs(self) -> float:
        return max((abs(v) for v in self.terms.values()), default=0.0)

    def top_coefficient(self) -> float:
        if self.degree != self.dim:
            raise FormError("not a top-degree form")
        return self.terms.get(tuple(range(self.dim)), 0.0)

    def to_tensor(self) -> np.ndarray:
        """Dense fully antisymmetric tensor with T[I] = form(e_I)."""
        t = np.zeros((self.dim,) * self.degree)
        for idx, c in self.terms.items():
            for perm in itertools.permutations(range(self.degree)):
                t[tuple(idx[k] for k in perm)] = perm_sign(perm) * c
        return t

    # -- serialization ----------------------------------------------------

    def to_json(self) -> str:
        pairs = [[[i + 1 for i in idx], c] for idx, c in sorted(self.terms.items())]
        return json.dumps({"degree": self.degree, "dim": self.dim, "terms": pairs})

    @classmethod
    def from_json(cls, text: str) -> "AltForm":
        data = json.loads(text)
        items = [(tuple(i - 1 for i in idx), c) for idx, c in data["terms"]]
        return cls.from_unsorted(data["degree"], data["dim"], items)

    def __repr__(self):
        if not self.terms:
            return f"AltForm(0, degree={self.degree}, dim={self.dim})"
        parts = []
        for idx, c in sorted(self.terms.items()):
            name = "e^" + "".join(str(i + 1) for i in idx) if idx else "1"
            parts.append(f"{c:+g}*{name}")
        return "AltForm(" + " ".join(parts) + ")"


def basis_form(dim: int, *idx1: int) -> AltForm:
    """e^{i1...ip} with 1-based indices."""
    idx = tuple(i - 1 for i in idx1)
    return AltForm.from_unsorted(len(idx), dim, [(idx, 1.0)])


def volume_form(dim: int, scale: float = 1.0) -> AltForm:
    return AltForm(dim, dim, {tuple(range(dim)): scale})


def wedge(a: AltForm, b: AltForm) -> AltForm:
    a._check_same(b)
    p, q = a.degree, b.degree
    if p + q > a.dim:
        # no nonzero form of that degree exists; report the zero top form
        return AltForm.zero(a.dim, a.dim)
    acc: Dict[Index, float] = {}
    for ia, ca in a.terms.items():
        for ib, cb in b.terms.items():
            s = perm_sign(ia + ib)
            if s == 0:
                continue
            key = tuple(sorted(ia + ib))
            acc[key] = acc.get(key, 0.0) + s * ca * cb
    return AltForm(p + q, a.dim, acc)


def interior(v, a: AltForm) -> AltForm:
    """Contract ``v`` into the first slot of ``a``."""
    v = np.asarray(v, dtype=float)
    if v.shape != (a.dim,):
        raise FormError(f"vector of shape {v.shape} does not match dim {a.dim}")
    if a.degree == 0:
        raise FormError("interior product of a 0-form")
    acc: Dict[Index, float] = {}
    for idx, c in a.terms.items():
        for k, i in enumerate(idx):
            if v[i] == 0.0:
                continue
            rest = idx[:k] + idx[k + 1:]
            acc[rest] = acc.get(rest, 0.0) + (-1) ** k * v[i] * c
    return AltForm(a.degree - 1, a.dim, acc)


def form_inner(a: AltForm, b: AltForm, g=None) -> float:
    """Inner product of forms induced by the metric ``g`` on vectors.

    Basis forms e^I are orthonormal when ``g`` is the identity.
    """
    a._check_same(b)
    if a.degree != b.degree:
        raise FormError("inner product of forms of different degree")
    if g is None:
        return sum(c * b.terms.get(idx, 0.0) for idx, c in a.terms.items())
    ginv = np.linalg.inv(np.asarray(g, dtype=float))
    total = 0.0
    for ia, ca in a.terms.items():
        for ib, cb in b.terms.items():
            if not ia:
                total += ca * cb
                continue
            total += ca * cb * np.linalg.det(ginv[np.ix_(ia, ib)])
    return float(total)


def hodge(a: AltForm, g=None, mu: AltForm | None = None) -> AltForm:
    """Hodge star fixed by  alpha ^ *beta = <alpha, beta>_g mu.

    ``g`` defaults to the identity and ``mu`` to e^{1...n}.  ``mu`` should be
    the g-volume form for star to square to (-1)^{p(n-p)}.
    """
    n = a.dim
    if mu is None:
        mu = volume_form(n)
    if mu.dim != n or mu.degree != n:
        raise FormError("mu must be a top-degree form of matching dimension")
    m = mu.top_coefficient()
    if m == 0.0:
        raise FormError("zero orientation form")
    if g is not None:
        g = np.asarray(g, dtype=float)
        if not np.allclose(g, g.T) or np.linalg.eigvalsh(g).min() <= 0:
            raise FormError("metric is not symmetric positive-definite")
        if np.array_equal(g, np.eye(n)):
            g = None
    p = a.degree
    full = set(range(n))
    acc: Dict[Index, float] = {}
    for idx in itertools.combinations(range(n), p):
        if g is None:
            ip = a.terms.get(idx, 0.0)
        else:
            ip = form_inner(AltForm(p, n, {idx: 1.0}), a, g)
        if ip == 0.0:
            continue
        comp = tuple(sorted(full - set(idx)))
        acc[comp] = acc.get(comp, 0.0) + perm_sign(idx + comp) * m * ip
    return AltForm(n - p, n, acc)


def eval_form(a: AltForm, vs: Sequence) -> float:
    """a(v_1, ..., v_p) with the determinant convention e^{1..p}(e_1..e_p) = 1."""
    vs = [np.asarray(v, dtype=float) for v in vs]
    if len(vs) != a.degree:
        raise FormError(f"form of degree {a.degree} evaluated on {len(vs)} vectors")
    if a.degree == 0:
        return a.terms.get((), 0.0)
    if any(v.shape != (a.dim,) for v in vs):
        raise FormError("vector dimension does not match form")
    # evaluate in a canonical vector order so that swaps negate exactly
    order = sorted(range(len(vs)), key=lambda k: tuple(vs[k]))
    sign = perm_sign(order)
    if sign == 0 or any(np.array_equal(vs[i], vs[j]) for i, j in zip(order, order[1:])):
        return 0.0
    V = np.stack([vs[k] for k in order], axis=1)
    # LU flags exactly singular minors with a harmless divide warning; det is still 0
    with np.errstate(divide="ignore"):
        total = sum(c * np.linalg.det(V[list(idx), :]) for idx, c in sorted(a.terms.items()))
    return float(sign * total)
