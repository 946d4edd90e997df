"""
Discrete analysis on the flat model: T^7 = R^7/Z^7 with constant phi_0 and
the associative torus Y = T^3 spanned by e1, e2, e3.

Fields live on the periodic N x N x N lattice p = idx / N of Y and carry a
trailing fiber axis: R^4 normal fields in Vbasis coordinates of a
splitting, C^2 spinor fields in the (E1, -conj(E2)) basis, R^3 1-forms and
R^7 displacements of immersions.  Grid axis j differentiates along e_{j+1}.

Derivatives are spectral.  The Nyquist mode of an even grid has no real
skew-adjoint derivative, so ``deriv`` annihilates it; kernels and spectra
are therefore computed on the Nyquist-free (band-limited) subspace, where
differentiation is exact.

Inner products on fields are plain sums over grid points.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import scipy.linalg

from .frames import Splitting, clifford_rep, sigma_coefficients, spinor_rep, split
from .g2core import G2Structure, chi, phi_eval

log = logging.getLogger(__name__)

MIN_SINGULAR = 1e-6

# pointwise quadratic forms of sigma: s_b = x^H P_b x for the (u, v, u x v) coefficients
PAULI_HALF = 0.5 * np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)

# per-component charge of the connection on W+ = K^{-1} + C
SPINOR_CHARGES = np.array([1.0, 1.0])


class GridError(ValueError):
    pass


class DegenerateFrameError(ArithmeticError):
    def __init__(self, index, smin):
        super().__init__(f"degenerate tangent frame at grid point {index} (min singular value {smin:.3e})")
        self.index = index
        self.smin = smin


class EigenSolveError(RuntimeError):
    pass


def check_grid_size(N: int) -> int:
    if N < 4 or N % 2:
        raise GridError(f"grid size must be even and >= 4, got {N}")
    return N


def grid_points(N: int) -> np.ndarray:
    """Lattice coordinates p in [0, 1)^3, shape (N, N, N, 3)."""
    s = np.arange(N) / N
    return np.stack(np.meshgrid(s, s, s, indexing="ij"), axis=-1)


def _symbol(N: int) -> np.ndarray:
    k = np.fft.fftfreq(N, d=1.0 / N)
    k[N // 2] = 0.0
    return 2j * np.pi * k


def deriv(f: np.ndarray, axis: int) -> np.ndarray:
    """Spectral derivative along grid axis 0, 1 or 2 (period 1)."""
    if axis not in (0, 1, 2):
        raise GridError(f"axis must be 0, 1 or 2, got {axis}")
    N = f.shape[axis]
    shape = [1] * f.ndim
    shape[axis] = N
    out = np.fft.ifft(np.fft.fft(f, axis=axis) * _symbol(N).reshape(shape), axis=axis)
    return out if np.iscomplexobj(f) else out.real


def laplacian(f: np.ndarray) -> np.ndarray:
    return sum(deriv(deriv(f, j), j) for j in range(3))


def band_limit(f: np.ndarray) -> np.ndarray:
    """Project out every Fourier mode with a Nyquist index on some axis."""
    F = np.fft.fftn(f, axes=(0, 1, 2))
    N = f.shape[0]
    F[N // 2, :, :] = 0
    F[:, N // 2, :] = 0
    F[:, :, N // 2] = 0
    out = np.fft.ifftn(F, axes=(0, 1, 2))
    return out if np.iscomplexobj(f) else out.real


def grid_inner(f: np.ndarray, g: np.ndarray) -> float:
    return float(np.real(np.vdot(f, g)))


def curl(A: np.ndarray) -> np.ndarray:
    """*dA for a 1-form with components A[j] of shape (N, N, N); returns (N, N, N, 3)."""
    A1, A2, A3 = A
    return np.stack([
        deriv(A3, 1) - deriv(A2, 2),
        deriv(A1, 2) - deriv(A3, 0),
        deriv(A2, 0) - deriv(A1, 1),
    ], axis=-1)


def _apply(M: np.ndarray, f: np.ndarray) -> np.ndarray:
    return np.einsum("ab,...b->...a", M, f)


# -- Dirac operators on normal fields -------------------------------------


def standard_splitting(G: Optional[G2Structure] = None) -> Splitting:
    """u = e1, v = e2, u x v = e3 with V-section e4."""
    G = G2Structure.model() if G is None else G
    e = np.eye(7)
    return split(e[0], e[1], G, e[3])


def tangent_clifford(S: Splitting) -> np.ndarray:
    """rho(e_j) for j = 1, 2, 3 as a (3, 4, 4) array in Vbasis coordinates."""
    e = np.eye(7)
    return np.stack([clifford_rep(e[j], S) for j in range(3)])


def dirac(x: np.ndarray, S: Splitting) -> np.ndarray:
    """Untwisted operator sum_j e^j x d_j on normal fields of shape (N, N, N, 4)."""
    rho = tangent_clifford(S)
    return sum(_apply(rho[j], deriv(x, j)) for j in range(3))


def dirac_twisted(x: np.ndarray, a: np.ndarray, S: Splitting) -> np.ndarray:
    """dirac(x) + sum_j rho(e_j)(a_j x) for a twist a of shape (3, N, N, N, 4, 4)."""
    a = np.asarray(a, dtype=float)
    skew = np.abs(a + np.swapaxes(a, -1, -2)).max() if a.size else 0.0
    if skew > 1e-12:
        raise GridError(f"twist is not pointwise skew ({skew:.3e})")
    rho = tangent_clifford(S)
    out = dirac(x, S)
    for j in range(3):
        out = out + _apply(rho[j], np.einsum("...ab,...b->...a", a[j], x))
    return out


def dirac_form_twist(x: np.ndarray, a: np.ndarray, S: Splitting) -> np.ndarray:
    """dirac(x) + a cross x for a 1-form a of shape (N, N, N, 3) on Y."""
    rho = tangent_clifford(S)
    out = dirac(x, S)
    for j in range(3):
        out = out + a[..., j:j + 1] * _apply(rho[j], x)
    return out


# -- kernels and spectra ---------------------------------------------------


@dataclass
class KernelResult:
    dim: int
    smallest: np.ndarray
    values: np.ndarray = field(repr=False)
    symmetric: bool = True


def band_limited_basis(N: int, fiber: int) -> np.ndarray:
    """Orthonormal real basis (columns) of Nyquist-free fields of the given fiber size."""
    nyq = (-1.0) ** np.arange(N)
    Q1 = scipy.linalg.null_space(nyq[None, :])
    Q3 = np.kron(np.kron(Q1, Q1), Q1)
    return np.kron(Q3, np.eye(fiber))


def assemble(op: Callable[[np.ndarray], np.ndarray], N: int, fiber: int, band_limited: bool = True) -> np.ndarray:
    """Dense matrix of a linear field operator, optionally restricted to the Nyquist-free subspace."""
    Q = band_limited_basis(N, fiber) if band_limited else np.eye(N ** 3 * fiber)
    cols = np.empty_like(Q)
    for c in range(Q.shape[1]):
        cols[:, c] = op(Q[:, c].reshape(N, N, N, fiber)).reshape(-1)
    return Q.T @ cols


def kernel_dim(op, N: int, tol_eig: float = 1e-8, fiber: int = 4, symmetric: bool = True,
               band_limited: bool = True) -> KernelResult:
    """Count eigenvalues (singular values if not symmetric) below ``tol_eig``."""
    check_grid_size(N)
    M = assemble(op, N, fiber, band_limited)
    try:
        if symmetric:
            asym = np.abs(M - M.T).max()
            if asym > 1e-8 * max(1.0, np.abs(M).max()):
                raise EigenSolveError(f"operator declared symmetric but asymmetry is {asym:.3e}")
            values = np.linalg.eigvalsh(0.5 * (M + M.T))
        else:
            values = np.linalg.svd(M, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise EigenSolveError(str(exc)) from exc
    mags = np.sort(np.abs(values))
    return KernelResult(int(np.sum(mags < tol_eig)), mags[:10], values, symmetric)


def flat_dirac_square_spectrum(N: int) -> np.ndarray:
    """Eigenvalues (2 pi |k|)^2 of D^2 on band-limited normal fields, with multiplicity 4."""
    k = np.fft.fftfreq(N, d=1.0 / N)
    k = k[np.arange(N) != N // 2]
    K = np.stack(np.meshgrid(k, k, k, indexing="ij"), axis=-1).reshape(-1, 3)
    lam = (2 * np.pi) ** 2 * np.sum(K ** 2, axis=1)
    return np.sort(np.repeat(lam, 4))


# -- Seiberg-Witten-type system --------------------------------------------


def spinor_clifford(S: Splitting) -> np.ndarray:
    """rho_C(e_j) for j = 1, 2, 3 as a (3, 2, 2) complex array."""
    e = np.eye(7)
    return np.stack([spinor_rep(e[j], S) for j in range(3)])


def connection_term(A_j: np.ndarray, x: np.ndarray) -> np.ndarray:
    """i A_j acting on spinor components with charges SPINOR_CHARGES."""
    return 1j * A_j[..., None] * SPINOR_CHARGES * x


def dirac_A(x: np.ndarray, A: np.ndarray, S: Splitting) -> np.ndarray:
    """sum_j rho_C(e_j)(d_j x + i A_j x) on spinor fields (N, N, N, 2)."""
    rho = spinor_clifford(S)
    return sum(_apply(rho[j], deriv(x, j) + connection_term(A[j], x)) for j in range(3))


def sigma_field(x: np.ndarray, S: Splitting) -> np.ndarray:
    """sigma(x) as a 1-form on Y via e_j <-> e^j, shape (N, N, N, 3)."""
    coeffs = sigma_coefficients(x[..., 0], x[..., 1])
    return coeffs @ S.ebasis[:, :3]


def _sigma_forms(S: Splitting) -> np.ndarray:
    """Hermitian Q_k with (sigma_field)_k = x^H Q_k x."""
    return np.einsum("bk,bij->kij", S.ebasis[:, :3], PAULI_HALF)


def sw_residual(x: np.ndarray, A: np.ndarray, S: Splitting):
    """(D_A x, *F_A - sigma(x)) for x of shape (N, N, N, 2) and A of shape (3, N, N, N)."""
    x = np.asarray(x, dtype=complex)
    A = np.asarray(A, dtype=float)
    return dirac_A(x, A, S), curl(A) - sigma_field(x, S)


def sw_energy(x, A, S: Splitting) -> float:
    r1, r2 = sw_residual(x, A, S)
    return float(np.sum(np.abs(r1) ** 2) + np.sum(r2 ** 2))


def sw_gradient(x, A, S: Splitting):
    """Gradient of sw_energy: dE = Re<gx, dx> + <gA, dA> with plain grid sums."""
    x = np.asarray(x, dtype=complex)
    A = np.asarray(A, dtype=float)
    r1, r2 = sw_residual(x, A, S)
    # D_A is self-adjoint, so the first term is 2 D_A r1
    gx = 2.0 * dirac_A(r1, A, S)
    gx -= 4.0 * np.einsum("...k,kij,...j->...i", r2, _sigma_forms(S), x)
    rho = spinor_clifford(S)
    c = curl(np.moveaxis(r2, -1, 0))
    gA = np.empty_like(A)
    for j in range(3):
        image = _apply(rho[j], 1j * SPINOR_CHARGES * x)
        gA[j] = 2.0 * np.real(np.sum(np.conj(r1) * image, axis=-1)) + 2.0 * c[..., j]
    return gx, gA


@dataclass
class DescentResult:
    norms: List[float]
    x: np.ndarray
    A: np.ndarray
    status: str

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def sw_descent(x0, A0, S: Splitting, steps: int = 200, step0: float = 1e-2, shrink: float = 0.5,
               armijo: float = 1e-4, tol: float = 1e-12, max_backtracks: int = 60) -> DescentResult:
    """Gradient descent with Armijo backtracking on the squared residual norm.

    The recorded residual norms are non-increasing by construction.  Stops
    when the norm drops below ``tol``, after ``steps`` accepted steps, or
    when backtracking cannot find a decrease (status "line_search_failed").
    No gauge fixing is applied.
    """
    x = np.array(x0, dtype=complex)
    A = np.array(A0, dtype=float)
    E = sw_energy(x, A, S)
    norms = [np.sqrt(E)]
    t = step0
    for _ in range(steps):
        if norms[-1] <= tol:
            return DescentResult(norms, x, A, "converged")
        gx, gA = sw_gradient(x, A, S)
        gnorm2 = float(np.sum(np.abs(gx) ** 2) + np.sum(gA ** 2))
        if gnorm2 == 0.0:
            return DescentResult(norms, x, A, "converged")
        for _ in range(max_backtracks):
            x_new, A_new = x - t * gx, A - t * gA
            E_new = sw_energy(x_new, A_new, S)
            if E_new <= E - armijo * t * gnorm2:
                break
            t *= shrink
        else:
            log.warning("line search failed at residual %.3e", norms[-1])
            return DescentResult(norms, x, A, "line_search_failed")
        x, A, E = x_new, A_new, E_new
        norms.append(np.sqrt(E))
        t /= shrink
    status = "converged" if norms[-1] <= tol else "budget_exhausted"
    return DescentResult(norms, x, A, status)


# -- chi-flow of immersed tori ---------------------------------------------


def tangents(d: np.ndarray) -> np.ndarray:
    """Tangent frames e_j + d_j(displacement), shape (N, N, N, 3, 7)."""
    t = np.stack([deriv(d, j) for j in range(3)], axis=-2)
    t[..., 0, 0] += 1.0
    t[..., 1, 1] += 1.0
    t[..., 2, 2] += 1.0
    return t


def orthonormal_tangents(d: np.ndarray, G: G2Structure) -> np.ndarray:
    """Ordered Gram-Schmidt of the tangent frames at every grid point."""
    t = tangents(d)
    smin = np.linalg.svd(t, compute_uv=False)[..., -1]
    if smin.min() <= MIN_SINGULAR:
        idx = np.unravel_index(np.argmin(smin), smin.shape)
        raise DegenerateFrameError(tuple(int(i) for i in idx), float(smin.min()))
    q = np.empty_like(t)
    for j in range(3):
        w = t[..., j, :].copy()
        for i in range(j):
            w -= G.inner(q[..., i, :], w)[..., None] * q[..., i, :]
        q[..., j, :] = w / G.norm(w)[..., None]
    return q


def chi_field(d: np.ndarray, G: G2Structure) -> np.ndarray:
    q = orthonormal_tangents(d, G)
    return chi(G, q[..., 0, :], q[..., 1, :], q[..., 2, :])


def chi_flow_step(d: np.ndarray, dt: float, G: G2Structure) -> np.ndarray:
    """One explicit Euler step of the displacement along chi of the unit tangent frame."""
    return d + dt * chi_field(d, G)


@dataclass(frozen=True)
class Defect:
    L2: float
    max: float
    calib_min: float


def defect(d: np.ndarray, G: G2Structure) -> Defect:
    q = orthonormal_tangents(d, G)
    c = chi(G, q[..., 0, :], q[..., 1, :], q[..., 2, :])
    mag = np.sqrt(np.sum(c ** 2, axis=-1))
    calib = phi_eval(G, q[..., 0, :], q[..., 1, :], q[..., 2, :])
    return Defect(float(np.sqrt(np.sum(mag ** 2))), float(mag.max()), float(calib.min()))


def perturbed_inclusion(N: int, eps: float) -> np.ndarray:
    """Displacement eps * sin(2 pi p1) e4 of the flat inclusion."""
    p = grid_points(N)
    d = np.zeros((N, N, N, 7))
    d[..., 3] = eps * np.sin(2 * np.pi * p[..., 0])
    return d


@dataclass
class FlowResult:
    defects: List[Defect]
    d: np.ndarray
    status: str
    error: Optional[str] = None
    step_changes: List[float] = field(default_factory=list)


def chi_flow(d0: np.ndarray, dt: float, steps: int, G: G2Structure) -> FlowResult:
    """Run ``steps`` Euler steps, recording the defect before the first and after each step.

    A degenerate tangent frame stops the run with status "degenerate"; the
    trajectory up to that point is kept.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    d = np.array(d0, dtype=float)
    defects = [defect(d, G)]
    changes = []
    for _ in range(steps):
        try:
            new = chi_flow_step(d, dt, G)
            defects.append(defect(new, G))
        except DegenerateFrameError as exc:
            return FlowResult(defects, d, "degenerate", str(exc), changes)
        if not np.all(np.isfinite(new)):
            return FlowResult(defects, d, "diverged", "non-finite displacement", changes)
        changes.append(float(np.abs(new - d).max()))
        d = new
    return FlowResult(defects, d, "ok", None, changes)
