"""Small dense complex linear algebra used as the reference route.

Everything here works on ``(4, 4)`` complex arrays and also on stacks of
shape ``(..., n, n)`` so that ensemble checks can be vectorised. The
eigensolver is a cyclic complex Jacobi iteration; singular values and the
trace norm are built on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotHermitian

__all__ = [
    "Tolerance",
    "DEFAULT_TOL",
    "as_matrix",
    "check_hermitian",
    "hermitian_eigenvalues",
    "hermitian_eigh",
    "singular_values",
    "trace_norm",
]

_MAX_SWEEPS = 60
# Squared off-diagonal mass relative to the squared Frobenius norm at which a
# sweep is considered converged.
_CONVERGED = 1e-34
_CLAMP_FLOOR = -1e-12


@dataclass(frozen=True)
class Tolerance:
    """Thresholds shared by every validation and comparison in the package."""

    eps_herm: float = 1e-10
    eps_psd: float = 1e-10
    eps_eq: float = 1e-9

    def __post_init__(self):
        for name in ("eps_herm", "eps_psd", "eps_eq"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a positive finite number, got {value!r}")


DEFAULT_TOL = Tolerance()


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a complex array of square matrices, rejecting non-finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def check_hermitian(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Raise :class:`NotHermitian` unless ``max|m_ij - conj(m_ji)| <= tol.eps_herm``."""
    a = as_matrix(m)
    dev = np.max(np.abs(a - np.conj(np.swapaxes(a, -1, -2))), initial=0.0)
    if dev > tol.eps_herm:
        raise NotHermitian(f"matrix deviates from Hermitian by {dev:.3e} > {tol.eps_herm:.1e}")
    return a


def _jacobi(a: np.ndarray, vectors: bool):
    """Cyclic Jacobi diagonalisation of a stack of Hermitian matrices.

    Each rotation acts on the (p, q) plane as ``G = U J U^H`` where ``U``
    strips the phase of ``a[p, q]`` and ``J`` is the classical real Jacobi
    rotation, so the pivot is annihilated exactly.
    """
    a = 0.5 * (a + np.conj(np.swapaxes(a, -1, -2)))
    batch = a.shape[:-2]
    n = a.shape[-1]
    a = a.reshape((-1, n, n))
    # Work at unit scale so squared norms neither underflow nor overflow.
    peak = np.max(np.abs(a), axis=(-1, -2))
    peak = np.where(peak > 0, peak, 1.0)
    # Real division: complex division by a subnormal real overflows internally.
    a = a.real / peak[:, None, None] + 1j * (a.imag / peak[:, None, None])
    v = np.broadcast_to(np.eye(n, dtype=np.complex128), a.shape).copy() if vectors else None

    scale = np.sum(np.abs(a) ** 2, axis=(-1, -2))
    tiny = np.finfo(float).tiny
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(_MAX_SWEEPS):
        off = np.sum(np.abs(a[:, offdiag]) ** 2, axis=-1)
        if np.all(off <= _CONVERGED * scale + tiny):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                mag = np.abs(apq)
                active = mag > tiny
                safe = np.where(active, mag, 1.0)
                phase = np.where(active, apq / safe, 1.0)
                theta = (a[:, q, q].real - a[:, p, p].real) / (2.0 * safe)
                sign = np.where(theta >= 0, 1.0, -1.0)
                with np.errstate(over="ignore"):
                    t = sign / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
                t = np.where(active & np.isfinite(theta), t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                sp = s * phase
                spc = np.conj(sp)

                # A <- A G (columns p, q)
                colp = a[:, :, p].copy()
                colq = a[:, :, q]
                a[:, :, p] = c[:, None] * colp - spc[:, None] * colq
                a[:, :, q] = sp[:, None] * colp + c[:, None] * colq
                # A <- G^H A (rows p, q)
                rowp = a[:, p, :].copy()
                rowq = a[:, q, :]
                a[:, p, :] = c[:, None] * rowp - sp[:, None] * rowq
                a[:, q, :] = spc[:, None] * rowp + c[:, None] * rowq
                a[:, p, q] = 0.0
                a[:, q, p] = 0.0
                a[:, p, p] = a[:, p, p].real
                a[:, q, q] = a[:, q, q].real
                if vectors:
                    vp = v[:, :, p].copy()
                    vq = v[:, :, q]
                    v[:, :, p] = c[:, None] * vp - spc[:, None] * vq
                    v[:, :, q] = sp[:, None] * vp + c[:, None] * vq

    w = np.real(np.diagonal(a, axis1=-2, axis2=-1)) * peak[:, None]
    order = np.argsort(w, axis=-1, kind="stable")
    w = np.take_along_axis(w, order, axis=-1).reshape(batch + (n,))
    if not vectors:
        return w, None
    v = np.take_along_axis(v, order[:, None, :], axis=-1).reshape(batch + (n, n))
    return w, v


def hermitian_eigenvalues(m, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Real spectrum of a Hermitian matrix (or stack of them), ascending.

    Raises :class:`NotHermitian` if any entry pair differs from its
    conjugate transpose by more than ``tol.eps_herm``.

    >>> hermitian_eigenvalues(np.diag([4.0, 1.0, 3.0, 2.0]))
    array([1., 2., 3., 4.])
    """
    a = check_hermitian(m, tol)
    return _jacobi(a, vectors=False)[0]


def hermitian_eigh(m, tol: Tolerance = DEFAULT_TOL):
    """Eigenvalues (ascending) and unitary eigenvector columns of a Hermitian matrix."""
    a = check_hermitian(m, tol)
    return _jacobi(a, vectors=True)


def singular_values(m) -> np.ndarray:
    """Singular values, descending, all exactly non-negative.

    Computed from the eigenvalues of the Hermitian dilation
    ``[[0, m], [m^H, 0]]``, whose spectrum is ``{+s_i, -s_i}``. This avoids
    squaring ``m`` and keeps small singular values accurate to roughly
    machine epsilon times the norm of ``m``.
    """
    a = as_matrix(m)
    n = a.shape[-1]
    dil = np.zeros(a.shape[:-2] + (2 * n, 2 * n), dtype=np.complex128)
    dil[..., :n, n:] = a
    dil[..., n:, :n] = np.conj(np.swapaxes(a, -1, -2))
    w, _ = _jacobi(dil, vectors=False)
    # Top half of the ascending spectrum holds +s_i; the bottom half mirrors it.
    top = w[..., n:][..., ::-1]
    bottom = -w[..., :n]
    s = 0.5 * (top + bottom)
    return np.clip(s, 0.0, None)


def trace_norm(m) -> float | np.ndarray:
    """Trace norm ``Tr sqrt(m m^H)``, the sum of singular values."""
    total = np.sum(singular_values(m), axis=-1)
    return float(total) if np.ndim(total) == 0 else total
