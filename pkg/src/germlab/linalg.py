"""Dense complex linear-algebra kernel.

Positive-semidefiniteness decisions, Gram factorizations, null-space bases
and residual-checked least-squares solves used by every other module.  All
functions are pure, all thresholds are scale-relative via
:class:`Tolerance`, and eigenvector phases follow a fixed convention so
factorizations are reproducible across runs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionMismatch,
    NegativeEigenvalue,
    NonFinite,
    NonSquare,
    ResidualTooLarge,
)

DEFAULT_ABS_EPS = 1e-10
DEFAULT_REL_EPS = 1e-12


@dataclass(frozen=True)
class Tolerance:
    """Absolute floor plus scale-relative factor.

    The effective threshold for a matrix of spectral scale ``s`` is
    ``abs_eps + rel_eps * s``; eigenvalue perturbations grow with the norm,
    so comparisons should never use a bare absolute cutoff.
    """

    abs_eps: float = DEFAULT_ABS_EPS
    rel_eps: float = DEFAULT_REL_EPS

    def __post_init__(self):
        if self.abs_eps < 0 or self.rel_eps < 0:
            raise ValueError("tolerances must be nonnegative")

    def threshold(self, scale: float) -> float:
        return self.abs_eps + self.rel_eps * float(abs(scale))


DEFAULT_TOL = Tolerance()


def dag(m: np.ndarray) -> np.ndarray:
    """Hermitian adjoint (conjugate transpose)."""
    return np.conj(np.swapaxes(m, -1, -2))


def frob(m: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(m)))


def as_cmatrix(m, square: bool = False) -> np.ndarray:
    """Validate and return a finite complex 2-D array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch("expected a matrix, got ndim=%d" % a.ndim)
    if not np.all(np.isfinite(a)):
        raise NonFinite("matrix has NaN or Inf entries")
    if square and a.shape[0] != a.shape[1]:
        raise NonSquare("expected a square matrix, got shape %r" % (a.shape,))
    return a


@dataclass
class PsdReport:
    """Outcome of a positive-semidefiniteness decision."""

    ok: bool
    min_eig: float | None
    threshold: float
    asym_defect: float
    dim: int

    def __bool__(self) -> bool:
        return self.ok

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "min_eig": self.min_eig,
            "threshold": self.threshold,
            "asym_defect": self.asym_defect,
            "dim": self.dim,
        }


def psd_check(m, tol: Tolerance = DEFAULT_TOL) -> PsdReport:
    """Decide whether the Hermitian part of ``m`` is positive semidefinite.

    The input is symmetrized as ``(m + m†)/2`` and the asymmetry defect is
    recorded; the verdict is true iff every eigenvalue of the Hermitian part
    is at least ``-threshold``.
    """
    a = as_cmatrix(m, square=True)
    if a.shape[0] == 0:
        return PsdReport(True, None, tol.threshold(0.0), 0.0, 0)
    h = (a + dag(a)) / 2.0
    asym = frob(a - h)
    w = np.linalg.eigvalsh(h)
    scale = float(np.max(np.abs(w))) if w.size else 0.0
    thr = tol.threshold(scale)
    return PsdReport(bool(w[0] >= -thr), float(w[0]), thr, asym, a.shape[0])


def kolmogorov_factor(g, tol: Tolerance = DEFAULT_TOL) -> tuple[np.ndarray, int]:
    """Factor a Hermitian positive-semidefinite Gram as ``g = v† v``.

    Returns ``(v, rank)`` where ``v`` has ``rank`` rows.  Eigenvalues in
    ``[-threshold, threshold]`` count as zero; anything below raises
    :class:`NegativeEigenvalue`.  Rows are ordered by descending eigenvalue
    and each eigenvector is rotated so its first nonzero component is real
    positive, which makes the factor deterministic.
    """
    a = as_cmatrix(g, square=True)
    n = a.shape[0]
    if n == 0:
        return np.zeros((0, 0), dtype=complex), 0
    h = (a + dag(a)) / 2.0
    w, u = np.linalg.eigh(h)
    scale = float(np.max(np.abs(w)))
    thr = tol.threshold(scale)
    if w[0] < -thr:
        raise NegativeEigenvalue(
            "Gram has eigenvalue %.6g below -%.6g" % (w[0], thr)
        )
    order = np.argsort(-w)
    w = w[order]
    u = u[:, order]
    rank = int(np.sum(w > thr))
    v = np.zeros((rank, n), dtype=complex)
    for i in range(rank):
        col = u[:, i]
        nz = np.flatnonzero(np.abs(col) > 1e-12 * np.max(np.abs(col)))
        phase = col[nz[0]]
        col = col * (np.conj(phase) / abs(phase))
        v[i, :] = np.sqrt(w[i]) * np.conj(col)
    return v, rank


def nullspace_basis(c, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal columns spanning ``{v : c v = 0}`` at numerical rank."""
    a = np.asarray(c, dtype=complex)
    if a.ndim == 1:
        a = a[None, :]
    a = as_cmatrix(a)
    rows, cols = a.shape
    if cols == 0:
        return np.zeros((0, 0), dtype=complex)
    if rows == 0:
        return np.eye(cols, dtype=complex)
    _, s, vh = np.linalg.svd(a)
    thr = tol.threshold(s[0] if s.size else 0.0)
    rank = int(np.sum(s > thr))
    return dag(vh[rank:, :])


def solve_on_span(targets, sources, tol: Tolerance = DEFAULT_TOL) -> np.ndarray:
    """Minimum-norm ``a`` with ``a @ sources ≈ targets``.

    Raises :class:`ResidualTooLarge` when the targets are not consistent
    with the span of the source columns, which signals an ill-posed
    construction upstream.
    """
    t = as_cmatrix(targets)
    s = as_cmatrix(sources)
    if t.shape[1] != s.shape[1]:
        raise DimensionMismatch(
            "targets and sources must share column count, got %d vs %d"
            % (t.shape[1], s.shape[1])
        )
    scale = max(frob(t), frob(s), 1.0)
    thr = tol.threshold(scale)
    if s.shape[0] == 0:
        a = np.zeros((t.shape[0], 0), dtype=complex)
    else:
        at, *_ = np.linalg.lstsq(s.T, t.T, rcond=None)
        a = at.T
    residual = frob(a @ s - t)
    if residual > thr:
        raise ResidualTooLarge(
            "solve residual %.6g exceeds threshold %.6g" % (residual, thr)
        )
    return a
