"""Complex Hermitian matrices and dominant-eigenpair extraction.

Covariance matrices in this package are Hermitian and (for physical
designs) positive semidefinite.  This module provides the immutable
storage type, the iterative solver that extracts the largest eigenpair,
and the PSD / trace / random-sampling utilities built on top of it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "HERMITIAN_ATOL",
    "ConvergenceError",
    "EigenPair",
    "HermitianMatrix",
    "dominant_eigenpair",
    "is_psd",
    "random_feasible_covariance",
    "trace",
]

HERMITIAN_ATOL = 1e-12
DEFAULT_REL_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000
DEFAULT_PSD_TOL = 1e-9

# Fixed seed for the start block so repeated solves are bitwise identical.
_START_SEED = 0x5EED


class ConvergenceError(RuntimeError):
    """Eigen iteration exhausted its budget; ``residual`` holds the last norm."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class HermitianMatrix:
    """Immutable square complex matrix with enforced conjugate symmetry.

    Parameters
    ----------
    entries : array_like
        Square complex matrix.  Conjugate symmetry must hold within
        1e-12 (absolute, per entry); the input is then symmetrized so
        ``entries[k, l] == conj(entries[l, k])`` holds exactly and the
        diagonal is exactly real.
    factor : ndarray, optional
        Low-rank factor ``W`` (shape ``(dim, r)``) such that the matrix
        equals ``W @ W.conj().T``.  Callers supplying a factor guarantee
        that identity; it enables O(N r) pattern evaluation downstream.
    """

    __slots__ = ("_array", "_factor")

    def __init__(self, entries, factor: np.ndarray | None = None):
        arr = np.asarray(entries, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("matrix must have at least one row")
        asym = float(np.max(np.abs(arr - arr.conj().T)))
        if asym > HERMITIAN_ATOL:
            raise ValueError(
                f"matrix violates conjugate symmetry by {asym:.3e} "
                f"(tolerance {HERMITIAN_ATOL:.0e})"
            )
        arr = 0.5 * (arr + arr.conj().T)
        arr.setflags(write=False)
        self._array = arr
        if factor is not None:
            factor = np.asarray(factor, dtype=complex)
            if factor.ndim == 1:
                factor = factor[:, None]
            if factor.ndim != 2 or factor.shape[0] != arr.shape[0]:
                raise ValueError("factor must have one row per matrix dimension")
            factor = factor.copy()
            factor.setflags(write=False)
        self._factor = factor

    @classmethod
    def from_factor(cls, w) -> "HermitianMatrix":
        """Build ``W @ W.conj().T`` and tag it with its factor ``W``."""
        w = np.asarray(w, dtype=complex)
        if w.ndim == 1:
            w = w[:, None]
        prod = w @ w.conj().T
        return cls(0.5 * (prod + prod.conj().T), factor=w)

    @classmethod
    def from_dict(cls, data: dict) -> "HermitianMatrix":
        """Inverse of :meth:`to_dict`; re-verifies conjugate symmetry."""
        dim = int(data["dim"])
        re = np.asarray(data["re"], dtype=float)
        im = np.asarray(data["im"], dtype=float)
        if re.shape != (dim, dim) or im.shape != (dim, dim):
            raise ValueError("re/im blocks do not match the declared dimension")
        return cls(re + 1j * im)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "re": self._array.real.tolist(),
            "im": self._array.imag.tolist(),
        }

    @property
    def dim(self) -> int:
        return self._array.shape[0]

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the entries."""
        return self._array

    @property
    def factor(self) -> np.ndarray | None:
        return self._factor

    def trace(self) -> float:
        return float(self._array.diagonal().real.sum())

    def is_diagonal(self) -> bool:
        off = self._array.copy()
        np.fill_diagonal(off, 0.0)
        return not np.any(off)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"HermitianMatrix(dim={self.dim})"


@dataclass(frozen=True)
class EigenPair:
    """Largest eigenvalue, a unit eigenvector, and a degeneracy flag."""

    value: float
    vector: np.ndarray
    degenerate: bool


def trace(m: HermitianMatrix) -> float:
    """Real trace of ``m`` (the diagonal of a Hermitian matrix is real)."""
    return m.trace()


def is_psd(m: HermitianMatrix, tol: float = DEFAULT_PSD_TOL) -> bool:
    """Positive semidefiniteness via a full symmetric eigensolve.

    ``tol`` is relative to the largest eigenvalue magnitude; the zero
    matrix counts as PSD.
    """
    w = np.linalg.eigvalsh(m.array)
    scale = max(abs(float(w[0])), abs(float(w[-1])))
    return bool(w[0] >= -tol * scale)


def random_feasible_covariance(dim: int, power: float, seed: int) -> HermitianMatrix:
    """Seeded random PSD matrix with trace equal to ``power``.

    Draws a complex Gaussian ``A`` and returns ``A @ A*`` rescaled to the
    requested trace.  The same seed always yields the same matrix.
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if power <= 0:
        raise ValueError("power must be positive")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    g = a @ a.conj().T
    g = 0.5 * (g + g.conj().T)
    g *= power / g.diagonal().real.sum()
    return HermitianMatrix(g)


def _canonical_phase(v: np.ndarray) -> np.ndarray:
    # Rotate the global phase so the largest-magnitude entry is real
    # positive; makes the returned eigenvector unique and reproducible.
    j = int(np.argmax(np.abs(v)))
    v = v * np.conj(v[j] / abs(v[j]))
    return v / np.linalg.norm(v)


def dominant_eigenpair(
    m: HermitianMatrix,
    rel_tol: float = DEFAULT_REL_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> EigenPair:
    """Largest eigenpair via shifted block power iteration.

    A two-column subspace is propagated and Rayleigh-Ritz projected each
    sweep.  The spare Ritz value supplies the ``degenerate`` flag and,
    periodically, a spectral shift of half the second Ritz value, which
    sharpens the convergence rate without ever redirecting the iteration
    away from the top of a PSD spectrum.

    Intended for PSD matrices, where the largest eigenvalue is also the
    dominant one.  Convergence is declared when the residual
    ``norm(m v - lambda v)`` drops below ``rel_tol * lambda``.

    Raises
    ------
    ValueError
        If the matrix is zero (no dominant direction) or the tolerances
        are invalid.
    ConvergenceError
        If ``max_iter`` sweeps do not reach the requested residual; the
        exception carries the last residual.
    """
    if rel_tol <= 0:
        raise ValueError("rel_tol must be positive")
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    a = m.array
    n = m.dim
    if not np.any(a):
        raise ValueError("zero matrix has no dominant direction")
    if n == 1:
        return EigenPair(value=float(a[0, 0].real), vector=np.ones(1, dtype=complex), degenerate=False)

    rng = np.random.default_rng(_START_SEED)
    q = rng.standard_normal((n, 2)) + 1j * rng.standard_normal((n, 2))
    q, _ = np.linalg.qr(q)
    shift = 0.0
    residual = np.inf
    for sweep in range(max_iter):
        z = a @ q
        if shift:
            z = z - shift * q
        q, _ = np.linalg.qr(z)
        aq = a @ q
        h = q.conj().T @ aq
        h = 0.5 * (h + h.conj().T)
        w, u = np.linalg.eigh(h)
        lam1 = float(w[1])
        lam2 = float(w[0])
        vec = q @ u[:, 1]
        residual = float(np.linalg.norm(aq @ u[:, 1] - lam1 * vec))
        if lam1 != 0.0 and residual <= rel_tol * abs(lam1):
            degenerate = (lam1 - lam2) <= rel_tol * abs(lam1)
            return EigenPair(value=lam1, vector=_canonical_phase(vec), degenerate=bool(degenerate))
        if sweep % 8 == 7 and lam1 > 0 and lam2 > 0:
            shift = 0.5 * lam2
    raise ConvergenceError(
        f"eigen iteration did not converge in {max_iter} sweeps "
        f"(last residual {residual:.3e})",
        residual=residual,
    )
