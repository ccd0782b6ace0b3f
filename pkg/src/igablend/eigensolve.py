"""Symmetric-definite generalized eigenproblems K u = lambda M u.

1D problems are solved densely with LAPACK (via scipy).  Tensor-product
problems never form K_d: their eigenpairs are sums of axis eigenvalues
and Kronecker products of axis eigenvectors.

Float eigenvalues carry absolute errors of order eps * ||K||, which is
too coarse for superconvergent errors near 1e-14 relative.  For those,
:func:`refined_eigenvalue` returns the exact rational Rayleigh quotient
of the computed eigenvector against exactly assembled matrices; its
error is quadratic in the eigenvector error.
"""
import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np
import scipy.linalg
from scipy.linalg.lapack import dpotrf

from .assembly import MAX_DENSE, BandedSymMatrix, TensorOperator
from .errors import DefinitenessError, InvalidParameter, NumericalError

RESIDUAL_TOL = 1e-10
M_ORTHONORMAL = "M"
L2_NORMALIZED = "L2"


def check_definite(A, name="matrix"):
    """Raise :class:`DefinitenessError` unless the dense symmetric ``A`` is SPD."""
    _, info = dpotrf(np.asarray(A, dtype=float), lower=1, clean=0)
    if info > 0:
        pivot = info - 1
        raise DefinitenessError(f"{name} is not positive definite (pivot {pivot})", pivot=pivot)
    if info < 0:
        raise NumericalError(f"Cholesky factorisation of {name} failed (info {info})")


def _fix_signs(V):
    """Make the first significant entry of every column positive."""
    if V.size == 0:
        return V
    mag = np.abs(V)
    first = np.argmax(mag > 1e-10 * mag.max(axis=0), axis=0)
    signs = np.sign(V[first, np.arange(V.shape[1])])
    signs[signs == 0] = 1
    return V * signs


@dataclass(frozen=True)
class EigenSolution:
    """Ascending eigenvalues with eigenvectors stored column-wise.

    For tensor problems ``modes`` holds the 1-based axis mode tuple of each
    eigenvalue and vectors are formed on demand from ``axis_solutions``.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray = None
    normalization: str = M_ORTHONORMAL
    residuals: np.ndarray = None
    modes: tuple = None
    axis_solutions: tuple = ()

    def __len__(self):
        return len(self.eigenvalues)

    def vector(self, i):
        """Eigenvector ``i`` (0-based, ascending order)."""
        if self.vectors is not None:
            return self.vectors[:, i]
        parts = [s.vectors[:, m - 1] for s, m in zip(self.axis_solutions, self.modes[i])]
        return reduce(np.kron, parts)

    @property
    def eigenvectors(self):
        if self.vectors is not None:
            return self.vectors
        if len(self) > MAX_DENSE:
            raise InvalidParameter(f"refusing to materialize {len(self)} tensor eigenvectors")
        return np.column_stack([self.vector(i) for i in range(len(self))])


def solve_gevp(K, M, check=True):
    """All eigenpairs of the banded pair (K, M), M-orthonormal."""
    if not isinstance(K, BandedSymMatrix) or not isinstance(M, BandedSymMatrix):
        raise InvalidParameter("solve_gevp expects BandedSymMatrix operands")
    if K.n != M.n:
        raise InvalidParameter(f"dimension mismatch {K.n} != {M.n}")
    Kd = K.to_float().to_dense()
    Md = M.to_float().to_dense()
    return solve_dense(Kd, Md, check=check)


def solve_dense(Kd, Md, check=True):
    """Dense counterpart of :func:`solve_gevp`."""
    check_definite(Md, "M")
    w, V = scipy.linalg.eigh(Kd, Md)
    V = _fix_signs(V)
    res = np.linalg.norm(Kd @ V - (Md @ V) * w, axis=0)
    res /= np.linalg.norm(Kd, "fro") * np.linalg.norm(V, axis=0)
    if check:
        bad = np.flatnonzero(res > RESIDUAL_TOL)
        if bad.size:
            raise NumericalError(f"eigenpair {bad[0]} residual {res[bad[0]]:.3e} above {RESIDUAL_TOL}")
        if w[0] <= 0:
            check_definite(Kd, "K")
            raise DefinitenessError(f"non-positive eigenvalue {w[0]:.3e}", pivot=None)
    return EigenSolution(eigenvalues=w, vectors=V, residuals=res)


def solve_tensor(op, check=True):
    """Eigenpairs of a Kronecker operator as sums of per-axis eigenpairs.

    Ties are broken by lexicographic order of the axis mode tuples.
    """
    if not isinstance(op, TensorOperator):
        raise InvalidParameter("solve_tensor expects a TensorOperator")
    axis = tuple(solve_gevp(K, M, check=check) for K, M in op.axes)
    grids = np.meshgrid(*[s.eigenvalues for s in axis], indexing="ij")
    values = sum(g.ravel() for g in grids)
    idx = np.array(list(itertools.product(*[range(len(s)) for s in axis])))
    order = np.lexsort(tuple(idx[:, k] for k in reversed(range(op.d))) + (values,))
    modes = tuple(tuple(int(m) + 1 for m in idx[i]) for i in order)
    return EigenSolution(
        eigenvalues=values[order],
        normalization=M_ORTHONORMAL,
        modes=modes,
        axis_solutions=axis,
    )


def rayleigh_quotient(K, M, u):
    """u^T K u / u^T M u, exact (a Fraction) when K and M are exact."""
    if K.exact and M.exact:
        x = [Fraction(float(v)) for v in u]
        return K.quadratic_form(x) / M.quadratic_form(x)
    return K.quadratic_form(u) / M.quadratic_form(u)


def refined_eigenvalue(K, M, solution, i):
    """Exact Rayleigh quotient of eigenvector ``i`` of a 1D solution."""
    if not (K.exact and M.exact):
        raise InvalidParameter("refinement needs exactly assembled matrices")
    return rayleigh_quotient(K, M, solution.vector(i))


def refined_tensor_eigenvalue(op, solution, i):
    """Exact sum of refined axis eigenvalues for tensor eigenpair ``i``."""
    total = Fraction(0)
    for (K, M), s, m in zip(op.source_axes, solution.axis_solutions, solution.modes[i]):
        total += refined_eigenvalue(K, M, s, m - 1)
    return total


def l2_normalize(u, M_exact):
    """Scale ``u`` to unit L2 norm measured with the exactly integrated mass."""
    return np.asarray(u, dtype=float) / np.sqrt(M_exact.to_float().quadratic_form(u))
