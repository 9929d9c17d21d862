"""Sparse finite-difference operators restricted to the inpainting region.

Five operators map Omega'-vectors to Omega-vectors: the centered first
differences D1 (along rows i) and D2 (along columns j), the five-point
Laplacian, and the composed products D1*Lap and D2*Lap.  Products are
formed on the full grid first and restricted afterwards, so the composed
stencils near the region boundary read the correct fixed pixels.  Grid
spacing is 1 throughout.

The smoothing preconditioner factors (I - Lap_Omega) once, where both the
rows and the columns of the Laplacian are restricted to Omega (homogeneous
Dirichlet data on everything outside), and back-substitutes k times to
apply the k-th resolvent power.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import InvalidDomain, LengthMismatch, NotPositiveDefinite
from .grid import BORDER_MARGIN, InpaintDomain

_D1_STENCIL = [((1, 0), 0.5), ((-1, 0), -0.5)]
_D2_STENCIL = [((0, 1), 0.5), ((0, -1), -0.5)]
_LAP_STENCIL = [((1, 0), 1.0), ((-1, 0), 1.0), ((0, 1), 1.0), ((0, -1), 1.0), ((0, 0), -4.0)]


def _linear_index(i, j, height):
    # natural (column-major) flat index
    return j * height + i


def _full_grid_operator(shape: tuple[int, int], stencil) -> sp.csr_matrix:
    """Assemble a stencil on the full grid with rows on the interior only.

    Border rows are left zero, so products of two such operators are exact
    only on pixels at distance >= 2 from the border; the BORDER_MARGIN rule
    guarantees every row we later keep satisfies that.
    """
    h, w = shape
    ii, jj = np.meshgrid(np.arange(1, h - 1), np.arange(1, w - 1), indexing="ij")
    ii = ii.ravel()
    jj = jj.ravel()
    rows, cols, vals = [], [], []
    for (di, dj), coeff in stencil:
        rows.append(_linear_index(ii, jj, h))
        cols.append(_linear_index(ii + di, jj + dj, h))
        vals.append(np.full(ii.shape, coeff))
    n = h * w
    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    )
    return mat.tocsr()


@dataclass(frozen=True)
class RestrictedOperator:
    """A sparse stencil operator from Omega'-vectors to Omega-vectors."""

    name: str
    matrix: sp.csr_matrix = field(repr=False)
    _adjoint: sp.csr_matrix = field(repr=False)

    @property
    def rows(self) -> int:
        return self.matrix.shape[0]

    @property
    def cols(self) -> int:
        return self.matrix.shape[1]

    def apply(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=np.float64)
        if v.shape != (self.cols,):
            raise LengthMismatch(f"{self.name}: expected length {self.cols}, got {v.shape}")
        return self.matrix @ v

    def apply_adjoint(self, w: np.ndarray) -> np.ndarray:
        w = np.asarray(w, dtype=np.float64)
        if w.shape != (self.rows,):
            raise LengthMismatch(f"{self.name}^T: expected length {self.rows}, got {w.shape}")
        return self._adjoint @ w


@dataclass(frozen=True)
class OperatorSet:
    """The five restricted operators for one inpainting domain."""

    domain: InpaintDomain
    d1: RestrictedOperator
    d2: RestrictedOperator
    lap: RestrictedOperator
    d1lap: RestrictedOperator
    d2lap: RestrictedOperator

    def as_dict(self) -> dict[str, RestrictedOperator]:
        return {
            "D1": self.d1,
            "D2": self.d2,
            "Lap": self.lap,
            "D1Lap": self.d1lap,
            "D2Lap": self.d2lap,
        }


def _restrict_operator(full: sp.csr_matrix, name: str, row_idx, col_idx, col_ok) -> RestrictedOperator:
    kept = full[row_idx]
    coo = kept.tocoo()
    if not np.all(col_ok[coo.col]):
        raise InvalidDomain(
            f"{name}: stencil on Omega reads a pixel outside Omega'"
        )
    mat = kept[:, col_idx].tocsr()
    mat.sort_indices()
    adj = mat.T.tocsr()
    adj.sort_indices()
    return RestrictedOperator(name=name, matrix=mat, _adjoint=adj)


def build_operators(domain: InpaintDomain) -> OperatorSet:
    """Build D1, D2, Lap, D1*Lap, D2*Lap restricted from Omega' to Omega.

    Raises InvalidDomain if any stencil read escapes Omega', which cannot
    happen for domains produced by extract_domain (asserted anyway).
    """
    h, w = domain.shape
    if min(h, w) < 2 * BORDER_MARGIN + 1:
        raise InvalidDomain(f"grid {domain.shape} too small for the stencil margins")
    d1_full = _full_grid_operator(domain.shape, _D1_STENCIL)
    d2_full = _full_grid_operator(domain.shape, _D2_STENCIL)
    lap_full = _full_grid_operator(domain.shape, _LAP_STENCIL)
    d1lap_full = (d1_full @ lap_full).tocsr()
    d2lap_full = (d2_full @ lap_full).tocsr()

    row_idx = _linear_index(domain.omega[:, 0], domain.omega[:, 1], h)
    col_idx = _linear_index(domain.omega_prime[:, 0], domain.omega_prime[:, 1], h)
    col_ok = np.zeros(h * w, dtype=bool)
    col_ok[col_idx] = True

    ops = {}
    for name, full in [
        ("D1", d1_full),
        ("D2", d2_full),
        ("Lap", lap_full),
        ("D1Lap", d1lap_full),
        ("D2Lap", d2lap_full),
    ]:
        ops[name] = _restrict_operator(full, name, row_idx, col_idx, col_ok)
    return OperatorSet(
        domain=domain,
        d1=ops["D1"],
        d2=ops["D2"],
        lap=ops["Lap"],
        d1lap=ops["D1Lap"],
        d2lap=ops["D2Lap"],
    )


def laplacian_on_omega(domain: InpaintDomain) -> sp.csr_matrix:
    """Five-point Laplacian with rows AND columns restricted to Omega."""
    h, _ = domain.shape
    lap_full = _full_grid_operator(domain.shape, _LAP_STENCIL)
    idx = _linear_index(domain.omega[:, 0], domain.omega[:, 1], h)
    return lap_full[idx][:, idx].tocsr()


class PreconditionerFactorization:
    """Reusable triangular factorization of the SPD matrix (I - Lap_Omega).

    The matrix is strictly diagonally dominant with diagonal 5, hence
    symmetric positive definite; the factorization is computed once and
    reused for every resolvent solve.
    """

    def __init__(self, matrix: sp.csr_matrix):
        self.matrix = matrix.tocsr()
        self.dimension = matrix.shape[0]
        try:
            # SuperLU in SPD-friendly mode: symmetric ordering, no pivoting.
            self._lu = splu(
                matrix.tocsc(),
                permc_spec="MMD_AT_PLUS_A",
                diag_pivot_thresh=0.0,
                options={"SymmetricMode": True},
            )
        except RuntimeError as exc:  # pragma: no cover - unreachable for valid domains
            raise NotPositiveDefinite(str(exc)) from exc

    def _check(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=np.float64)
        if y.shape != (self.dimension,):
            raise LengthMismatch(f"expected length {self.dimension}, got {y.shape}")
        return y

    def solve(self, y: np.ndarray) -> np.ndarray:
        """One application of (I - Lap_Omega)^{-1}."""
        return self._lu.solve(self._check(y))

    def solve_k(self, y: np.ndarray, k: int) -> np.ndarray:
        """Apply (I - Lap_Omega)^{-k} by k successive solves, k in 1..3."""
        if k not in (1, 2, 3):
            raise ValueError(f"k must be 1, 2 or 3, got {k}")
        x = self._check(y)
        for _ in range(k):
            x = self._lu.solve(x)
        return x

    def apply_power(self, y: np.ndarray, k: int) -> np.ndarray:
        """Forward product (I - Lap_Omega)^k y, k >= 0 (used for H^k norms)."""
        if k < 0:
            raise ValueError(f"k must be >= 0, got {k}")
        x = self._check(y)
        for _ in range(k):
            x = self.matrix @ x
        return x


def factor_preconditioner(domain: InpaintDomain) -> PreconditionerFactorization:
    """Factor (I - Lap_Omega) for the domain; reusable across iterations."""
    lap = laplacian_on_omega(domain)
    matrix = (sp.identity(domain.n_omega, format="csr") - lap).tocsr()
    return PreconditionerFactorization(matrix)


def solve_k(fact: PreconditionerFactorization, y: np.ndarray, k: int) -> np.ndarray:
    """Module-level alias for fact.solve_k."""
    return fact.solve_k(y, k)
