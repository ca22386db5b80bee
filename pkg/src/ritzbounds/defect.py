"""Ritz data, the block splitting of a positive-definite operator along a
test subspace, and the approximation defects.

Given a symmetric positive-definite H and an m-dimensional test subspace
spanned by the orthonormal columns of B, the central objects are

* the Ritz values/vectors of H compressed to the subspace,
* the block-diagonal part ``H_P = P H P + (I-P) H (I-P)`` with P the
  orthogonal projector onto the subspace,
* the scaled coupling block ``K_s`` of ``H_P^{-1/2} (H - H_P) H_P^{-1/2}``,
  formed in the orthonormal basis (Ritz vectors, completion of the
  orthogonal complement),
* the approximation defects ``eta_1 <= ... <= eta_m``: the singular values
  of K_s, padded with zeros.  They vanish exactly when the subspace is
  invariant, are dimensionless, and are invariant under scaling H -> c H.

Two independent routes compute the defects: the singular values of the
explicit block (``etas_schur``) and the generalized eigenvalues of the
inverse-moment pencil (``etas_moments``); their agreement is one of the
standing cross-checks of the library.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .densela import (
    SymmetricMatrix,
    as_symmetric,
    cholesky_lower,
    cholesky_solve,
    singular_values,
    sym_eig,
)
from .errors import NotPositiveDefiniteError, SingularOperatorError

#: Relative invertibility floor for resolvent-type factors (smallest
#: singular value against spectral norm).
INVERTIBILITY_RTOL = 1e-12


@dataclass(frozen=True)
class TestSubspace:
    """Orthonormal basis of the trial space, shape (n, m) with 1 <= m < n."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float)
        if b.ndim != 2:
            raise ValueError(f"basis must be a 2-d array, got ndim={b.ndim}")
        n, m = b.shape
        if not 1 <= m < n:
            raise ValueError(f"need 1 <= dim < ambient dim, got basis shape {b.shape}")
        gram_defect = np.max(np.abs(b.T @ b - np.eye(m)))
        if gram_defect > 1e-12:
            raise ValueError(
                f"basis columns are not orthonormal: max |B^T B - I| = {gram_defect:.3e}"
            )
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @classmethod
    def from_columns(cls, columns, warn_above: float = 1e-8) -> "TestSubspace":
        """Build a subspace from possibly non-orthonormal spanning columns.

        Columns are orthonormalized by QR; a warning is emitted when the
        adjustment exceeds ``warn_above``.
        """
        c = np.asarray(columns, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        q, r = np.linalg.qr(c)
        if np.min(np.abs(np.diag(r))) <= 1e-12 * max(np.max(np.abs(r)), 1e-300):
            raise ValueError("spanning columns are numerically rank deficient")
        q = q * np.sign(np.diag(r))
        adjustment = np.max(np.abs(q - c))
        if adjustment > warn_above:
            warnings.warn(
                f"subspace basis adjusted by {adjustment:.3e} during "
                f"orthonormalization",
                stacklevel=2,
            )
        return cls(q)


@dataclass(frozen=True)
class RitzData:
    """Ritz values (ascending), Ritz vectors, and the Rayleigh quotient.

    In the basis carried here the Rayleigh quotient is diagonal:
    ``xi = diag(mu)``.
    """

    mu: np.ndarray
    vectors: np.ndarray
    xi: SymmetricMatrix

    @property
    def m(self) -> int:
        return len(self.mu)


@dataclass(frozen=True)
class DefectSpectrum:
    """Approximation defects eta_1 <= ... <= eta_m and the route used."""

    etas: np.ndarray
    route: str

    def __post_init__(self):
        e = np.array(self.etas, dtype=float)
        if e.ndim != 1:
            raise ValueError("etas must be a 1-d array")
        if e.size and (np.any(np.diff(e) < 0) or e[0] < 0):
            raise ValueError("etas must be nonnegative and ascending")
        if e.size and e[-1] >= 1.0:
            raise ValueError(
                f"largest defect {e[-1]:.6e} >= 1; the split operator is not "
                f"positive definite"
            )
        e.setflags(write=False)
        object.__setattr__(self, "etas", e)

    @property
    def m(self) -> int:
        return len(self.etas)

    @property
    def eta_max(self) -> float:
        return float(self.etas[-1]) if self.etas.size else 0.0

    def sum_squares(self) -> float:
        return float((self.etas**2).sum())


@dataclass(frozen=True)
class SplitOperator:
    """Block data of H in the adapted basis (Ritz vectors, completion).

    ``h_p`` is the block-diagonal part diag(Xi, W); ``k_s`` is the
    (n-m) x m coupling block of the scaled defect operator, whose nonzero
    singular values are the nonzero approximation defects; ``w`` is the
    complement block of H.  The eigendecomposition of W is kept because
    every downstream resolvent expression reuses it.
    """

    h_p: SymmetricMatrix
    k_s: np.ndarray
    w: SymmetricMatrix
    basis: np.ndarray
    mu: np.ndarray
    w_values: np.ndarray = field(repr=False)
    w_vectors: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def m(self) -> int:
        return len(self.mu)


def orthonormal_completion(basis: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of the column span."""
    n, m = basis.shape
    q_full, _ = np.linalg.qr(basis, mode="complete")
    comp = q_full[:, m:]
    # QR may flip the leading block's signs; the complement is unaffected,
    # but guard against loss of orthogonality to the input columns
    defect = np.max(np.abs(basis.T @ comp)) if comp.size else 0.0
    if defect > 1e-12:
        raise ValueError(f"completion failed, max |B^T C| = {defect:.3e}")
    return comp


def ritz(h, subspace: TestSubspace) -> RitzData:
    """Ritz values and vectors of H from the test subspace.

    Solves the m x m compression ``B^T H B``; the returned vectors span the
    same subspace but diagonalize the Rayleigh quotient, so ``xi`` comes
    back as diag(mu).
    """
    hm = as_symmetric(h)
    b = subspace.basis
    if hm.n != subspace.ambient_dim:
        raise ValueError("operator and subspace dimensions differ")
    compressed = b.T @ hm.entries @ b
    mu, y = sym_eig(0.5 * (compressed + compressed.T))
    if mu.size and mu[0] <= 0.0:
        raise NotPositiveDefiniteError(
            f"operator is not positive definite on the test subspace: "
            f"smallest Ritz value {mu[0]:.6e}",
            eigenvalue=mu[0],
        )
    vectors = b @ y
    return RitzData(mu=mu, vectors=vectors, xi=SymmetricMatrix(np.diag(mu)))


def p_diagonal_split(h, subspace: TestSubspace) -> SplitOperator:
    """Block splitting of H along the subspace, with the scaled coupling.

    In the adapted orthonormal basis (Ritz vectors, then an orthonormal
    completion of the complement) the block-diagonal part is
    diag(Xi, W) and the scaled defect block is
    ``K_s = W^{-1/2} (V^T H U) Xi^{-1/2}``.
    """
    hm = as_symmetric(h)
    rd = ritz(hm, subspace)
    u = rd.vectors
    v = orthonormal_completion(u)
    a = hm.entries
    w_block = v.T @ a @ v
    w = SymmetricMatrix(0.5 * (w_block + w_block.T))
    coupling = v.T @ a @ u
    w_values, w_vectors = sym_eig(w)
    if w_values.size and w_values[0] <= 0.0:
        raise NotPositiveDefiniteError(
            f"complement block is not positive definite: smallest eigenvalue "
            f"{w_values[0]:.6e}",
            eigenvalue=w_values[0],
        )
    w_inv_sqrt_coupling = (w_vectors * w_values**-0.5) @ (w_vectors.T @ coupling)
    k_s = w_inv_sqrt_coupling / np.sqrt(rd.mu)[None, :]
    n, m = u.shape
    h_p = np.zeros((n, n))
    h_p[:m, :m] = np.diag(rd.mu)
    h_p[m:, m:] = w.entries
    return SplitOperator(
        h_p=SymmetricMatrix(h_p),
        k_s=k_s,
        w=w,
        basis=np.hstack([u, v]),
        mu=rd.mu,
        w_values=w_values,
        w_vectors=w_vectors,
    )


def etas_schur(split: SplitOperator) -> DefectSpectrum:
    """Defects as singular values of the scaled coupling block.

    Zero-padded up to m when the block has fewer nonzero singular values.
    """
    s = singular_values(split.k_s)
    etas = np.zeros(split.m)
    keep = min(len(s), split.m)
    if keep:
        etas[split.m - keep :] = np.sort(s[:keep])
    return DefectSpectrum(etas=etas, route="schur_block")


def moment_matrices(h, rd: RitzData):
    """Inverse-moment matrix Psi and the Galerkin-error Gram matrix Omega.

    ``Psi[i, j] = (u_i, H^{-1} u_j)`` via Cholesky solves.  For Ritz
    vectors, expanding the energy inner product of the Galerkin errors
    collapses to ``Omega = Psi - diag(1/mu)``; the quadruple-product
    definition is kept as a test oracle.
    """
    hm = as_symmetric(h)
    ell = cholesky_lower(hm.entries, what="operator")
    x = cholesky_solve(ell, rd.vectors)
    psi = rd.vectors.T @ x
    psi = SymmetricMatrix(0.5 * (psi + psi.T))
    omega = SymmetricMatrix(psi.entries - np.diag(1.0 / rd.mu))
    return psi, omega


def etas_moments(psi, omega) -> DefectSpectrum:
    """Defects from the moment pencil: eta_i^2 solves Omega c = eta^2 Psi c."""
    psi = as_symmetric(psi)
    omega = as_symmetric(omega)
    try:
        cholesky_lower(psi.entries, what="Psi")
    except NotPositiveDefiniteError as err:
        raise NotPositiveDefiniteError(
            f"inverse-moment matrix is not positive definite (rank-deficient "
            f"test subspace?): {err}",
            pivot_index=err.pivot_index,
        ) from err
    from .densela import gen_sym_eig

    squares, _ = gen_sym_eig(omega, psi)
    if squares.size and squares[0] < -1e-6:
        raise ValueError(
            f"moment pencil produced eigenvalue {squares[0]:.3e} far below "
            f"zero; inputs are inconsistent"
        )
    squares = np.clip(squares, 0.0, None)
    return DefectSpectrum(etas=np.sqrt(squares), route="moments")


def dl_measure(psi, mu) -> float:
    """Spectral norm of the scaled deviation diag(sqrt(mu)) (Psi - D) diag(sqrt(mu))."""
    psi = as_symmetric(psi)
    mu = np.asarray(mu, dtype=float)
    if np.any(mu <= 0):
        raise ValueError("Ritz values must be positive")
    root = np.sqrt(mu)
    scaled = root[:, None] * (psi.entries - np.diag(1.0 / mu)) * root[None, :]
    values, _ = sym_eig(0.5 * (scaled + scaled.T))
    return float(np.max(np.abs(values))) if values.size else 0.0


def wilkinson_schur(a, x, b) -> SymmetricMatrix:
    """Schur complement A - X B^{-1} X^T of a symmetric 2x2 block matrix.

    B must be invertible but may be indefinite.  When the block matrix
    [[A, X], [X^T, B]] has a null space of dimension equal to the order of
    A, the complement vanishes.
    """
    am = as_symmetric(a)
    bm = as_symmetric(b)
    x = np.asarray(x, dtype=float)
    if x.shape != (am.n, bm.n):
        raise ValueError(
            f"coupling block must be {am.n} x {bm.n}, got {x.shape}"
        )
    b_values, b_vectors = sym_eig(bm)
    if bm.n:
        b_norm = np.max(np.abs(b_values))
        smallest = np.min(np.abs(b_values))
        if smallest <= INVERTIBILITY_RTOL * max(b_norm, 1e-300):
            raise SingularOperatorError(
                f"B block is numerically singular: smallest |eigenvalue| = "
                f"{smallest:.6e}",
                smallest_magnitude=smallest,
            )
    b_inv_xt = (b_vectors / b_values) @ (b_vectors.T @ x.T)
    s = am.entries - x @ b_inv_xt
    return SymmetricMatrix(0.5 * (s + s.T))


def _resolvent_factors(split: SplitOperator, lambda_q: float) -> np.ndarray:
    """Eigenvalues of I - lambda W^{-1} along W's eigenvectors, with an
    invertibility check against spec(W) collisions."""
    factors = 1.0 - lambda_q / split.w_values
    largest = np.max(np.abs(factors)) if factors.size else 0.0
    smallest = np.min(np.abs(factors)) if factors.size else np.inf
    if factors.size and smallest <= INVERTIBILITY_RTOL * max(largest, 1e-300):
        raise SingularOperatorError(
            f"reference value {lambda_q!r} collides with the complement "
            f"spectrum: smallest |1 - lambda/w| = {smallest:.6e}",
            smallest_magnitude=smallest,
        )
    return factors


def relative_residual_identity(split: SplitOperator, rd: RitzData, lambda_q: float):
    """Both sides of the exact relative block-residual identity.

    Returns ``(lhs, rhs, defect)`` with ``lhs = I - lambda_q Xi^{-1}``,
    ``rhs = K_s^T (I - lambda_q W^{-1})^{-1} K_s`` and the Frobenius norm of
    their difference.  When lambda_q is an eigenvalue of H whose
    multiplicity equals the subspace dimension, the identity is exact and
    the defect is at rounding level.
    """
    lam = float(lambda_q)
    lhs = np.eye(split.m) - lam * np.diag(1.0 / rd.mu)
    factors = _resolvent_factors(split, lam)
    z = split.w_vectors.T @ split.k_s
    rhs = z.T @ (z / factors[:, None])
    rhs = 0.5 * (rhs + rhs.T)
    defect = float(np.sqrt(((lhs - rhs) ** 2).sum()))
    return SymmetricMatrix(lhs), SymmetricMatrix(rhs), defect
