"""Exactly analyzable model problems with closed-form reference values.

Three generators exercise the bound machinery end to end:

* the 3x3 coupling family ``diag(1/101, 1/100, 1 + kappa^2)`` with a
  -1/101 corner coupling, whose Ritz data for the first coordinate vector
  has closed forms (``hkappa_reference``),
* the half-line Schroedinger operator ``-d^2/dx^2 + kappa^2`` on
  ``[1, inf)`` with a Dirichlet wall at 0, whose bound-state energies
  solve a one-line transcendental equation and admit a convergent
  large-coupling expansion,
* the anti-periodic problem ``-psi'' - alpha psi`` on ``[0, 2 pi]`` with
  ``-psi(0) = psi(2 pi)``, whose eigenvalues ``(k + 1/2)^2 - alpha`` and
  inverse moments are exactly available, discretized with P1 finite
  elements on a uniform mesh.

The periodic model is the source of the mesh-refinement reference table:
``table1_row`` returns the defect aggregate, the true relative-error
aggregate, and the quadratic cluster bound for the two nearly singular
lowest modes at ``alpha = 0.2499``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import solve_banded

from .bounds import cluster_upper_bound, relative_gap_gq
from .defect import RitzData, etas_moments
from .densela import SymmetricMatrix, gen_sym_eig
from .errors import HypothesisError, TruncationError

PI = math.pi


# ---------------------------------------------------------------------------
# 3x3 coupling family
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KappaFamily:
    """Parameter record for the 3x3 coupling family (kappa > 0)."""

    kappa: float

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")

    def matrix(self) -> SymmetricMatrix:
        return hkappa_matrix(self.kappa)

    def reference(self) -> "KappaReference":
        return hkappa_reference(self.kappa)


class KappaReference(NamedTuple):
    res_norm: float
    eta: float


def hkappa_matrix(kappa: float) -> SymmetricMatrix:
    """The 3x3 family member; positive definite for every kappa > 0."""
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    return SymmetricMatrix(
        np.array(
            [
                [1 / 101, 0.0, -1 / 101],
                [0.0, 1 / 100, 0.0],
                [-1 / 101, 0.0, 1.0 + kappa**2],
            ]
        )
    )


def hkappa_reference(kappa: float) -> KappaReference:
    """Closed-form residual norm and defect for the first coordinate vector.

    The residual of ``e_1`` (Rayleigh quotient 1/101) keeps norm 1/101 for
    every kappa, while the approximation defect decays like 1/kappa:

        eta(kappa)^2 = (1/101) / (1 + kappa^2).

    The defect form follows from the rank-one coupling: the scaled block
    has the single entry ``(-1/101) / sqrt((1/101)(1 + kappa^2))``.  It is
    consistent with the exact expansion of the relative eigenvalue error,
    ``(mu - lambda_1)/mu = 1/(101 kappa^2) + O(kappa^-4)``, whose quotient
    with eta^2 tends to one.
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    return KappaReference(
        res_norm=1 / 101,
        eta=1.0 / math.sqrt(101.0 * (1.0 + kappa**2)),
    )


# ---------------------------------------------------------------------------
# Large-coupling Schroedinger model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SchrodingerModel:
    """Half-line Schroedinger model: coupling kappa > 0, mode index q >= 1."""

    kappa: float
    q: int = 1

    def __post_init__(self):
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if self.q < 1:
            raise ValueError(f"mode index must be >= 1, got {self.q}")

    def eigenvalue(self) -> float:
        return schrodinger_lambda(self.kappa, self.q)

    def limit_eigenvalue(self) -> float:
        return (self.q * PI) ** 2


def schrodinger_lambda(kappa: float, q: int = 1) -> float:
    """q-th bound-state energy from the matching equation.

    Solves ``sqrt(kappa^2 - lambda) = -sqrt(lambda) cot(sqrt(lambda))`` by
    bisection in ``s = sqrt(lambda)`` over ``((q - 1/2) pi, q pi)``, with
    the endpoints nudged inward to dodge the cotangent pole.  Converges to
    1e-12 relative accuracy or better.
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    if q < 1:
        raise ValueError(f"mode index must be >= 1, got {q}")
    lo = (q - 0.5) * PI + 1e-9
    hi = q * PI - 1e-9
    if kappa <= hi:
        raise HypothesisError(
            f"mode q={q} is not resolvable at kappa={kappa}: the matching "
            f"root requires kappa > {hi:.6f}"
        )

    def mismatch(s: float) -> float:
        return math.sqrt(kappa**2 - s * s) + s / math.tan(s)

    f_lo = mismatch(lo)
    f_hi = mismatch(hi)
    if f_lo * f_hi > 0:
        raise HypothesisError(
            f"no sign change in the bisection bracket for q={q}, "
            f"kappa={kappa}"
        )
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        f_mid = mismatch(mid)
        if f_lo * f_mid <= 0:
            hi = mid
        else:
            lo = mid
            f_lo = f_mid
        if hi - lo <= 1e-16 * hi:
            break
    s = 0.5 * (lo + hi)
    return s * s


def schrodinger_taylor(kappa: float) -> float:
    """Four-term large-coupling expansion of the relative energy drop.

    ``(lambda^inf_1 - lambda^kappa_1) / lambda^inf_1`` expanded about
    kappa = infinity; the neglected remainder is O(kappa^-5) with a
    coefficient near 70.
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    return (
        2.0 / kappa
        - 3.0 / kappa**2
        + 8.0 * (0.5 + PI**2 / 24.0) / kappa**3
        - 10.0 * (0.5 + 4.0 * PI**2 / 24.0) / kappa**4
    )


def schrodinger_eta2(kappa: float) -> float:
    """Squared defect 2 / (3 + kappa) of the sine test function.

    The test function is sqrt(2) sin(pi x) on [0, 1], extended by zero;
    its Rayleigh quotient is pi^2 and the inverse moment evaluates to
    (kappa + 3) / (pi^2 (kappa + 1)), which collapses the defect quotient
    to 2 / (3 + kappa).
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    return 2.0 / (3.0 + kappa)


def schrodinger_eta2_fd(kappa: float, length: float = 10.0, nodes: int = 20000) -> float:
    """Finite-difference oracle for the squared defect of the sine vector.

    Central differences on [0, length] with a homogeneous Dirichlet
    truncation; the domain truncation error is exponentially small in
    kappa (length - 1) and the discretization error is O(h^2).  Evaluates
    ``((psi, H^{-1} psi) - 1/mu) / (psi, H^{-1} psi)`` with mu = pi^2.
    """
    if length < 2.0:
        raise ValueError("truncated domain must extend past the potential step")
    if nodes < 100:
        raise ValueError("need at least 100 grid nodes")
    h = length / nodes
    x = h * np.arange(1, nodes)
    psi = np.where(x <= 1.0, np.sqrt(2.0) * np.sin(PI * x), 0.0)
    potential = np.where(x >= 1.0, kappa**2, 0.0)
    # half weight where a node sits exactly on the potential jump keeps
    # the scheme second order
    on_jump = np.abs(x - 1.0) <= 0.25 * h
    potential[on_jump] = 0.5 * kappa**2
    banded = np.zeros((3, nodes - 1))
    banded[0, 1:] = -1.0 / h**2
    banded[1, :] = 2.0 / h**2 + potential
    banded[2, :-1] = -1.0 / h**2
    u = solve_banded((1, 1), banded, psi)
    moment = h * float(psi @ u)
    return (moment - 1.0 / PI**2) / moment


def schrodinger_bounds(kappa: float):
    """Two-sided estimate for the relative energy drop of the lowest mode.

    Returns ``(2/(3+kappa), ((D + pi^2)/(D - pi^2)) * 2/(3+kappa))`` with
    the certified second-eigenvalue lower bound
    ``D(kappa) = (1 - sqrt(2/(3+kappa))) 4 pi^2``; requires kappa >= 5 so
    that D stays above pi^2.
    """
    if kappa < 5.0:
        raise HypothesisError(f"the sandwich needs kappa >= 5, got {kappa}")
    eta2 = schrodinger_eta2(kappa)
    d = (1.0 - math.sqrt(eta2)) * 4.0 * PI**2
    if d <= PI**2:
        raise HypothesisError(
            f"certified gap failed: D(kappa) = {d:.6f} <= pi^2"
        )
    return eta2, (d + PI**2) / (d - PI**2) * eta2


# ---------------------------------------------------------------------------
# Anti-periodic model problem and its P1 discretization
# ---------------------------------------------------------------------------

DEFAULT_ALPHA = 0.2499
DEFAULT_K_TRUNC = 20000


@dataclass(frozen=True)
class PeriodicModel:
    """Anti-periodic model parameters: phase theta, shift alpha, mesh count."""

    n_mesh: int
    theta: float = PI
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if self.n_mesh < 4:
            raise ValueError(f"mesh count must be >= 4, got {self.n_mesh}")
        lam1, _ = periodic_exact(self.theta, self.alpha, 1)
        if lam1 <= 0:
            raise ValueError(f"lowest eigenvalue {lam1} is not positive")

    def assemble(self):
        return fem_assemble(self.n_mesh, self.theta, self.alpha)

    def ritz(self, m: int = 2) -> RitzData:
        return fem_ritz(self.n_mesh, self.theta, self.alpha, m=m)

    def table_row(self, k_trunc: int = DEFAULT_K_TRUNC):
        return table1_row(self.n_mesh, self.theta, self.alpha, k_trunc)


def _check_anti_periodic(theta: float) -> None:
    if abs(theta - PI) > 1e-12:
        raise ValueError(
            f"only the anti-periodic phase theta = pi is supported in real "
            f"arithmetic, got theta = {theta}"
        )


def periodic_exact(theta: float, alpha: float, k: int):
    """k-th smallest exact eigenvalue and its integer frequency.

    The eigenvalues are ``(j + theta/(2 pi))^2 - alpha`` over integer
    frequencies j; ties (the theta = pi double eigenvalues) are broken by
    frequency.  Raises when the requested eigenvalue is not positive.
    """
    if k < 1:
        raise ValueError(f"eigenvalue index must be >= 1, got {k}")
    if not 0.0 <= theta <= PI:
        raise ValueError(f"phase must lie in [0, pi], got {theta}")
    span = k + 3
    freqs = np.arange(-span, span + 1)
    values = (freqs + theta / (2.0 * PI)) ** 2 - alpha
    order = np.lexsort((freqs, values))
    lam = float(values[order[k - 1]])
    if lam <= 0.0:
        raise ValueError(
            f"eigenvalue {k} is not positive for alpha = {alpha}: {lam}"
        )
    return lam, int(freqs[order[k - 1]])


def fem_assemble(n_mesh: int, theta: float = PI, alpha: float = DEFAULT_ALPHA):
    """P1 stiffness (with the -alpha mass shift) and consistent mass matrix.

    Uniform mesh of [0, 2 pi] with n_mesh intervals; the anti-periodic
    identification glues the last node to minus the first, which flips the
    sign of the wrap-around couplings.
    """
    _check_anti_periodic(theta)
    if n_mesh < 4:
        raise ValueError(f"mesh count must be >= 4, got {n_mesh}")
    h = 2.0 * PI / n_mesh
    stiff = np.zeros((n_mesh, n_mesh))
    mass = np.zeros((n_mesh, n_mesh))
    for p in range(n_mesh):
        q = (p + 1) % n_mesh
        sign = -1.0 if q < p else 1.0
        stiff[p, p] += 2.0 / h
        mass[p, p] += 2.0 * h / 3.0
        stiff[p, q] += sign * (-1.0 / h)
        stiff[q, p] += sign * (-1.0 / h)
        mass[p, q] += sign * (h / 6.0)
        mass[q, p] += sign * (h / 6.0)
    return (
        SymmetricMatrix(stiff - alpha * mass),
        SymmetricMatrix(mass),
    )


def fem_ritz(
    n_mesh: int, theta: float = PI, alpha: float = DEFAULT_ALPHA, m: int = 2
) -> RitzData:
    """Lowest m Rayleigh-Ritz modes of the discretized pencil.

    The returned vectors are nodal coefficient columns, orthonormal in the
    mass inner product, which is exactly unit norm in the function space.
    """
    stiff, mass = fem_assemble(n_mesh, theta, alpha)
    values, vectors = gen_sym_eig(stiff, mass)
    if values[0] <= 0:
        raise ValueError(
            f"discrete pencil is not positive definite: lowest value {values[0]}"
        )
    mu = values[:m].copy()
    return RitzData(mu=mu, vectors=vectors[:, :m].copy(), xi=SymmetricMatrix(np.diag(mu)))


class MomentValue(NamedTuple):
    value: float
    tail_bound: float


def _p1_fourier_factors(n_mesh: int, k: np.ndarray):
    """Per-frequency transform data for anti-periodic P1 hat functions.

    For omega = k + 1/2 each (anti-periodically wrapped) hat at node x_p
    has transform ``exp(i omega x_p) * 4 sin^2(omega h / 2) / (omega^2 h)``
    against exp(i omega t).
    """
    h = 2.0 * PI / n_mesh
    omega = k + 0.5
    shape = 4.0 * np.sin(omega * h / 2.0) ** 2 / (omega**2 * h)
    return omega, shape


def _p1_fourier(coeffs: np.ndarray, n_mesh: int, k: np.ndarray) -> np.ndarray:
    """Fourier coefficients of a P1 nodal vector at frequencies k.

    The node-phase sum is n_mesh-periodic in k, so it is evaluated once
    per residue class.
    """
    omega, shape = _p1_fourier_factors(n_mesh, k)
    x = 2.0 * PI * np.arange(n_mesh) / n_mesh
    base_omega = np.arange(n_mesh) + 0.5
    base = np.exp(1j * np.outer(base_omega, x)) @ coeffs
    return base[np.mod(k, n_mesh)] * shape


def _moment_tail_bound(coeffs_a, coeffs_b, n_mesh: int, k_trunc: int) -> float:
    """Rigorous bound on the discarded |k| > k_trunc part of the sum.

    Uses |psi_hat| <= 4 ||c||_1 / (omega^2 h) and lambda >= (8/9) omega^2
    beyond the first modes, then an integral comparison; decays like
    k_trunc^-5, comfortably below the advertised k_trunc^-3.
    """
    h = 2.0 * PI / n_mesh
    l1 = float(np.abs(coeffs_a).sum() * np.abs(coeffs_b).sum())
    return 18.0 * l1 / (PI * h**2) / (5.0 * (k_trunc + 0.5) ** 5)


def periodic_hinv_moment(
    psi_coeffs,
    phi_coeffs,
    theta: float = PI,
    alpha: float = DEFAULT_ALPHA,
    k_trunc: int = DEFAULT_K_TRUNC,
    tol: float | None = None,
) -> MomentValue:
    """Inverse moment (psi, H^{-1} phi) of two P1 nodal vectors.

    Evaluated by eigenfunction expansion: the exact anti-periodic modes
    have eigenvalues (k + 1/2)^2 - alpha, and the hat-function Fourier
    coefficients are analytic, so the moment is a single weighted sum over
    frequencies |k| <= k_trunc.  The returned tail bound covers the
    truncated remainder; when ``tol`` is given and the bound exceeds it,
    a TruncationError suggests a larger k_trunc.
    """
    _check_anti_periodic(theta)
    if not alpha < 0.25:
        raise ValueError(
            f"shift must keep the spectrum positive (alpha < 1/4), got {alpha}"
        )
    psi = np.asarray(psi_coeffs, dtype=float)
    phi = np.asarray(phi_coeffs, dtype=float)
    if psi.shape != phi.shape or psi.ndim != 1:
        raise ValueError("nodal coefficient vectors must share one shape")
    n_mesh = len(psi)
    k = np.arange(-k_trunc, k_trunc + 1)
    omega = k + 0.5
    lam = omega**2 - alpha
    psi_hat = _p1_fourier(psi, n_mesh, k)
    phi_hat = _p1_fourier(phi, n_mesh, k)
    value = float(np.real(np.sum(np.conj(psi_hat) * phi_hat / lam)) / (2.0 * PI))
    tail = _moment_tail_bound(psi, phi, n_mesh, k_trunc)
    if tol is not None and tail > tol:
        raise TruncationError(
            f"truncation tail bound {tail:.3e} exceeds the requested "
            f"tolerance {tol:.3e}; increase k_trunc (currently {k_trunc})",
            tail_bound=tail,
        )
    return MomentValue(value=value, tail_bound=tail)


def periodic_moment_matrix(
    rd: RitzData,
    theta: float = PI,
    alpha: float = DEFAULT_ALPHA,
    k_trunc: int = DEFAULT_K_TRUNC,
) -> SymmetricMatrix:
    """Inverse-moment matrix of the discrete Ritz vectors, entry by entry."""
    m = rd.m
    psi = np.zeros((m, m))
    for i in range(m):
        for j in range(i, m):
            value = periodic_hinv_moment(
                rd.vectors[:, i], rd.vectors[:, j], theta, alpha, k_trunc
            ).value
            psi[i, j] = value
            psi[j, i] = value
    return SymmetricMatrix(psi)


def table1_row(
    n_mesh: int,
    theta: float = PI,
    alpha: float = DEFAULT_ALPHA,
    k_trunc: int = DEFAULT_K_TRUNC,
):
    """Reference-table row for the two lowest anti-periodic modes.

    Returns ``(lower, middle, upper)``:

    * lower  - Frobenius norm of diag(eta_1^2, eta_2^2),
    * middle - Frobenius norm of I - lambda Xi^{-1} with the exact double
      eigenvalue lambda,
    * upper  - the quadratic cluster bound at the exact relative gap.

    The gap is assembled from the exact spectrum and the discrete pencil
    values beyond the cluster; the smallest admissible candidate is the
    exact third eigenvalue.
    """
    stiff, mass = fem_assemble(n_mesh, theta, alpha)
    values, vectors = gen_sym_eig(stiff, mass)
    if values[0] <= 0:
        raise ValueError(f"discrete pencil not positive definite at N={n_mesh}")
    mu = values[:2]
    rd = RitzData(mu=mu, vectors=vectors[:, :2], xi=SymmetricMatrix(np.diag(mu)))
    psi = periodic_moment_matrix(rd, theta, alpha, k_trunc)
    omega = SymmetricMatrix(psi.entries - np.diag(1.0 / mu))
    ds = etas_moments(psi, omega)

    lam1, _ = periodic_exact(theta, alpha, 1)
    lower = float(np.sqrt(((ds.etas**2) ** 2).sum()))
    middle = float(np.sqrt(((1.0 - lam1 / mu) ** 2).sum()))

    exact_rest = [periodic_exact(theta, alpha, k)[0] for k in range(3, 9)]
    candidates = np.concatenate([np.asarray(exact_rest), values[2:]])
    g = relative_gap_gq(candidates, lam1)
    upper = cluster_upper_bound(ds, g, "frobenius")
    return lower, middle, upper
