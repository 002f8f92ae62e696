"""Tension solve for the constrained chain: the tridiagonal system, its
explicit discrete Green function, bound certificates, and the a/b/c and d_m
diagnostics.

The constraint system is A sigma = w with w_k = |D+ eta_dot_k|^2 and A the
symmetric tridiagonal matrix

    row k (1 <= k < n):  n^2 [ -alpha_{k-1} sigma_{k-1} + 2 sigma_k - alpha_k sigma_{k+1} ]
    row n:               n^2 [ -alpha_{n-1} sigma_{n-1} + sigma_n ]

where alpha_i = <D+ eta_{i+1}, D+ eta_i>.  Dividing the raw second-difference
form by n^2 gives the 2 / -alpha stencil above; the n^2 reappears as an
overall scale so that w keeps the |D+ eta_dot|^2 normalization and the Green
function satisfies sigma_k = (1/n) sum_j G_kj w_j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from .core import (
    ChainState,
    _frozen_array,
    _sq,
    forward_diff,
    forward_diff_m,
    odd_extend,
    weighted_seminorm_sq,
)
from .errors import NumericError

#: residual contract for the tridiagonal solve, relative to |w|
SOLVE_RTOL = 1e-10


# ---------------------------------------------------------------------------
# alpha / beta


@dataclass(frozen=True)
class AlphaBeta:
    """Link-angle cosines alpha_1..alpha_{n-1} and the elimination recursion
    beta_n = 1, beta_i = 2 - alpha_i^2/beta_{i+1} (so 1 <= beta_i <= 2).

    alpha[i-1] = alpha_i and beta[i-1] = beta_i.
    """

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", _frozen_array(self.alpha))
        object.__setattr__(self, "beta", _frozen_array(self.beta))
        if self.beta.shape[0] != self.alpha.shape[0] + 1:
            raise ValueError("beta must be one longer than alpha")

    @property
    def n(self) -> int:
        return self.beta.shape[0]


def beta_recursion(alpha: np.ndarray) -> np.ndarray:
    """beta_n = 1, beta_i = 2 - alpha_i^2 / beta_{i+1}; well-defined for |alpha| <= 1."""
    n = alpha.shape[0] + 1
    beta = np.ones(n)
    for i in range(n - 2, -1, -1):
        beta[i] = 2.0 - alpha[i] ** 2 / beta[i + 1]
    return beta


def alpha_beta_from_alpha(alpha) -> AlphaBeta:
    """Assemble an AlphaBeta from given cosines (e.g. the exact straight chain)."""
    alpha = np.asarray(alpha, dtype=float)
    return AlphaBeta(alpha, beta_recursion(alpha))


def compute_alpha_beta(chain: ChainState) -> AlphaBeta:
    """alpha_i = <D+ eta_{i+1}, D+ eta_i> for i = 1..n-1, plus the beta recursion."""
    t = chain.link_dirs()
    alpha = np.einsum("kd,kd->k", t[1:], t[:-1])
    return AlphaBeta(alpha, beta_recursion(alpha))


# ---------------------------------------------------------------------------
# the discrete Green function


@dataclass(frozen=True)
class GreenMatrix:
    """Explicit inverse of the tension operator: G[k-1, j-1] = G_kj.

    Always symmetric with |G_kj| <= min(j,k)/n.  When every alpha_i > 0 all
    entries are positive and the sharp upper bounds hold; ``upsilon`` is the
    smallest admissible curvature bound of the generating state (None when
    unknown or when it exceeds 2 sqrt(n)/5).
    """

    G: np.ndarray
    all_alpha_positive: bool
    upsilon: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "G", _frozen_array(self.G))

    @property
    def n(self) -> int:
        return self.G.shape[0]


def green_matrix(ab: AlphaBeta, n: int | None = None, upsilon: float | None = None) -> GreenMatrix:
    """Build G_kj = (1/n) sum_{i=1}^{min(j,k)} p_ij p_ik / beta_i with
    p_ij = prod_{m=i}^{j-1} alpha_m / beta_{m+1} (empty product = 1).

    Writing M[i, j] = p_ij / sqrt(beta_i) on the upper triangle gives
    G = M^T M / n, manifestly symmetric.
    """
    if n is None:
        n = ab.n
    elif n != ab.n:
        raise ValueError(f"n={n} does not match AlphaBeta size {ab.n}")
    c = ab.alpha / ab.beta[1:]
    M = np.zeros((n, n))
    for i in range(n):
        row = np.empty(n - i)
        row[0] = 1.0
        np.cumprod(c[i:], out=row[1:])
        M[i, i:] = row
    M /= np.sqrt(ab.beta)[:, None]
    G = (M.T @ M) / n
    return GreenMatrix(G, bool(np.all(ab.alpha > 0)), upsilon)


def upsilon_threehalves(chain: ChainState) -> float:
    """Smallest upsilon with (k/n)^{3/2} |D+^2 eta_k|^2 <= upsilon, k = 1..n-1."""
    if chain.n < 2:
        return 0.0
    # second differences at k = 1..n-1 need eta up to k+2 <= n+1: no extension
    curv = forward_diff_m(chain.eta, chain.n, 2)[: chain.n - 1]
    ks = np.arange(1, chain.n)
    return float(np.max((ks / chain.n) ** 1.5 * _sq(curv)))


def green_matrix_for_chain(chain: ChainState) -> GreenMatrix:
    """Green matrix of a chain, with the curvature certificate attached when
    it is admissible (upsilon <= 2 sqrt(n)/5)."""
    ups = upsilon_threehalves(chain)
    admissible = ups <= 2.0 * np.sqrt(chain.n) / 5.0
    ab = compute_alpha_beta(chain)
    return green_matrix(ab, upsilon=ups if admissible else None)


# ---------------------------------------------------------------------------
# tension solves


@dataclass(frozen=True)
class TensionSolution:
    """Lagrange multipliers sigma_0..sigma_n (sigma[k] = sigma_k, sigma_0 = 0)."""

    sigma: np.ndarray
    min_sigma: float
    positivity: bool
    method: str

    def __post_init__(self):
        object.__setattr__(self, "sigma", _frozen_array(self.sigma))

    @property
    def n(self) -> int:
        return self.sigma.shape[0] - 1


def _angular_velocity_sq(chain: ChainState) -> np.ndarray:
    """w_k = |D+ eta_dot_k|^2 for k = 1..n."""
    return _sq(chain.link_dirs_dot())


def _solve_tridiagonal(alpha: np.ndarray, w: np.ndarray, n: int) -> np.ndarray:
    """Solve A sigma = w for the interior tensions sigma_1..sigma_n.

    A is symmetric positive definite whenever |alpha| <= 1 (diagonally
    dominant with pivots n^2 beta_i >= n^2), so a banded Cholesky solve
    applies; losing definiteness means the state left the constraint
    manifold badly and is reported as a numeric failure.
    """
    diag = np.full(n, 2.0)
    diag[-1] = 1.0
    band = np.zeros((2, n))
    band[0, 1:] = -alpha
    band[1, :] = diag
    try:
        return solveh_banded(band * n * n, w)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"tension system not positive definite (max |alpha| = {np.max(np.abs(alpha)):.3f}); "
            "the state has left the constraint manifold"
        ) from exc


def _solve_sigma_arrays(eta: np.ndarray, eta_dot: np.ndarray, n: int) -> np.ndarray:
    """Direct tension solve on raw arrays; returns sigma_0..sigma_n.

    Internal fast path for integrator stages (skips state construction).
    """
    t = n * (eta[1:] - eta[:-1])
    td = n * (eta_dot[1:] - eta_dot[:-1])
    alpha = np.einsum("kd,kd->k", t[1:], t[:-1])
    w = np.sum(td * td, axis=-1)
    sigma = np.empty(n + 1)
    sigma[0] = 0.0
    sigma[1:] = _solve_tridiagonal(alpha, w, n)
    return sigma


def solve_tension(chain: ChainState, method: str = "direct") -> TensionSolution:
    """Solve the tridiagonal constraint system A sigma = w.

    ``direct`` runs the O(n) banded elimination; ``green`` assembles the
    explicit Green function and applies sigma_k = (1/n) sum_j G_kj w_j.  Both
    satisfy the residual contract |A sigma - w| <= 1e-10 |w| and agree with
    each other to the same relative tolerance.
    """
    n = chain.n
    w = _angular_velocity_sq(chain)
    if method == "direct":
        ab = compute_alpha_beta(chain)
        interior = _solve_tridiagonal(ab.alpha, w, n)
    elif method == "green":
        gm = green_matrix_for_chain(chain)
        ab = compute_alpha_beta(chain)
        interior = gm.G @ w / n
    else:
        raise ValueError(f"unknown tension method {method!r}; use 'direct' or 'green'")

    resid = _tridiagonal_residual(ab.alpha, interior, w, n)
    wnorm = float(np.linalg.norm(w))
    if not np.isfinite(resid) or resid > SOLVE_RTOL * max(wnorm, 1e-300):
        raise RuntimeError(
            f"tension solve residual {resid:.3e} exceeds {SOLVE_RTOL:.0e} * |w| = {SOLVE_RTOL * wnorm:.3e}"
        )

    sigma = np.concatenate([[0.0], interior])
    min_sigma = float(np.min(interior))
    return TensionSolution(sigma, min_sigma, min_sigma > 0.0, method)


def _tridiagonal_residual(alpha: np.ndarray, sigma_int: np.ndarray, w: np.ndarray, n: int) -> float:
    padded = np.concatenate([[0.0], sigma_int, [0.0]])
    diag = np.full(n, 2.0)
    diag[-1] = 1.0
    a_ext = np.concatenate([[0.0], alpha, [0.0]])
    r = n * n * (diag * sigma_int - a_ext[:-1] * padded[:-2] - a_ext[1:] * padded[2:])
    # row n has no superdiagonal: the trailing zero in a_ext kills it
    return float(np.max(np.abs(r - w)))


def tension_residual(chain: ChainState, sigma) -> float:
    """max_k | <D+ eta_k, D-D+ (sigma D+ eta)_k> + |D+ eta_dot_k|^2 |.

    The constraint equation in flux form, evaluated with the odd/even
    extensions; an independent restatement of the tridiagonal residual.
    """
    n = chain.n
    ext = odd_extend(chain, sigma)
    sig = ext.sigma_ext[: n + 2]
    t_ext = forward_diff(ext.eta_ext[: n + 2], n)  # D+ eta_j for j = 1..n+1
    flux = np.concatenate([np.zeros((1, chain.d)), sig[1:, None] * t_ext])  # j = 0..n+1
    second = n * n * (flux[2:] - 2.0 * flux[1:-1] + flux[:-2])  # k = 1..n
    lhs = np.einsum("kd,kd->k", t_ext[:-1], second)
    return float(np.max(np.abs(lhs + _angular_velocity_sq(chain))))


# ---------------------------------------------------------------------------
# sigma_dot


def solve_sigma_dot(chain: ChainState, sigma) -> np.ndarray:
    """Time derivative of the tension: solves the same tridiagonal operator
    with right-hand side
    3 <D+ eta_dot, D-D+ (sigma D+ eta)> + <D+ eta, D-D+ (sigma D+ eta_dot)>.

    Returns sigma_dot_0..sigma_dot_n with sigma_dot_0 = 0.
    """
    n = chain.n
    ext = odd_extend(chain, sigma)
    sig = ext.sigma_ext[: n + 2]  # sigma_0..sigma_{n+1} (even: sigma_{n+1} = sigma_n)
    t_ext = forward_diff(ext.eta_ext[: n + 2], n)  # D+ eta_j, j = 1..n+1
    td_ext = forward_diff(ext.eta_dot_ext[: n + 2], n)  # D+ eta_dot_j, j = 1..n+1

    zero = np.zeros((1, chain.d))
    flux_pos = np.concatenate([zero, sig[1:, None] * t_ext])  # (sigma D+ eta)_j, j = 0..n+1
    flux_vel = np.concatenate([zero, sig[1:, None] * td_ext])
    second_pos = n * n * (flux_pos[2:] - 2.0 * flux_pos[1:-1] + flux_pos[:-2])  # k = 1..n
    second_vel = n * n * (flux_vel[2:] - 2.0 * flux_vel[1:-1] + flux_vel[:-2])

    rhs = 3.0 * np.einsum("kd,kd->k", td_ext[:-1], second_pos) + np.einsum(
        "kd,kd->k", t_ext[:-1], second_vel
    )
    ab = compute_alpha_beta(chain)
    sd = np.empty(n + 1)
    sd[0] = 0.0
    sd[1:] = _solve_tridiagonal(ab.alpha, rhs, n)
    return sd


# ---------------------------------------------------------------------------
# diagnostics


def diagnostics_abc(chain: ChainState, sol: TensionSolution, sigma_dot: np.ndarray) -> tuple[float, float, float]:
    """a = max |D- sigma|, b = max s_k/sigma_k (inf when some sigma_k <= 0),
    c = max |D- sigma_dot|.

    Verifies the cumulative-sum consequences max sigma_k/s_k <= a and
    max |sigma_dot_k|/s_k <= c before returning.
    """
    n = chain.n
    sigma = np.asarray(getattr(sol, "sigma", sol), dtype=float)
    a = float(np.max(np.abs(forward_diff(sigma, n))))
    c = float(np.max(np.abs(forward_diff(np.asarray(sigma_dot), n))))
    s = np.arange(1, n + 1) / n
    interior = sigma[1:]
    if np.any(interior <= 0.0):
        b = float("inf")
    else:
        b = float(np.max(s / interior))
    slack = 1e-8
    if np.max(interior / s) > a * (1 + slack) + slack:
        raise RuntimeError("sigma_k/s_k exceeded max |D- sigma|; inconsistent solve")
    if np.max(np.abs(np.asarray(sigma_dot)[1:]) / s) > c * (1 + slack) + slack:
        raise RuntimeError("sigma_dot_k/s_k exceeded max |D- sigma_dot|; inconsistent solve")
    return a, b, c


def sigma_sobolev(sigma, n: int, m_max: int = 3) -> np.ndarray:
    """Weighted Sobolev norms of the tension,
    d_m = sum_{l=0}^{m-1} |sigma|^2_{l+3/2, l+2} for m = 1..m_max.

    The sums start at k = 0 (sigma_0 = 0 carries endpoint information).
    Entries whose difference order exceeds the grid are NaN (only n <= 4).
    """
    sigma = np.asarray(getattr(sigma, "sigma", sigma), dtype=float)
    pieces = np.empty(m_max)
    for ell in range(m_max):
        try:
            pieces[ell] = weighted_seminorm_sq(sigma, ell + 1.5, ell + 2, n, first_index=0)
        except ValueError:
            pieces[ell] = np.nan
    return np.cumsum(pieces)


# ---------------------------------------------------------------------------
# bound certificates


@dataclass(frozen=True)
class GreenCertificate:
    """Measured extremes of the Green-function ratios and pass/fail of each
    bound.  Checks that need sign or curvature hypotheses report None when
    the hypothesis fails.
    """

    n: int
    all_alpha_nonneg: bool
    all_alpha_positive: bool
    max_abs_green_diff: float      # max |n (G_kj - G_{k-1,j})|, G_0j = 0
    max_upper_ratio: float         # max n G_kj / k
    min_lower_ratio: float         # min n^2 G_kj / (j k)
    upsilon: float                 # max_k (k/n)^{3/2} |D+^2 eta_k|^2
    upsilon_admissible: bool       # upsilon <= 2 sqrt(n) / 5
    minmax_bound_ok: bool          # |G_kj| <= min(j,k)/n, unconditional
    diff_bound_ok: bool | None     # |D-G| <= 1          (needs alpha >= 0)
    ratio_bound_ok: bool | None    # n G_kj / k <= 1     (needs alpha >= 0)
    lower_bound_ok: bool | None    # min ratio >= e^{-2 upsilon} (needs admissible upsilon)
    corner_ok: bool | None         # min F = F_{1n}      (needs alpha >= 0)
    corner_gap: float              # min F - F_{1n}
    corner_product_gap: float      # F_{1n} - (1/beta_1) prod alpha_m/beta_{m+1}

    def all_applicable_pass(self) -> bool:
        checks = [self.minmax_bound_ok, self.diff_bound_ok, self.ratio_bound_ok,
                  self.lower_bound_ok, self.corner_ok]
        return all(c for c in checks if c is not None)


_BOUND_SLACK = 1e-12


def certify_bounds(gm: GreenMatrix, chain: ChainState) -> GreenCertificate:
    """Evaluate every Green-function bound for a matrix built from ``chain``.

    Failures are reported in the certificate, never raised.
    """
    n = gm.n
    G = gm.G
    ab = compute_alpha_beta(chain)
    all_nonneg = bool(np.all(ab.alpha >= 0))
    all_pos = bool(np.all(ab.alpha > 0))

    kk = np.arange(1, n + 1)[:, None]
    jj = np.arange(1, n + 1)[None, :]

    G0 = np.vstack([np.zeros((1, n)), G])  # G_0j = 0 convention
    diffG = n * (G0[1:] - G0[:-1])
    max_abs_diff = float(np.max(np.abs(diffG)))
    max_upper = float(np.max(n * G / kk))
    min_lower = float(np.min(n * n * G / (jj * kk)))

    ups = upsilon_threehalves(chain)
    admissible = ups <= 2.0 * np.sqrt(n) / 5.0

    minmax_ok = bool(np.all(np.abs(G) <= np.minimum(jj, kk) / n + _BOUND_SLACK))
    diff_ok = bool(max_abs_diff <= 1.0 + _BOUND_SLACK) if all_nonneg else None
    ratio_ok = bool(max_upper <= 1.0 + _BOUND_SLACK) if all_nonneg else None
    lower_ok = bool(min_lower >= np.exp(-2.0 * ups) - _BOUND_SLACK) if admissible else None

    F = n * n * G / (jj * kk)
    F1n = float(F[0, -1])
    corner_gap = float(np.min(F) - F1n)
    prod_formula = float(np.prod(ab.alpha / ab.beta[1:]) / ab.beta[0])
    corner_ok = None
    if all_nonneg:
        corner_ok = bool(abs(corner_gap) <= 1e-12 * max(1.0, abs(F1n)))
    return GreenCertificate(
        n=n,
        all_alpha_nonneg=all_nonneg,
        all_alpha_positive=all_pos,
        max_abs_green_diff=max_abs_diff,
        max_upper_ratio=max_upper,
        min_lower_ratio=min_lower,
        upsilon=ups,
        upsilon_admissible=admissible,
        minmax_bound_ok=minmax_ok,
        diff_bound_ok=diff_ok,
        ratio_bound_ok=ratio_ok,
        lower_bound_ok=lower_ok,
        corner_ok=corner_ok,
        corner_gap=corner_gap,
        corner_product_gap=F1n - prod_formula,
    )
