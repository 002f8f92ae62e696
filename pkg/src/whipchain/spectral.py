"""Angle representation for planar chains and the chain/whip spectral maps.

A chain in the plane is equivalently a sequence of link angles theta_k with
D+ eta_k = (cos theta_k, sin theta_k); the inextensibility constraint is
then exact by construction.  Symmetric (even through the fixed end) angle
data expands in two orthogonal families:

* Q_m(s) = K_m P'_{2m-1}(1-s) on [0, 2] (Legendre-derived), and
* q_m(k/n), k = 1..2n (Hahn-derived), discretely orthonormal.

Both are orthonormal for the j = 0 symmetric weighted inner product and
diagonal with the same coefficients r_mj for every difference order j, which
is what makes the resolution-transfer maps isometries.

Inner products use the symmetric weight rho(s) = s(2-s), discretely
rho_k = k(2n+1-k)/n^2 with the rising-factorial analogue
rho_k^{(r)} = prod_{i=0}^{r-1} (k+i)(2n+1-k-i)/n^{2r} for higher orders.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial

import numpy as np
from numpy.polynomial import legendre as npleg

from .core import ChainState, _frozen_array, forward_diff_m


@dataclass(frozen=True)
class AngleState:
    """Link angles theta_1..theta_n and angular velocities (d = 2 chains)."""

    n: int
    theta: np.ndarray
    theta_dot: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        theta = _frozen_array(self.theta)
        theta_dot = _frozen_array(self.theta_dot)
        if theta.shape != (self.n,) or theta_dot.shape != (self.n,):
            raise ValueError(f"theta/theta_dot must have shape ({self.n},)")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "theta_dot", theta_dot)


@dataclass(frozen=True)
class SpectralCoeffs:
    """Expansion coefficients in one of the two orthonormal bases.

    ``basis`` is "hahn_derived" (discrete a_m, with source resolution n) or
    "legendre_derived" (continuous-target A_m, n = None).
    """

    coeffs: np.ndarray
    basis: str
    n: int | None = None

    def __post_init__(self):
        if self.basis not in ("hahn_derived", "legendre_derived"):
            raise ValueError(f"unknown basis {self.basis!r}")
        object.__setattr__(self, "coeffs", _frozen_array(self.coeffs))


# ---------------------------------------------------------------------------
# angle <-> position


def eta_to_theta(chain: ChainState) -> AngleState:
    """Angles of the unit links, unwrapped so |theta_{k+1} - theta_k| <= pi,
    and angular velocities from D+ eta_dot_k = theta_dot_k (-sin, cos)."""
    if chain.d != 2:
        raise ValueError(f"angle representation needs d = 2, got d = {chain.d}")
    t = chain.link_dirs()
    theta = np.unwrap(np.arctan2(t[:, 1], t[:, 0]))
    td = chain.link_dirs_dot()
    theta_dot = td[:, 1] * np.cos(theta) - td[:, 0] * np.sin(theta)
    return AngleState(chain.n, theta, theta_dot, chain.time)


def theta_to_eta(angles: AngleState) -> ChainState:
    """Rebuild positions by cumulative sums anchored at the fixed end; the
    produced links are unit by construction."""
    n = angles.n
    t = np.column_stack([np.cos(angles.theta), np.sin(angles.theta)])
    td = angles.theta_dot[:, None] * np.column_stack([-np.sin(angles.theta), np.cos(angles.theta)])
    eta = np.zeros((n + 1, 2))
    eta[:-1] = -np.cumsum((t / n)[::-1], axis=0)[::-1]      # eta_k = eta_{k+1} - t_k/n
    eta_dot = np.zeros((n + 1, 2))
    eta_dot[:-1] = -np.cumsum((td / n)[::-1], axis=0)[::-1]
    return ChainState(n, 2, eta, eta_dot, angles.time)


def even_extend_theta(theta: np.ndarray, n: int) -> np.ndarray:
    """Extend theta_1..theta_n to k = 1..2n by theta_{2n+1-k} = theta_k."""
    theta = np.asarray(theta, dtype=float)
    if theta.shape[0] != n:
        raise ValueError(f"expected {n} angles, got {theta.shape[0]}")
    return np.concatenate([theta, theta[::-1]])


# ---------------------------------------------------------------------------
# symmetric weights and inner products


def symmetric_weight(n: int, r: int, count: int) -> np.ndarray:
    """rho_k^{(r)} = prod_{i=0}^{r-1} (k+i)(2n+1-k-i) / n^{2r} for k = 1..count."""
    k = np.arange(1, count + 1, dtype=float)
    out = np.ones(count)
    for i in range(r):
        out *= (k + i) * (2 * n + 1 - k - i) / n**2
    return out


def discrete_symmetric_inner(f, g, j: int, n: int) -> float:
    """<<f, g>>_{rho, j} = (1/n) sum_{k=1}^{n - floor(j/2)} rho_k^{(j+1)} (D+^j f)(D+^j g).

    f and g are evenly extended sequences on k = 1..2n (or length-n halves,
    which are extended here).
    """
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape[0] == n:
        f = even_extend_theta(f, n)
    if g.shape[0] == n:
        g = even_extend_theta(g, n)
    if f.shape[0] != 2 * n or g.shape[0] != 2 * n:
        raise ValueError("inputs must have length n or 2n")
    df = forward_diff_m(f, n, j) if j else f
    dg = forward_diff_m(g, n, j) if j else g
    kmax = n - j // 2
    w = symmetric_weight(n, j + 1, kmax)
    return float(np.sum(w * df[:kmax] * dg[:kmax]) / n)


def continuous_symmetric_inner(f, g, j: int, order: int = 160) -> float:
    """<<f, g>>_{rho, j} = int_0^1 rho(s)^{j+1} f^{(j)} g^{(j)} ds by
    Gauss-Legendre quadrature; f, g are callables returning the j-th
    derivative values when called as f(s, j)."""
    x, w = npleg.leggauss(order)
    s = 0.5 * (x + 1.0)
    rho = s * (2.0 - s)
    return float(0.5 * np.sum(w * rho ** (j + 1) * f(s, j) * g(s, j)))


def r_coefficient(m: int, j: int) -> float:
    """r_mj = (2m+j)! / ((2m-j-2)! 2m (2m-1)); zero when 2m-j-2 < 0
    (reciprocal factorial of a negative integer)."""
    if m < 1:
        raise ValueError(f"mode index must be >= 1, got {m}")
    if 2 * m - j - 2 < 0:
        return 0.0
    return factorial(2 * m + j) / (factorial(2 * m - j - 2) * (2 * m) * (2 * m - 1))


# ---------------------------------------------------------------------------
# the two bases


def basis_Q(m: int, s) -> np.ndarray:
    """Legendre-derived mode Q_m(s) = K_m P'_{2m-1}(1-s) on [0, 2], even
    through s = 1, orthonormal at j = 0 for the rho-weighted inner product."""
    if m < 1:
        raise ValueError(f"mode index must be >= 1, got {m}")
    coeffs = np.zeros(2 * m)
    coeffs[2 * m - 1] = 1.0
    dP = npleg.legder(coeffs)
    K = np.sqrt((4 * m - 1) / (2.0 * m * (2 * m - 1)))
    return K * npleg.legval(1.0 - np.asarray(s, dtype=float), dP)


def basis_Q_deriv(m: int, s, j: int) -> np.ndarray:
    """j-th derivative of Q_m (for quadrature oracles)."""
    coeffs = np.zeros(2 * m)
    coeffs[2 * m - 1] = 1.0
    dP = npleg.legder(coeffs, j + 1)
    K = np.sqrt((4 * m - 1) / (2.0 * m * (2 * m - 1)))
    return K * (-1.0) ** j * npleg.legval(1.0 - np.asarray(s, dtype=float), dP)


@lru_cache(maxsize=64)
def basis_q_table(n: int) -> np.ndarray:
    """All discrete modes q_m(k/n), m = 1..n, k = 1..2n, as a read-only
    (n, 2n) array.

    Built by the three-term recurrence for orthogonal polynomials of the
    discrete measure rho_k on k = 1..2n (with full reorthogonalization, so
    orthonormality holds to round-off for every m <= n).  The even-degree
    members are the symmetric family; signs follow the continuous basis,
    q_m(1/n) > 0.
    """
    k = np.arange(1, 2 * n + 1, dtype=float)
    y = k - (2 * n + 1) / 2.0                     # centered variable; reflection is y -> -y
    w = k * (2 * n + 1 - k) / n**2 / (2.0 * n)    # half-range-normalized measure
    ps = []
    p_prev = np.zeros_like(y)
    p_cur = np.ones_like(y) / np.sqrt(np.sum(w))
    b_prev = 0.0
    for _ in range(2 * n - 2):
        ps.append(p_cur)
        t = y * p_cur - b_prev * p_prev           # symmetric measure: diagonal recurrence term is 0
        P = np.array(ps)
        for _ in range(2):                        # twice-is-enough reorthogonalization
            t = t - P.T @ (P @ (w * t))
        b_cur = np.sqrt(np.sum(w * t * t))
        p_prev, p_cur, b_prev = p_cur, t / b_cur, b_cur
    ps.append(p_cur)
    table = np.empty((n, 2 * n))
    for m in range(1, n + 1):
        q = ps[2 * m - 2]
        q = 0.5 * (q + q[::-1])  # make the reflection identity bitwise exact
        table[m - 1] = q if q[0] > 0 else -q
    table.setflags(write=False)
    return table


def basis_q(m: int, n: int) -> np.ndarray:
    """Discrete mode q_m(k/n) for k = 1..2n; symmetric under k -> 2n+1-k."""
    if m < 1:
        raise ValueError(f"mode index must be >= 1, got {m}")
    if m > n:
        raise ValueError(f"mode index m={m} exceeds the resolution n={n}")
    return basis_q_table(n)[m - 1]


# ---------------------------------------------------------------------------
# transfer maps


def angle_coefficients(values, n: int) -> np.ndarray:
    """a_m = <<theta, q_m>>_{rho,0} = (1/n) sum_k rho_k theta_k q_m(k/n)."""
    values = np.asarray(values, dtype=float)
    if values.shape[0] == n:
        values = even_extend_theta(values, n)
    k = np.arange(1, n + 1, dtype=float)
    rho = k * (2 * n + 1 - k) / n**2
    table = basis_q_table(n)[:, :n]
    return table @ (rho * values[:n]) / n


def evaluate_discrete(coeffs, n: int) -> np.ndarray:
    """theta_k = sum_{m <= min(n, len(coeffs))} A_m q_m(k/n) for k = 1..n."""
    coeffs = np.asarray(coeffs, dtype=float)
    mm = min(n, coeffs.shape[0])
    return coeffs[:mm] @ basis_q_table(n)[:mm, :n]


def evaluate_continuous(coeffs, s) -> np.ndarray:
    """theta(s) = sum_m A_m Q_m(s)."""
    coeffs = np.asarray(coeffs, dtype=float)
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    for m, A in enumerate(coeffs, start=1):
        if A != 0.0:
            out = out + A * basis_Q(m, s)
    return out


def continuize_Gn(angles: AngleState) -> tuple[SpectralCoeffs, SpectralCoeffs]:
    """Discrete angles -> continuous-target coefficients (theta and theta_dot
    paths); an isometry in every (rho, j) seminorm."""
    a = angle_coefficients(angles.theta, angles.n)
    ad = angle_coefficients(angles.theta_dot, angles.n)
    return (
        SpectralCoeffs(a, "hahn_derived", angles.n),
        SpectralCoeffs(ad, "hahn_derived", angles.n),
    )


def discretize_Fn(coeffs, n: int, coeffs_dot=None, time: float = 0.0) -> AngleState:
    """Coefficients -> discrete angles at resolution n, truncating to the
    first n modes; inverse of continuize_Gn on n-mode data."""
    theta = evaluate_discrete(np.asarray(getattr(coeffs, "coeffs", coeffs), dtype=float), n)
    if coeffs_dot is None:
        theta_dot = np.zeros(n)
    else:
        theta_dot = evaluate_discrete(np.asarray(getattr(coeffs_dot, "coeffs", coeffs_dot), dtype=float), n)
    return AngleState(n, theta, theta_dot, time)


def transfer_resolution(chain: ChainState, n_target: int) -> ChainState:
    """Resample a planar chain to n_target links through the spectral maps;
    the result satisfies |D+ eta| = 1 exactly and preserves the symmetric
    Sobolev seminorms of the retained modes."""
    if chain.d != 2:
        raise ValueError("transfer_resolution supports d = 2 only")
    if n_target < 1:
        raise ValueError(f"target resolution must be >= 1, got {n_target}")
    angles = eta_to_theta(chain)
    a, ad = continuize_Gn(angles)
    resampled = discretize_Fn(a, n_target, ad, time=chain.time)
    return theta_to_eta(resampled)


# ---------------------------------------------------------------------------
# angle/position norm comparison (monitored, not asserted)


def theta_eta_norms(chain: ChainState) -> tuple[float, float]:
    """The pair (A, B) of squared third-order weighted norms of the angle
    function and the position function; bounded by polynomial expressions in
    each other with constants the theory does not pin down."""
    from .core import rising_weight  # local import to keep module deps one-way

    n = chain.n
    angles = eta_to_theta(chain)
    A = 0.0
    B = 0.0
    for j in (1, 2, 3):
        if n - j < 1:
            continue
        dth = forward_diff_m(angles.theta, n, j)
        ks = np.arange(1, n - j + 1)
        A += float(np.sum(rising_weight(ks, j + 1, n) * dth**2) / n)
        # position differences of order j+1 at k = 1..n-j need no extension
        dpos = forward_diff_m(chain.eta, n, j + 1)[: n - j]
        B += float(np.sum(rising_weight(ks, j + 1, n) * np.sum(dpos * dpos, axis=-1)) / n)
    return A, B
