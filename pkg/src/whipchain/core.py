"""Difference calculus, rising-factorial weights, weighted seminorms, and
discrete energies for a chain of n rigid links with one end fixed.

Index conventions
-----------------
Particles carry indices k = 1..n+1 with the (n+1)-st fixed at the origin;
arrays are 0-based, so ``eta[k-1]`` is particle k.  Tensions carry indices
0..n with sigma_0 = 0, stored so that ``sigma[k]`` is sigma_k.  The forward
difference is (D+ f)_k = n (f_{k+1} - f_k); difference operators shorten
arrays and never pad.  Where the extended index ranges are required, use
:func:`odd_extend` explicitly.

All functions here are pure; states are immutable once constructed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


# ---------------------------------------------------------------------------
# difference calculus


def forward_diff(f, n: int) -> np.ndarray:
    """(D+ f)_k = n (f_{k+1} - f_k); output is one shorter than the input.

    The entry ``out[i]`` carries the chain index of ``f[i]``.
    """
    f = np.asarray(f, dtype=float)
    if f.shape[0] < 2:
        raise ValueError(f"forward_diff needs a sequence of length >= 2, got {f.shape[0]}")
    return n * (f[1:] - f[:-1])


def backward_diff(f, n: int) -> np.ndarray:
    """(D- f)_k = n (f_k - f_{k-1}); ``out[i]`` carries the index of ``f[i+1]``.

    Numerically the same array as :func:`forward_diff`; only the index
    attachment differs (D- = E^{-1} D+).
    """
    f = np.asarray(f, dtype=float)
    if f.shape[0] < 2:
        raise ValueError(f"backward_diff needs a sequence of length >= 2, got {f.shape[0]}")
    return n * (f[1:] - f[:-1])


def shift_forward(f) -> np.ndarray:
    """(E f)_k = f_{k+1}: drop the leading entry."""
    return np.asarray(f)[1:]


def shift_backward(f) -> np.ndarray:
    """(E^{-1} f)_k = f_{k-1}: drop the trailing entry."""
    return np.asarray(f)[:-1]


def forward_diff_m(f, n: int, m: int) -> np.ndarray:
    """m-fold forward difference; output is m shorter than the input."""
    if m < 0:
        raise ValueError(f"difference order must be nonnegative, got {m}")
    out = np.asarray(f, dtype=float)
    if out.shape[0] < m + 1:
        raise ValueError(
            f"sequence of length {out.shape[0]} does not support {m} differences"
        )
    for _ in range(m):
        out = n * (out[1:] - out[:-1])
    return out


# ---------------------------------------------------------------------------
# rising-factorial weights


def rising_weight(k, r: float, n: int):
    """Weight s_k^{(r)} = Gamma(k+r) / (n^r Gamma(k)) for r > -1.

    Vectorized over k.  k = 0 is allowed with the limiting values
    s_0^{(0)} = 1 and s_0^{(r)} = 0 for r != 0 (1/Gamma(0) = 0), which is
    what the extended sigma-norm ranges need.  Integer r >= 0 uses the exact
    product k (k+1) ... (k+r-1) / n^r; other r go through log-gamma so large
    k + r cannot overflow.
    """
    if r <= -1:
        raise ValueError(f"weight exponent must be > -1, got r={r}")
    k = np.asarray(k)
    if np.any(k < 0):
        raise ValueError("weight index k must be >= 0")
    kf = k.astype(float)
    if float(r).is_integer() and r >= 0:
        ri = int(r)
        out = np.ones_like(kf)
        for i in range(ri):
            out = out * (kf + i)
        out = out / float(n) ** ri
    else:
        with np.errstate(divide="ignore"):
            out = np.exp(gammaln(kf + r) - gammaln(kf) - r * np.log(n))
        out = np.where(k == 0, 0.0, out)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# weighted seminorms


def _sq(values: np.ndarray) -> np.ndarray:
    if values.ndim == 1:
        return values * values
    return np.sum(values * values, axis=-1)


def weighted_seminorm_sq(f, r: float, m: int, n: int, first_index: int = 1) -> float:
    """Squared weighted Sobolev seminorm (1/n) sum_k s_k^{(r)} |D+^m f_k|^2.

    ``f[0]`` carries chain index ``first_index`` and the sum runs over every
    k at which the m-th difference exists.  With the paper's storage
    conventions that reproduces the stated ranges: a bare sequence f_1..f_n
    gives k = 1..n-m, eta (length n+1) gives k = 1..n-m+1, and sigma with
    ``first_index=0`` (length n+1) gives k = 0..n-m.
    """
    df = forward_diff_m(f, n, m)
    ks = first_index + np.arange(df.shape[0])
    w = rising_weight(ks, r, n)
    return float(np.sum(w * _sq(df)) / n)


def weighted_seminorm(f, r: float, m: int, n: int, first_index: int = 1) -> float:
    """Square root of :func:`weighted_seminorm_sq`."""
    return float(np.sqrt(weighted_seminorm_sq(f, r, m, n, first_index)))


def weighted_supnorm_sq(f, r: float, m: int, n: int, first_index: int = 1) -> float:
    """Squared weighted sup seminorm max_k s_k^{(r)} |D+^m f_k|^2."""
    df = forward_diff_m(f, n, m)
    ks = first_index + np.arange(df.shape[0])
    w = rising_weight(ks, r, n)
    return float(np.max(w * _sq(df)))


def weighted_supnorm(f, r: float, m: int, n: int, first_index: int = 1) -> float:
    """Square root of :func:`weighted_supnorm_sq`."""
    return float(np.sqrt(weighted_supnorm_sq(f, r, m, n, first_index)))


@dataclass(frozen=True)
class WeightedSeminorm:
    """A labeled seminorm evaluation: weight exponent r > -1, difference
    order m >= 0, and the squared value (the primitive the energy sums use,
    avoiding needless square roots)."""

    r: float
    m: int
    value: float

    def __post_init__(self):
        if self.r <= -1:
            raise ValueError(f"weight exponent must be > -1, got r={self.r}")
        if self.m < 0:
            raise ValueError(f"difference order must be >= 0, got m={self.m}")
        if not self.value >= 0.0:
            raise ValueError(f"seminorm value must be nonnegative, got {self.value}")

    @classmethod
    def sobolev(cls, f, r: float, m: int, n: int, first_index: int = 1) -> "WeightedSeminorm":
        return cls(r, m, weighted_seminorm_sq(f, r, m, n, first_index))

    @classmethod
    def supremum(cls, f, r: float, m: int, n: int, first_index: int = 1) -> "WeightedSeminorm":
        return cls(r, m, weighted_supnorm_sq(f, r, m, n, first_index))

    @property
    def root(self) -> float:
        return float(np.sqrt(self.value))


# ---------------------------------------------------------------------------
# chain state


def _frozen_array(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ChainState:
    """Positions and velocities of the n moving particles plus the fixed end.

    eta and eta_dot have shape (n+1, d); row k-1 is particle k and the last
    row is the fixed end, exactly zero.  On the constraint manifold every
    link satisfies |D+ eta_k| = 1 and <D+ eta_k, D+ eta_dot_k> = 0; use
    :meth:`validate` to enforce this within tolerances.
    """

    n: int
    d: int
    eta: np.ndarray
    eta_dot: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"need at least one link, got n={self.n}")
        if self.d < 2:
            raise ValueError(f"ambient dimension must be >= 2, got d={self.d}")
        eta = _frozen_array(self.eta)
        eta_dot = _frozen_array(self.eta_dot)
        expected = (self.n + 1, self.d)
        if eta.shape != expected or eta_dot.shape != expected:
            raise ValueError(
                f"eta/eta_dot must have shape {expected}, got {eta.shape} and {eta_dot.shape}"
            )
        if np.any(eta[-1] != 0.0) or np.any(eta_dot[-1] != 0.0):
            raise ValueError("the fixed end eta_{n+1} and its velocity must be exactly zero")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "eta_dot", eta_dot)

    def link_dirs(self) -> np.ndarray:
        """(D+ eta)_k for k = 1..n, shape (n, d); unit vectors on the manifold."""
        return forward_diff(self.eta, self.n)

    def link_dirs_dot(self) -> np.ndarray:
        """(D+ eta_dot)_k for k = 1..n, shape (n, d)."""
        return forward_diff(self.eta_dot, self.n)

    def constraint_drift(self) -> float:
        """max_k | |D+ eta_k| - 1 |."""
        return float(np.max(np.abs(np.linalg.norm(self.link_dirs(), axis=1) - 1.0)))

    def orthogonality_drift(self) -> float:
        """max_k | <D+ eta_k, D+ eta_dot_k> |."""
        return float(np.max(np.abs(np.einsum("kd,kd->k", self.link_dirs(), self.link_dirs_dot()))))

    def validate(self, tol_length: float = 1e-10, tol_orth: float = 1e-8) -> "ChainState":
        drift = self.constraint_drift()
        if drift > tol_length:
            raise ValueError(f"link-length drift {drift:.3e} exceeds tolerance {tol_length:.1e}")
        orth = self.orthogonality_drift()
        if orth > tol_orth:
            raise ValueError(f"orthogonality drift {orth:.3e} exceeds tolerance {tol_orth:.1e}")
        return self


# ---------------------------------------------------------------------------
# odd/even extensions


@dataclass(frozen=True)
class ExtendedChain:
    """Chain extended through the fixed end: eta odd, sigma even.

    eta_ext / eta_dot_ext hold particles k = 1..2n+1 (row k-1) with
    eta_k = -eta_{2n+2-k}; sigma_ext, when present, holds sigma_0..sigma_2n
    with sigma_k = sigma_{2n+1-k}.
    """

    base: ChainState
    eta_ext: np.ndarray
    eta_dot_ext: np.ndarray
    sigma_ext: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "eta_ext", _frozen_array(self.eta_ext))
        object.__setattr__(self, "eta_dot_ext", _frozen_array(self.eta_dot_ext))
        if self.sigma_ext is not None:
            object.__setattr__(self, "sigma_ext", _frozen_array(self.sigma_ext))


def odd_reflect(values: np.ndarray) -> np.ndarray:
    """Extend eta-like data (rows k = 1..n+1) oddly to k = 1..2n+1."""
    return np.concatenate([values, -values[-2::-1]], axis=0)


def even_reflect_sigma(sigma: np.ndarray) -> np.ndarray:
    """Extend sigma_0..sigma_n evenly to sigma_0..sigma_2n (sigma_k = sigma_{2n+1-k})."""
    return np.concatenate([sigma, sigma[-1:0:-1]])


def odd_extend(chain: ChainState, sigma=None) -> ExtendedChain:
    """Odd extension of eta and eta_dot through the fixed end, even for sigma.

    ``sigma`` may be an array sigma_0..sigma_n or any object with a
    ``.sigma`` attribute (a tension solution).
    """
    eta_ext = odd_reflect(chain.eta)
    eta_dot_ext = odd_reflect(chain.eta_dot)
    sigma_ext = None
    if sigma is not None:
        sig = np.asarray(getattr(sigma, "sigma", sigma), dtype=float)
        if sig.shape != (chain.n + 1,):
            raise ValueError(f"sigma must hold sigma_0..sigma_n, expected shape ({chain.n + 1},)")
        sigma_ext = even_reflect_sigma(sig)
    return ExtendedChain(chain, eta_ext, eta_dot_ext, sigma_ext)


# ---------------------------------------------------------------------------
# discrete energies


def u0_v0(chain: ChainState) -> tuple[float, float]:
    """The two conserved pieces of e_0: u_0 = (1/n) sum |eta_dot_k|^2 and
    v_0 = (1/n) sum s_k |D+ eta_k|^2 (= 1/2 + 1/2n on the manifold)."""
    n = chain.n
    u0 = float(np.sum(_sq(chain.eta_dot[:-1])) / n)
    s = np.arange(1, n + 1) / n
    v0 = float(np.sum(s * _sq(chain.link_dirs())) / n)
    return u0, v0


def _energy_terms(vel_ext: np.ndarray, pos_ext: np.ndarray, weights, n: int, m_max: int):
    """Per-order energy contributions using weights(k_array, order) -> array.

    Term l sums k = 1..n - floor(l/2) of
    w(k, l) |D+^l eta_dot_k|^2 + w(k, l+1) |D+^{l+1} eta_k|^2.
    """
    terms = np.zeros(m_max + 1)
    dvel = vel_ext
    dpos = forward_diff(pos_ext, n)
    for ell in range(m_max + 1):
        kmax = n - ell // 2
        if kmax < 1:
            raise ValueError(f"energy order {ell} needs n > {2 * (ell // 2)}")
        ks = np.arange(1, kmax + 1)
        terms[ell] = (
            np.sum(weights(ks, ell) * _sq(dvel[:kmax]))
            + np.sum(weights(ks, ell + 1) * _sq(dpos[:kmax]))
        ) / n
        if ell < m_max:
            dvel = forward_diff(dvel, n)
            dpos = forward_diff(dpos, n)
    return terms


def discrete_energy(chain: ChainState, m_max: int = 3) -> np.ndarray:
    """Time-independent energies e_0..e_{m_max}.

    e_m = (1/n) sum_{l=0}^{m} sum_{k=1}^{n - floor(l/2)}
          ( s_k^{(l)} |D+^l eta_dot_k|^2 + s_k^{(l+1)} |D+^{l+1} eta_k|^2 ),
    with differences beyond the fixed end taken through the odd extension.
    Nondecreasing in m, and >= 1/2 + 1/2n on the constraint manifold.
    """
    if m_max < 0:
        raise ValueError(f"m_max must be nonnegative, got {m_max}")
    ext = odd_extend(chain)
    n = chain.n

    def w(ks, order):
        return rising_weight(ks, order, n)

    terms = _energy_terms(ext.eta_dot_ext, ext.eta_ext, w, n, m_max)
    return np.cumsum(terms)


def sigma_rising_product(sigma_ext: np.ndarray, k_start: int, count: int, r: int) -> np.ndarray:
    """sigma_k^{(r)} = prod_{j=k}^{k+r-1} sigma_j for k = k_start..k_start+count-1.

    ``sigma_ext`` holds sigma_0..sigma_{2n} (even extension); r = 0 gives 1.
    """
    out = np.ones(count)
    for i in range(r):
        out = out * sigma_ext[k_start + i : k_start + i + count]
    return out


def sigma_weighted_energy(chain: ChainState, sigma, m_max: int = 3) -> np.ndarray:
    """Time-dependent energies e~_0..e~_{m_max}, weighted by tension products
    sigma_k^{(l)} instead of s_k^{(l)}; equals the s-weighted energies when
    sigma_k = s_k (up to the even-extension boundary terms at m >= 3)."""
    if sigma is None:
        raise ValueError("sigma_weighted_energy requires a solved tension")
    if m_max < 0:
        raise ValueError(f"m_max must be nonnegative, got {m_max}")
    ext = odd_extend(chain, sigma)
    n = chain.n
    sig_ext = ext.sigma_ext

    def w(ks, order):
        return sigma_rising_product(sig_ext, int(ks[0]), len(ks), order)

    terms = _energy_terms(ext.eta_dot_ext, ext.eta_ext, w, n, m_max)
    return np.cumsum(terms)


# ---------------------------------------------------------------------------
# energy report


@dataclass(frozen=True)
class EnergyReport:
    """Full diagnostic record at one time instant.

    e[m] and e_tilde[m] are the s- and sigma-weighted energies for
    m = 0..m_max; d[m-1] is the tension Sobolev norm d_m for m = 1..d_max
    (NaN where n is too small for the required differences); b is inf when
    some tension is nonpositive.
    """

    e: np.ndarray
    e_tilde: np.ndarray
    u0: float
    v0: float
    a: float
    b: float
    c: float
    d: np.ndarray
    constraint_drift: float
    time: float

    def __post_init__(self):
        object.__setattr__(self, "e", _frozen_array(self.e))
        object.__setattr__(self, "e_tilde", _frozen_array(self.e_tilde))
        object.__setattr__(self, "d", _frozen_array(self.d))
