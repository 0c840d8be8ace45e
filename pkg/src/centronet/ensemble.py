"""Sampling of mirror-symmetric random networks.

A network on N sites (N even) is a real symmetric Hamiltonian that commutes
with the exchange J mapping site i to site N-1-i.  Entries are Gaussian with
variance 2*xi^2/N on the diagonal and anti-diagonal and xi^2/N elsewhere, so
the spectrum fills a semicircle of radius 2*xi.  Every such matrix splits
into two independent half-size blocks

    H = [[A, C J'], [J' C, J' A J']],       H_pm = A +- C,

where A and C are symmetric n x n blocks (n = N/2), J' the half-size
exchange, and the diagonal of C holds the anti-diagonal couplings of H.  The
transfer states |+-> = (|in> +- |out>)/sqrt(2) map onto the first basis
vector of their block.

Randomness contract
-------------------
All Monte Carlo draws reduce to standard normal deviates laid out in a fixed
order: the upper triangle of A row by row (diagonal included), then the
upper triangle of C.  One realization consumes gauss_count(N) deviates.
Realization r lives in block r // BLOCK_SIZE of a PCG64 stream seeded with
SeedSequence((master_seed, block_index)), at row r % BLOCK_SIZE of that
block.  Every result is therefore a pure function of (master_seed, r), no
matter how many realizations are screened, in what order, or on how many
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

#: Realizations per seeded substream block.
BLOCK_SIZE = 1 << 16

MODES = ("plain_goe", "centrosymmetric", "dominant_doublet")


class MirrorSymmetryError(ValueError):
    """Raised when a matrix violates the exchange symmetry it promises."""


@dataclass(frozen=True)
class EnsembleConfig:
    """Parameters of one Monte Carlo cell.

    n is the full network size (even), xi the disorder scale, alpha the
    doublet-weight acceptance threshold, and n_target the number of
    realizations the harness tries to accept.  fixed_e_plus_v pins the
    on-site energy so that E + V is constant across realizations (density
    of states experiment); fixed_v_star overwrites the direct in/out
    coupling after identification.
    """

    n: int
    xi: float
    alpha: float = 0.95
    master_seed: int = 0
    window_factor: float = 1.7
    n_target: int = 1000
    mode: str = "dominant_doublet"
    fixed_e_plus_v: Optional[float] = None
    fixed_v_star: Optional[float] = None

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise ValueError(f"network size must be even and >= 2, got {self.n}")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}, expected one of {MODES}")
        if self.mode == "dominant_doublet" and self.n < 4:
            raise ValueError("doublet post-selection needs n >= 4")
        if not self.xi > 0:
            raise ValueError(f"xi must be positive, got {self.xi}")
        if not 0.5 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (1/2, 1), got {self.alpha}")
        if not 0 <= self.master_seed < 2**64:
            raise ValueError("master_seed must fit in 64 bits")
        if self.window_factor < 1.0:
            raise ValueError(f"window_factor must be >= 1, got {self.window_factor}")
        if self.n_target < 1:
            raise ValueError(f"n_target must be >= 1, got {self.n_target}")
        if self.fixed_v_star is not None and self.fixed_v_star <= 0:
            raise ValueError("fixed_v_star must be positive")


@dataclass(frozen=True, eq=False)
class CentroHamiltonian:
    """One sampled network with its transfer pair already identified.

    The in/out pair sits at sites 0 and n-1 after relabeling, site_energy
    is the shared on-site energy of that pair and direct_coupling the
    (positive) matrix element between them.
    """

    matrix: np.ndarray
    in_index: int
    out_index: int
    site_energy: float
    direct_coupling: float

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def validate(self, rtol: float = 1e-12) -> None:
        """Check exchange symmetry and the stored E, V against the matrix."""
        m = self.matrix
        n = m.shape[0]
        scale = float(np.linalg.norm(m))
        mirrored = m[::-1, ::-1]
        if np.max(np.abs(m - mirrored)) > rtol * max(scale, 1.0):
            raise MirrorSymmetryError("matrix is not centrosymmetric")
        if self.out_index != n - 1 - self.in_index:
            raise ValueError("in/out must be a mirror pair")
        if abs(m[self.in_index, self.in_index] - self.site_energy) > rtol * max(scale, 1.0):
            raise ValueError("site_energy does not match the matrix")
        if abs(m[self.in_index, self.out_index] - self.direct_coupling) > rtol * max(scale, 1.0):
            raise ValueError("direct_coupling does not match the matrix")


def exchange_matrix(n: int) -> np.ndarray:
    """The exchange (anti-identity) J with J[i, n-1-i] = 1."""
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    return np.eye(n)[::-1].copy()


def plus_minus_states(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric and antisymmetric combinations of the transfer pair.

    Returns (plus, minus) with |+-> = (|0> +- |n-1>)/sqrt(2).
    """
    if n < 2:
        raise ValueError(f"need at least two sites, got {n}")
    plus = np.zeros(n)
    minus = np.zeros(n)
    rt = 1.0 / np.sqrt(2.0)
    plus[0] = rt
    plus[-1] = rt
    minus[0] = rt
    minus[-1] = -rt
    return plus, minus


def gauss_count(n: int) -> int:
    """Standard normal deviates consumed by one mirror-symmetric draw."""
    half = n // 2
    return half * (half + 1)


def sigma_pair(n: int, xi: float) -> tuple[float, float]:
    """(off-diagonal, diagonal) standard deviations of the half blocks."""
    sig_off = xi / np.sqrt(n)
    return sig_off, np.sqrt(2.0) * sig_off


def block_gaussians(master_seed: int, block_index: int, n_cols: int,
                    n_rows: int = BLOCK_SIZE) -> np.ndarray:
    """The canonical deviate block: row r % BLOCK_SIZE feeds realization r."""
    seq = np.random.SeedSequence((master_seed, block_index))
    gen = np.random.Generator(np.random.PCG64(seq))
    return gen.standard_normal((n_rows, n_cols))


def _build_symmetric(flat: np.ndarray, n: int, sig_off: float, sig_diag: float) -> np.ndarray:
    rows, cols = np.triu_indices(n)
    scale = np.where(rows == cols, sig_diag, sig_off)
    out = np.empty((n, n))
    vals = flat * scale
    out[rows, cols] = vals
    out[cols, rows] = vals
    return out


def blocks_from_gaussians(flat: np.ndarray, n: int, xi: float) -> tuple[np.ndarray, np.ndarray]:
    """Decode one deviate row into the (A, C) half blocks, unscaled order."""
    half = n // 2
    m = half * (half + 1) // 2
    if flat.shape[0] != 2 * m:
        raise ValueError(f"expected {2 * m} deviates, got {flat.shape[0]}")
    sig_off, sig_diag = sigma_pair(n, xi)
    a = _build_symmetric(flat[:m], half, sig_off, sig_diag)
    c = _build_symmetric(flat[m:], half, sig_off, sig_diag)
    return a, c


def canonicalize_blocks(a: np.ndarray, c: np.ndarray,
                        fixed_v_star: Optional[float] = None,
                        fixed_e_plus_v: Optional[float] = None) -> float:
    """Identify the weakest anti-diagonal coupling and move it to the front.

    Mutates a and c in place: swaps the minimal |C_ii| pair to index 0,
    flips the global sign so the coupling is positive, then applies the
    optional overrides.  Returns the resulting direct coupling V.
    """
    k = int(np.argmin(np.abs(np.diag(c))))
    if k != 0:
        perm = np.arange(a.shape[0])
        perm[0], perm[k] = k, 0
        a[:] = a[np.ix_(perm, perm)]
        c[:] = c[np.ix_(perm, perm)]
    if c[0, 0] < 0.0:
        a *= -1.0
        c *= -1.0
    if fixed_v_star is not None:
        c[0, 0] = fixed_v_star
    v = c[0, 0]
    if fixed_e_plus_v is not None:
        a[0, 0] = fixed_e_plus_v - v
    return float(v)


def assemble_centro(a: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Full mirror-symmetric matrix from its half blocks."""
    n = a.shape[0]
    out = np.empty((2 * n, 2 * n))
    out[:n, :n] = a
    out[:n, n:] = c[:, ::-1]
    out[n:, :n] = c[::-1, :]
    out[n:, n:] = a[::-1, ::-1]
    return out


def sample_goe_centrosymmetric(config: EnsembleConfig,
                               rng: np.random.Generator) -> CentroHamiltonian:
    """Draw one mirror-symmetric network from a live generator."""
    flat = rng.standard_normal(gauss_count(config.n))
    a, c = blocks_from_gaussians(flat, config.n, config.xi)
    v = canonicalize_blocks(a, c, config.fixed_v_star, config.fixed_e_plus_v)
    h = assemble_centro(a, c)
    return CentroHamiltonian(matrix=h, in_index=0, out_index=config.n - 1,
                             site_energy=float(a[0, 0]), direct_coupling=v)


def sample_realization(config: EnsembleConfig, index: int) -> CentroHamiltonian:
    """Regenerate realization `index` of the (master_seed, index) stream.

    Rebuilds the enclosing deviate block, so it costs a full block of
    normals; meant for spot reproduction of logged records, not for bulk
    sampling.
    """
    if index < 0:
        raise ValueError("realization index must be nonnegative")
    m = gauss_count(config.n)
    block, offset = divmod(index, BLOCK_SIZE)
    flat = block_gaussians(config.master_seed, block, m, n_rows=offset + 1)[offset]
    a, c = blocks_from_gaussians(flat, config.n, config.xi)
    v = canonicalize_blocks(a, c, config.fixed_v_star, config.fixed_e_plus_v)
    h = assemble_centro(a, c)
    return CentroHamiltonian(matrix=h, in_index=0, out_index=config.n - 1,
                             site_energy=float(a[0, 0]), direct_coupling=v)


def gauss_count_plain(n: int) -> int:
    """Deviates consumed by one unconstrained symmetric draw."""
    return n * (n + 1) // 2


def plain_from_gaussians(flat: np.ndarray, n: int, xi: float,
                         fixed_v_star: Optional[float] = None,
                         fixed_e_plus_v: Optional[float] = None) -> np.ndarray:
    """Unconstrained GOE matrix with the same site-pair identification.

    Entry variances match the mirror-symmetric ensemble (2*xi^2/N on the
    diagonal, xi^2/N elsewhere; the anti-diagonal is nothing special
    here).  The weakest anti-diagonal pair is relabeled to (0, n-1) and
    the global sign fixed, so downstream transfer analysis can treat site
    0 as input and site n-1 as output.
    """
    if flat.shape[0] != gauss_count_plain(n):
        raise ValueError(f"expected {gauss_count_plain(n)} deviates")
    sig_off = xi / np.sqrt(n)
    h = _build_symmetric(flat, n, sig_off, np.sqrt(2.0) * sig_off)
    half = n // 2
    anti = np.array([h[i, n - 1 - i] for i in range(half)])
    k = int(np.argmin(np.abs(anti)))
    if k != 0:
        perm = np.arange(n)
        perm[0], perm[k] = k, 0
        perm[n - 1], perm[n - 1 - k] = n - 1 - k, n - 1
        h = h[np.ix_(perm, perm)]
    if h[0, n - 1] < 0.0:
        h = -h
    if fixed_v_star is not None:
        h[0, n - 1] = fixed_v_star
        h[n - 1, 0] = fixed_v_star
    if fixed_e_plus_v is not None:
        v = h[0, n - 1]
        h[0, 0] = fixed_e_plus_v - v
        h[n - 1, n - 1] = fixed_e_plus_v - v
    return h


def sample_goe_plain(config: EnsembleConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw one unconstrained GOE network from a live generator."""
    flat = rng.standard_normal(gauss_count_plain(config.n))
    return plain_from_gaussians(flat, config.n, config.xi,
                                config.fixed_v_star, config.fixed_e_plus_v)


def block_diagonalize(h) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split a mirror-symmetric matrix into its even and odd sectors.

    Accepts a CentroHamiltonian or a bare matrix.  Returns
    (h_plus, h_minus, k_transform) where k_transform @ H @ k_transform.T is
    block diagonal with the odd sector (containing |->) first and the even
    sector (containing |+>) second.  The transfer states map onto the first
    basis vector of their sector.

    Raises MirrorSymmetryError when the input breaks the exchange symmetry
    by more than 1e-12 of its norm.
    """
    m = h.matrix if isinstance(h, CentroHamiltonian) else np.asarray(h, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    n2 = m.shape[0]
    if n2 % 2:
        raise ValueError("dimension must be even")
    scale = float(np.linalg.norm(m))
    if np.max(np.abs(m - m[::-1, ::-1])) > 1e-12 * max(scale, 1.0):
        raise MirrorSymmetryError("matrix is not centrosymmetric within 1e-12")
    n = n2 // 2
    a = m[:n, :n]
    c = m[:n, n:][:, ::-1]
    h_plus = 0.5 * ((a + c) + (a + c).T)
    h_minus = 0.5 * ((a - c) + (a - c).T)
    k = np.zeros((n2, n2))
    eye = np.eye(n)
    rt = 1.0 / np.sqrt(2.0)
    k[:n, :n] = rt * eye
    k[:n, n:] = -rt * eye[:, ::-1]
    k[n:, :n] = rt * eye
    k[n:, n:] = rt * eye[:, ::-1]
    off = k @ m @ k.T
    if np.max(np.abs(off[:n, n:])) > 1e-12 * max(scale, 1.0):
        raise MirrorSymmetryError("sector rotation left a coupling block behind")
    return h_plus, h_minus, k


def deflate_sector(sector: np.ndarray, state: Optional[np.ndarray] = None
                   ) -> tuple[float, np.ndarray, np.ndarray]:
    """Split a sector into the transfer level, its couplings, and the bulk.

    With state=None the transfer state is taken to be the first basis
    vector (the convention produced by block_diagonalize); otherwise the
    basis is rotated by a Householder reflection sending `state` there.
    Returns (level, coupling_row, sub_block).
    """
    s = np.asarray(sector, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] < 2:
        raise ValueError("sector must be square with dimension >= 2")
    if state is not None:
        vec = np.asarray(state, dtype=float)
        if vec.shape != (s.shape[0],):
            raise ValueError("state dimension does not match the sector")
        nrm = np.linalg.norm(vec)
        if nrm == 0:
            raise ValueError("state must be nonzero")
        u = vec / nrm
        w = u.copy()
        w[0] -= np.sign(u[0]) if u[0] != 0 else 1.0
        wn = np.linalg.norm(w)
        if wn > 1e-15:
            w /= wn
            refl = np.eye(s.shape[0]) - 2.0 * np.outer(w, w)
            # reflection maps state to (sign) e1; sign squares away in s
            s = refl @ s @ refl.T
    return float(s[0, 0]), s[0, 1:].copy(), s[1:, 1:].copy()
