"""Eigendecomposition and doublet analysis of sector matrices.

The eigensolver is a deterministic cyclic Jacobi iteration (compiled in
_kernels) with a fixed sweep order and a fixed sign convention, so repeated
runs produce byte-identical spectra.  On top of it sit the doublet weight
extraction, the second-order level shifts of the transfer levels, and the
splitting consistency check used throughout the transfer statistics.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels

#: Denominators below this multiple of the disorder scale abort the
#: perturbative shift; the realization is then flagged degenerate.
DEGENERACY_GUARD = 1e-12


class DegenerateLevelError(ArithmeticError):
    """A perturbative denominator collapsed; shifts are unavailable."""


@dataclass(frozen=True, eq=False)
class EigenDecomposition:
    """Eigenvalues ascending, orthonormal eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class DoubletAnalysis:
    """Everything the transfer statistics need from one realization.

    alpha_plus / alpha_minus are the squared overlaps of the transfer
    states with their best sector eigenvector, idx_* the positions of those
    eigenvectors in the ascending sector spectra.  s_plus, s_minus are the
    second-order shifts of the transfer levels (NaN when a degenerate
    denominator was hit, see `degenerate`), d_plus / d_minus the distances
    of the transfer levels to the nearest bulk level.
    """

    alpha_plus: float
    alpha_minus: float
    idx_plus: int
    idx_minus: int
    e_plus: float
    e_minus: float
    splitting: float
    s_plus: float
    s_minus: float
    delta_s: float
    coupling_norm_sq_plus: float
    coupling_norm_sq_minus: float
    d_plus: float
    d_minus: float
    degenerate: bool


def eigh(matrix: np.ndarray) -> EigenDecomposition:
    """Diagonalize a real symmetric matrix.

    Deterministic: fixed cyclic sweep order, eigenvalues sorted ascending
    with a stable sort, and each eigenvector's largest-magnitude component
    made positive.
    """
    a = np.array(matrix, dtype=float, order="C")
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    scale = float(np.linalg.norm(a))
    if np.max(np.abs(a - a.T)) > 1e-12 * max(scale, 1.0):
        raise ValueError("matrix is not symmetric")
    n = a.shape[0]
    vec = np.eye(n)
    sweeps = _kernels.jacobi_full(a, vec)
    if sweeps < 0:
        raise ArithmeticError("Jacobi iteration did not converge")
    values = np.diag(a).copy()
    order = np.argsort(values, kind="stable")
    values = values[order]
    vec = vec[:, order]
    for j in range(n):
        k = int(np.argmax(np.abs(vec[:, j])))
        if vec[k, j] < 0.0:
            vec[:, j] = -vec[:, j]
    return EigenDecomposition(values=values, vectors=vec)


def doublet_weights(dec_plus: EigenDecomposition, dec_minus: EigenDecomposition,
                    plus_state: Optional[np.ndarray] = None,
                    minus_state: Optional[np.ndarray] = None
                    ) -> tuple[float, int, float, int]:
    """Best squared overlap of each transfer state with its sector spectrum.

    With the default states (first basis vector of each sector) the
    overlaps are just the squared first rows of the eigenvector matrices.
    Returns (alpha_plus, idx_plus, alpha_minus, idx_minus); the acceptance
    statistic is min(alpha_plus, alpha_minus).
    """
    out = []
    for dec, state in ((dec_plus, plus_state), (dec_minus, minus_state)):
        if state is None:
            overlaps = dec.vectors[0, :]
        else:
            overlaps = np.asarray(state, dtype=float) @ dec.vectors
        weights = overlaps * overlaps
        idx = int(np.argmax(weights))
        out.append((float(weights[idx]), idx))
    return out[0][0], out[0][1], out[1][0], out[1][1]


def is_dominant_doublet(analysis: DoubletAnalysis, alpha: float) -> bool:
    """Acceptance test: both sector weights exceed the threshold."""
    return min(analysis.alpha_plus, analysis.alpha_minus) > alpha


def perturbative_shift(level: float, coupling: np.ndarray,
                       dec_sub: EigenDecomposition, scale: float = 1.0
                       ) -> tuple[float, float]:
    """Second-order shift of the transfer level from its bulk couplings.

    level is the unperturbed transfer energy, coupling its row of matrix
    elements to the bulk, dec_sub the bulk eigensystem.  Returns (s, d)
    where s = sum_i |<coupling|psi_i>|^2 / (level - e_i) and d is the
    distance to the closest bulk level.  scale sets the degeneracy guard:
    any denominator below 1e-12*scale raises DegenerateLevelError.
    """
    rotated = np.asarray(coupling, dtype=float) @ dec_sub.vectors
    denom = level - dec_sub.values
    d = float(np.min(np.abs(denom)))
    if d < DEGENERACY_GUARD * scale:
        raise DegenerateLevelError(
            f"bulk level within {DEGENERACY_GUARD * scale:g} of the transfer level")
    s = float(np.sum(rotated * rotated / denom))
    return s, d


def depletion_degenerate(level: float, coupling: np.ndarray,
                         dec_sub: EigenDecomposition, scale: float = 1.0) -> float:
    """Weight loss of the transfer level, degenerate-safe variant.

    Sums (1/2)(1 - [1 + 4 v_i^2 / (level - e_i)^2]^(-1/2)) over bulk
    levels; for small ratios this reduces to the usual sum of
    v_i^2/(level - e_i)^2.  Same degeneracy guard as perturbative_shift.
    """
    rotated = np.asarray(coupling, dtype=float) @ dec_sub.vectors
    denom = level - dec_sub.values
    if float(np.min(np.abs(denom))) < DEGENERACY_GUARD * scale:
        raise DegenerateLevelError("degenerate denominator in depletion sum")
    ratio = 4.0 * (rotated * rotated) / (denom * denom)
    return float(0.5 * np.sum(1.0 - 1.0 / np.sqrt(1.0 + ratio)))


def splitting_and_times(analysis: DoubletAnalysis, v: float) -> tuple[float, float]:
    """Transfer-time estimate and the shift-renormalized splitting.

    Returns (t0, renormalized) with t0 = pi / |E+ - E-| and
    renormalized = |2V + (s+ - s-)|.  Zero splitting yields t0 = inf.
    """
    if analysis.splitting > 0.0:
        t0 = math.pi / analysis.splitting
    else:
        t0 = math.inf
    renorm = abs(2.0 * v + analysis.delta_s)
    return t0, renorm


def analyze_doublet(h_plus: np.ndarray, h_minus: np.ndarray,
                    scale: float = 1.0) -> DoubletAnalysis:
    """Full doublet workup of one realization's sector pair.

    Diagonalizes both sectors, reads off the dominant-overlap levels and
    their weights, then deflates each sector around the transfer state
    to get the bulk couplings and the second-order shifts.  Degenerate
    denominators don't abort the analysis; they set the shift fields to
    NaN and raise the `degenerate` flag.
    """
    return doublet_from_decompositions(h_plus, h_minus,
                                       eigh(h_plus), eigh(h_minus), scale)


def doublet_from_decompositions(h_plus: np.ndarray, h_minus: np.ndarray,
                                dec_plus: EigenDecomposition,
                                dec_minus: EigenDecomposition,
                                scale: float = 1.0) -> DoubletAnalysis:
    """analyze_doublet for callers that already hold the sector spectra."""
    a_plus, i_plus, a_minus, i_minus = doublet_weights(dec_plus, dec_minus)
    e_plus = float(dec_plus.values[i_plus])
    e_minus = float(dec_minus.values[i_minus])

    degenerate = False
    shifts = []
    dists = []
    norms = []
    for sector, dec in ((h_plus, dec_plus), (h_minus, dec_minus)):
        level = float(sector[0, 0])
        coupling = np.asarray(sector[0, 1:], dtype=float)
        norms.append(float(np.dot(coupling, coupling)))
        sub = np.array(sector[1:, 1:], dtype=float, order="C")
        dec_sub = eigh(sub)
        try:
            s, d = perturbative_shift(level, coupling, dec_sub, scale=scale)
        except DegenerateLevelError:
            degenerate = True
            s = math.nan
            d = float(np.min(np.abs(level - dec_sub.values)))
        shifts.append(s)
        dists.append(d)

    delta_s = shifts[0] - shifts[1]
    return DoubletAnalysis(
        alpha_plus=a_plus, alpha_minus=a_minus,
        idx_plus=i_plus, idx_minus=i_minus,
        e_plus=e_plus, e_minus=e_minus,
        splitting=abs(e_plus - e_minus),
        s_plus=shifts[0], s_minus=shifts[1], delta_s=delta_s,
        coupling_norm_sq_plus=norms[0], coupling_norm_sq_minus=norms[1],
        d_plus=dists[0], d_minus=dists[1],
        degenerate=degenerate)
