"""Monte Carlo driver, experiments, fits, and file emission.

The driver walks the seeded realization stream in blocks: a compiled
screening kernel rejects everything without a dominant doublet, and only
the survivors get the full spectral and dynamical workup in Python.  All
statistics are pure functions of (config, master_seed), so reruns and
different worker counts reproduce output files byte for byte.
"""

from __future__ import annotations

import csv
import json
import math
import time
import warnings
from dataclasses import asdict, dataclass, replace
from typing import Callable, Iterable, Optional, Sequence

import numpy as np
from scipy import optimize

from . import _kernels, dynamics, ensemble, spectral, theory
from .dynamics import TransferRecord
from .ensemble import BLOCK_SIZE, EnsembleConfig
from .theory import CauchyParams

#: Raw draws attempted per requested accepted realization before a run
#: declares partial results.
DEFAULT_BUDGET_FACTOR = 10_000

#: CSV column order; one row per realization.
CSV_COLUMNS = (
    "realization_index", "N", "xi", "alpha_threshold", "E", "V",
    "alpha_plus", "alpha_minus", "E_plus", "E_minus", "splitting",
    "s_plus", "s_minus", "delta_s",
    "coupling_norm_sq_plus", "coupling_norm_sq_minus",
    "P_H_restricted", "P_H_window", "t", "T_R",
    "ratio_dynamical", "ratio_spectral", "p_H", "degeneracy_flag",
)

_RECORD_FIELDS = (
    "realization_index", "n", "xi", "alpha_threshold", "site_energy",
    "direct_coupling", "alpha_plus", "alpha_minus", "e_plus", "e_minus",
    "splitting", "s_plus", "s_minus", "delta_s",
    "coupling_norm_sq_plus", "coupling_norm_sq_minus",
    "p_h_restricted", "p_h_window", "t", "t_rabi",
    "ratio_dynamical", "ratio_spectral", "p_h_avg", "degenerate",
)


@dataclass(frozen=True)
class Histogram:
    """Plain binned counts with a density view."""

    edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        if len(self.counts) != len(self.edges) - 1:
            raise ValueError("counts and edges sizes do not match")
        if np.any(np.diff(self.edges) <= 0):
            raise ValueError("edges must be strictly ascending")
        if np.any(self.counts < 0):
            raise ValueError("counts must be nonnegative")

    @property
    def density(self) -> np.ndarray:
        total = self.counts.sum()
        if total == 0:
            return np.zeros_like(self.edges[:-1])
        widths = np.diff(self.edges)
        return self.counts / (total * widths)

    @classmethod
    def from_samples(cls, samples, bins="fd") -> "Histogram":
        counts, edges = np.histogram(np.asarray(samples, dtype=float), bins=bins)
        return cls(edges=edges, counts=counts)


@dataclass(frozen=True)
class RunSummary:
    """Aggregate view of one ensemble run.

    frac_efficient counts windowed maxima above the doublet efficiency
    bound 2*alpha - 1; frac_fast counts transfers beating the Rabi time;
    theory_lower_bound is the closed-form estimate of the latter.  elapsed
    is wall time and is excluded from serialized output so identical seeds
    emit identical bytes.
    """

    n: int
    xi: float
    alpha: float
    master_seed: int
    window_factor: float
    n_target: int
    mode: str
    fixed_e_plus_v: Optional[float]
    fixed_v_star: Optional[float]
    n_sampled: int
    n_accepted: int
    acceptance_rate: float
    mean_coupling_norm_sq: float
    ks_ratio_spectral: float
    frac_efficient: float
    frac_fast: float
    theory_lower_bound: float
    mean_p_h: float
    elapsed: float


@dataclass(frozen=True)
class FitResult:
    """Coefficients of alpha = 1 - C r - b r^2 with r the reduced coupling."""

    c: float
    b: float
    stderr_c: float
    stderr_b: float


def _nan_min_gap(values: np.ndarray) -> float:
    s = np.sort(values)
    return float(np.min(np.diff(s))) if len(s) > 1 else math.inf


def _analyze_sectors(config: EnsembleConfig, flat: np.ndarray,
                     index: int) -> TransferRecord:
    """Full workup of one mirror-symmetric realization."""
    a, c = ensemble.blocks_from_gaussians(flat, config.n, config.xi)
    v = ensemble.canonicalize_blocks(a, c, config.fixed_v_star,
                                     config.fixed_e_plus_v)
    site_energy = float(a[0, 0])
    h_plus = a + c
    h_minus = a - c
    dec_plus = spectral.eigh(h_plus)
    dec_minus = spectral.eigh(h_minus)
    analysis = spectral.doublet_from_decompositions(
        h_plus, h_minus, dec_plus, dec_minus, scale=config.xi)
    t_rabi = dynamics.rabi_time(v)
    eff = dynamics.sector_transfer_efficiency(dec_plus, dec_minus, t_rabi,
                                              config.window_factor)
    degenerate = analysis.degenerate
    gap = _nan_min_gap(np.concatenate((dec_plus.values, dec_minus.values)))
    if gap < spectral.DEGENERACY_GUARD * config.xi:
        degenerate = True
        times = np.linspace(0.0, 1e3 * t_rabi, 10_000)
        p_h_avg = float(np.mean(dynamics.sector_efficiency(dec_plus, dec_minus,
                                                           times)))
    else:
        wp = dec_plus.vectors[0, :] ** 2
        wm = dec_minus.vectors[0, :] ** 2
        p_h_avg = 0.25 * float(np.sum(wp * wp) + np.sum(wm * wm))
    ratio_dyn = t_rabi / eff.t if eff.t > 0 else math.inf
    return TransferRecord(
        realization_index=index, n=config.n, xi=config.xi,
        alpha_threshold=config.alpha,
        site_energy=site_energy, direct_coupling=v,
        alpha_plus=analysis.alpha_plus, alpha_minus=analysis.alpha_minus,
        e_plus=analysis.e_plus, e_minus=analysis.e_minus,
        splitting=analysis.splitting,
        s_plus=analysis.s_plus, s_minus=analysis.s_minus,
        delta_s=analysis.delta_s,
        coupling_norm_sq_plus=analysis.coupling_norm_sq_plus,
        coupling_norm_sq_minus=analysis.coupling_norm_sq_minus,
        p_h_restricted=eff.p_h_restricted, p_h_window=eff.p_h,
        t=eff.t, t_rabi=t_rabi,
        ratio_dynamical=ratio_dyn,
        ratio_spectral=analysis.splitting / (2.0 * v),
        p_h_avg=p_h_avg, degenerate=degenerate, accepted=True)


def _analyze_plain(config: EnsembleConfig, flat: np.ndarray,
                   index: int) -> TransferRecord:
    """Workup of an unconstrained GOE realization; sector fields are NaN."""
    h = ensemble.plain_from_gaussians(flat, config.n, config.xi,
                                      config.fixed_v_star,
                                      config.fixed_e_plus_v)
    n = config.n
    dec = spectral.eigh(h)
    plus, minus = ensemble.plus_minus_states(n)
    w_plus = (plus @ dec.vectors) ** 2
    w_minus = (minus @ dec.vectors) ** 2
    i_plus = int(np.argmax(w_plus))
    i_minus = int(np.argmax(w_minus))
    e_plus = float(dec.values[i_plus])
    e_minus = float(dec.values[i_minus])
    v = float(h[0, n - 1])
    t_rabi = dynamics.rabi_time(v)
    eff = dynamics.transfer_efficiency(dec, 0, n - 1, t_rabi,
                                       config.window_factor)
    degenerate = False
    if _nan_min_gap(dec.values) < spectral.DEGENERACY_GUARD * config.xi:
        degenerate = True
        p_h_avg = dynamics.time_avg_output_degenerate(dec, 0, n - 1, t_rabi)
    else:
        p_h_avg = dynamics.time_avg_output(dec, 0, n - 1)
    splitting = abs(e_plus - e_minus)
    ratio_dyn = t_rabi / eff.t if eff.t > 0 else math.inf
    return TransferRecord(
        realization_index=index, n=n, xi=config.xi,
        alpha_threshold=config.alpha,
        site_energy=float(h[0, 0]), direct_coupling=v,
        alpha_plus=float(w_plus[i_plus]), alpha_minus=float(w_minus[i_minus]),
        e_plus=e_plus, e_minus=e_minus, splitting=splitting,
        s_plus=math.nan, s_minus=math.nan, delta_s=math.nan,
        coupling_norm_sq_plus=math.nan, coupling_norm_sq_minus=math.nan,
        p_h_restricted=eff.p_h_restricted, p_h_window=eff.p_h,
        t=eff.t, t_rabi=t_rabi,
        ratio_dynamical=ratio_dyn,
        ratio_spectral=splitting / (2.0 * v),
        p_h_avg=p_h_avg, degenerate=degenerate, accepted=True)


def _run_screened(config: EnsembleConfig, budget: int) -> tuple[list, int]:
    """Dominant-doublet mode: kernel screen per block, analyze survivors."""
    half = config.n // 2
    m = ensemble.gauss_count(config.n)
    sig_off, sig_diag = ensemble.sigma_pair(config.n, config.xi)
    has_v = config.fixed_v_star is not None
    has_e = config.fixed_e_plus_v is not None
    y = np.empty(BLOCK_SIZE)
    v_out = np.empty(BLOCK_SIZE)
    e_out = np.empty(BLOCK_SIZE)
    records: list[TransferRecord] = []
    max_blocks = max(1, math.ceil(budget / BLOCK_SIZE))
    n_sampled = 0
    for b in range(max_blocks):
        gauss = ensemble.block_gaussians(config.master_seed, b, m)
        _kernels.screen_block(
            gauss, half, sig_off, sig_diag, config.alpha,
            has_v, config.fixed_v_star if has_v else 0.0,
            has_e, config.fixed_e_plus_v if has_e else 0.0,
            y, v_out, e_out)
        n_sampled += BLOCK_SIZE
        for off in np.flatnonzero(y > config.alpha):
            records.append(_analyze_sectors(config, gauss[int(off)],
                                            b * BLOCK_SIZE + int(off)))
        if len(records) >= config.n_target:
            break
    return records, n_sampled


def _run_unscreened(config: EnsembleConfig, analyze: Callable) -> tuple[list, int]:
    """Accept-everything modes: first n_target stream entries."""
    m = (ensemble.gauss_count(config.n) if analyze is _analyze_sectors
         else ensemble.gauss_count_plain(config.n))
    records: list[TransferRecord] = []
    block = -1
    gauss = None
    for index in range(config.n_target):
        b, off = divmod(index, BLOCK_SIZE)
        if b != block:
            rows = min(BLOCK_SIZE, config.n_target - b * BLOCK_SIZE)
            gauss = ensemble.block_gaussians(config.master_seed, b, m,
                                             n_rows=rows)
            block = b
        records.append(analyze(config, gauss[off], index))
    return records, config.n_target


def summary_from_records(config: EnsembleConfig, records: Sequence[TransferRecord],
                         n_sampled: int, elapsed: float = 0.0) -> RunSummary:
    """Recompute every aggregate from the per-realization records."""
    n_acc = len(records)
    bound = theory.efficiency_lower_bound(config.alpha)
    if n_acc:
        cns = np.array([0.5 * (r.coupling_norm_sq_plus + r.coupling_norm_sq_minus)
                        for r in records])
        mean_cns = float(np.mean(cns))
        frac_eff = float(np.mean([r.p_h_window > bound for r in records]))
        frac_fast = float(np.mean([r.ratio_dynamical > 1.0 for r in records]))
        mean_p_h = float(np.mean([r.p_h_avg for r in records]))
    else:
        mean_cns = math.nan
        frac_eff = math.nan
        frac_fast = math.nan
        mean_p_h = math.nan
    ks = math.nan
    lower = math.nan
    if n_acc and math.isfinite(mean_cns) and mean_cns > 0:
        ratios = [r.ratio_spectral for r in records]
        ks = ks_statistic(ratios, lambda x: theory.transfer_time_cdf(
            x, config.n, config.xi, mean_cns))
        lower = theory.prob_faster_than_rabi(config.n, config.xi, mean_cns)
    return RunSummary(
        n=config.n, xi=config.xi, alpha=config.alpha,
        master_seed=config.master_seed, window_factor=config.window_factor,
        n_target=config.n_target, mode=config.mode,
        fixed_e_plus_v=config.fixed_e_plus_v, fixed_v_star=config.fixed_v_star,
        n_sampled=n_sampled, n_accepted=n_acc,
        acceptance_rate=n_acc / n_sampled if n_sampled else math.nan,
        mean_coupling_norm_sq=mean_cns, ks_ratio_spectral=ks,
        frac_efficient=frac_eff, frac_fast=frac_fast,
        theory_lower_bound=lower, mean_p_h=mean_p_h, elapsed=elapsed)


def run_ensemble(config: EnsembleConfig, budget: Optional[int] = None,
                 n_workers: int = 1) -> tuple[list[TransferRecord], RunSummary]:
    """Sample the configured ensemble until n_target realizations are kept.

    In dominant_doublet mode the stream is screened block by block and only
    doublet realizations are analyzed and returned; the other modes keep
    every realization.  budget caps the raw draws (default 10^4 per
    requested realization, rounded up to whole blocks); when it is
    exhausted the run returns what it has and emits a warning.

    n_workers sets the compiled kernel's thread count.  Results do not
    depend on it; every realization is a pure function of
    (master_seed, realization_index).
    """
    if n_workers < 1:
        raise ValueError("n_workers must be >= 1")
    _set_worker_threads(n_workers)
    start = time.perf_counter()
    if config.mode == "dominant_doublet":
        if budget is None:
            budget = DEFAULT_BUDGET_FACTOR * config.n_target
        records, n_sampled = _run_screened(config, budget)
        if len(records) < config.n_target:
            warnings.warn(
                f"accepted only {len(records)}/{config.n_target} realizations "
                f"after {n_sampled} draws; returning partial results",
                RuntimeWarning, stacklevel=2)
    elif config.mode == "centrosymmetric":
        records, n_sampled = _run_unscreened(config, _analyze_sectors)
    else:
        records, n_sampled = _run_unscreened(config, _analyze_plain)
    elapsed = time.perf_counter() - start
    return records, summary_from_records(config, records, n_sampled, elapsed)


def _set_worker_threads(n_workers: int) -> None:
    if n_workers == 1:
        return
    import numba

    limit = numba.config.NUMBA_NUM_THREADS
    numba.set_num_threads(max(1, min(n_workers, limit)))


def ks_statistic(samples, cdf: Callable) -> float:
    """Kolmogorov-Smirnov sup distance of samples against a model CDF."""
    x = np.sort(np.asarray(samples, dtype=float))
    if x.size == 0:
        raise ValueError("need at least one sample")
    f = np.asarray(cdf(x), dtype=float)
    steps = np.arange(1, x.size + 1) / x.size
    return float(max(np.max(steps - f), np.max(f - (steps - 1.0 / x.size))))


def fit_alpha_vs_coupling(points: Iterable[tuple[float, float]]) -> FitResult:
    """Least-squares fit of the threshold-coupling relation.

    points are (r, alpha) pairs with r the reduced mean coupling; the model
    is alpha = 1 - C r - b r^2 (no constant term).  Standard errors come
    from the residual variance and the normal-equations inverse.
    """
    pts = [(float(r), float(a)) for r, a in points]
    if len({r for r, _ in pts}) < 3:
        raise ValueError("need at least 3 distinct coupling values")
    r = np.array([p[0] for p in pts])
    y = 1.0 - np.array([p[1] for p in pts])
    x = np.column_stack((r, r * r))
    gram = x.T @ x
    try:
        gram_inv = np.linalg.inv(gram)
    except np.linalg.LinAlgError as exc:
        raise ValueError("singular fit: coupling values do not span the model") from exc
    beta = gram_inv @ (x.T @ y)
    resid = y - x @ beta
    dof = max(len(pts) - 2, 1)
    sigma_sq = float(resid @ resid) / dof
    errs = np.sqrt(np.maximum(np.diag(gram_inv) * sigma_sq, 0.0))
    return FitResult(c=float(beta[0]), b=float(beta[1]),
                     stderr_c=float(errs[0]), stderr_b=float(errs[1]))


def alpha_coupling_scan(records: Sequence[TransferRecord], alphas: Sequence[float],
                        xi: float) -> list[tuple[float, float]]:
    """Reduced mean coupling per threshold, from one base run's records.

    For each alpha in the scan, averages the sector coupling norms over the
    records whose doublet weight clears that threshold.  Thresholds below
    the records' own sampling threshold would be biased (realizations
    between the two cuts were already discarded) and are skipped, as are
    thresholds left with no records.
    """
    points = []
    eff = np.array([r.alpha_eff for r in records])
    cns = np.array([0.5 * (r.coupling_norm_sq_plus + r.coupling_norm_sq_minus)
                    for r in records])
    base = max((r.alpha_threshold for r in records), default=0.0)
    for alpha in alphas:
        if alpha < base - 1e-12:
            warnings.warn(
                f"alpha={alpha} is below the sampling threshold {base}; "
                "point skipped", RuntimeWarning, stacklevel=2)
            continue
        mask = eff > alpha
        if not np.any(mask):
            warnings.warn(f"no realizations above alpha={alpha}; point skipped",
                          RuntimeWarning, stacklevel=2)
            continue
        points.append((float(np.mean(cns[mask])) / (xi * xi), float(alpha)))
    return points


def fit_folded_cauchy(samples, width0: Optional[float] = None,
                      center0: Optional[float] = None
                      ) -> tuple[CauchyParams, float]:
    """Maximum-likelihood lobe fit of the folded inverse-time distribution.

    Fits width and center of a symmetric Cauchy pair folded onto x >= 0 and
    returns (params, stderr_width), the standard error taken from the
    Cauchy Fisher information 2 s^2 / n.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 5:
        raise ValueError("need at least 5 samples for a scale fit")
    if center0 is None:
        center0 = float(np.median(x))
    if width0 is None:
        q75, q25 = np.percentile(x, [75, 25])
        width0 = max(float(q75 - q25) / 2.0, 1e-6)

    def neg_loglike(params):
        log_w, center = params
        w = math.exp(log_w)
        lobe = w / ((x - center) ** 2 + w * w)
        mirror = w / ((x + center) ** 2 + w * w)
        return -float(np.sum(np.log((lobe + mirror) / math.pi)))

    res = optimize.minimize(neg_loglike, x0=[math.log(width0), center0],
                            method="Nelder-Mead",
                            options={"xatol": 1e-10, "fatol": 1e-12,
                                     "maxiter": 2000})
    width = math.exp(res.x[0])
    center = float(res.x[1])
    stderr = width * math.sqrt(2.0 / x.size)
    return CauchyParams(location=center, scale=width), stderr


@dataclass(frozen=True)
class DosCuspResult:
    """Bulk-spectrum histogram around a pinned transfer level."""

    histogram: Histogram
    target: float
    density_at_target: float
    reference_density: float
    cusp_width: float
    n_accepted: int
    n_sampled: int


def dos_cusp_experiment(config: EnsembleConfig, budget: Optional[int] = None
                        ) -> DosCuspResult:
    """Histogram the even-sector bulk levels around the pinned level E+V.

    Runs the configured ensemble (dominant_doublet shows the cusp, the
    centrosymmetric control does not), collects the bulk eigenvalues of the
    even sector, and reports the density in the bin containing the pinned
    level next to the semicircle reference, plus the gap between the two
    density maxima flanking it.
    """
    if config.fixed_e_plus_v is None:
        raise ValueError("dos_cusp_experiment needs fixed_e_plus_v set")
    target = config.fixed_e_plus_v
    half = config.n // 2
    m = ensemble.gauss_count(config.n)
    sig_off, sig_diag = ensemble.sigma_pair(config.n, config.xi)
    has_v = config.fixed_v_star is not None
    screened = config.mode == "dominant_doublet"
    if budget is None:
        budget = DEFAULT_BUDGET_FACTOR * config.n_target
    y = np.empty(BLOCK_SIZE)
    v_out = np.empty(BLOCK_SIZE)
    e_out = np.empty(BLOCK_SIZE)
    values = []
    n_accepted = 0
    n_sampled = 0
    max_blocks = max(1, math.ceil(budget / BLOCK_SIZE))
    for b in range(max_blocks):
        gauss = ensemble.block_gaussians(config.master_seed, b, m)
        if screened:
            _kernels.screen_block(
                gauss, half, sig_off, sig_diag, config.alpha,
                has_v, config.fixed_v_star if has_v else 0.0,
                True, target, y, v_out, e_out)
            n_sampled += BLOCK_SIZE
            hits = np.flatnonzero(y > config.alpha)
        else:
            rows = min(BLOCK_SIZE, config.n_target - n_accepted)
            n_sampled += rows
            hits = np.arange(rows)
        for off in hits:
            a, c = ensemble.blocks_from_gaussians(gauss[int(off)], config.n,
                                                  config.xi)
            ensemble.canonicalize_blocks(a, c, config.fixed_v_star, target)
            h_plus = a + c
            _, _, sub = ensemble.deflate_sector(h_plus)
            values.append(spectral.eigh(sub).values)
            n_accepted += 1
            if n_accepted >= config.n_target:
                break
        if n_accepted >= config.n_target:
            break
    if n_accepted < config.n_target:
        warnings.warn(
            f"cusp run accepted {n_accepted}/{config.n_target} after "
            f"{n_sampled} draws", RuntimeWarning, stacklevel=2)
    pooled = np.concatenate(values) if values else np.array([])
    hist = Histogram.from_samples(pooled)
    dens = hist.density
    centers = 0.5 * (hist.edges[:-1] + hist.edges[1:])
    k = int(np.searchsorted(hist.edges, target, side="right") - 1)
    k = min(max(k, 0), len(dens) - 1)
    at_target = float(dens[k])
    left = dens[:k]
    right = dens[k + 1:]
    if len(left) and len(right):
        width = float(centers[k + 1 + int(np.argmax(right))]
                      - centers[int(np.argmax(left))])
    else:
        width = math.nan
    reference = theory.semicircle_pdf(target,
                                      theory.sector_bulk_radius(config.n,
                                                                config.xi))
    return DosCuspResult(histogram=hist, target=target,
                         density_at_target=at_target,
                         reference_density=float(reference),
                         cusp_width=width, n_accepted=n_accepted,
                         n_sampled=n_sampled)


@dataclass(frozen=True)
class ScalingCell:
    n: int
    mode: str
    n_accepted: int
    fraction_efficient: float
    stderr: float
    theory_lower_bound: float


def scaling_experiment(template: EnsembleConfig, n_values: Sequence[int],
                       modes: Sequence[str],
                       budget: Optional[int] = None) -> list[ScalingCell]:
    """Fraction of efficient realizations per (N, mode) cell.

    Efficiency means the windowed maximum exceeds 2*alpha - 1.  Each cell
    reruns the template at the requested size and mode; the binomial
    standard error and the closed-form lower-bound estimate ride along.
    """
    cells = []
    for n in n_values:
        for mode in modes:
            config = replace(template, n=n, mode=mode)
            records, summary = run_ensemble(config, budget=budget)
            cells.append(cell_from_records(config, records))
    return cells


def cell_from_records(config: EnsembleConfig,
                      records: Sequence[TransferRecord]) -> ScalingCell:
    """Aggregate one (N, mode) cell from already-computed records."""
    bound = theory.efficiency_lower_bound(config.alpha)
    count = len(records)
    frac = (float(np.mean([r.p_h_window > bound for r in records]))
            if count else math.nan)
    stderr = math.sqrt(frac * (1.0 - frac) / count) if count else math.nan
    cns = theory.coupling_from_alpha(config.alpha, config.xi)
    return ScalingCell(n=config.n, mode=config.mode, n_accepted=count,
                       fraction_efficient=frac, stderr=stderr,
                       theory_lower_bound=theory.prob_faster_than_rabi(
                           config.n, config.xi, cns))


def _format_value(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def emit(records: Sequence[TransferRecord], summary: RunSummary,
         csv_path, json_path) -> None:
    """Write records as CSV and the summary as JSON, byte-stably.

    Floats are rendered with 17 significant digits; wall-clock time is left
    out of the JSON so identical seeds produce identical files.
    """
    try:
        with open(csv_path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for rec in records:
                writer.writerow([_format_value(getattr(rec, name))
                                 for name in _RECORD_FIELDS])
    except OSError as exc:
        raise OSError(f"could not write records to {csv_path}: {exc}") from exc
    payload = asdict(summary)
    del payload["elapsed"]
    try:
        with open(json_path, "w") as fh:
            json.dump(payload, fh, indent=2, allow_nan=True)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"could not write summary to {json_path}: {exc}") from exc


def read_records(csv_path) -> list[TransferRecord]:
    """Parse an emitted CSV back into records (accepted flags implied)."""
    records = []
    with open(csv_path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != list(CSV_COLUMNS):
            raise ValueError(f"unexpected columns in {csv_path}")
        for row in reader:
            kwargs = {}
            for name, column in zip(_RECORD_FIELDS, CSV_COLUMNS):
                raw = row[column]
                if name in ("realization_index", "n"):
                    kwargs[name] = int(raw)
                elif name == "degenerate":
                    kwargs[name] = bool(int(raw))
                else:
                    kwargs[name] = float(raw)
            records.append(TransferRecord(accepted=True, **kwargs))
    return records
