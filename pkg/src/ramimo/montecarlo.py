"""Seeded Monte Carlo engine for the noise-variance and BER experiments.

Determinism contract: every trial's random streams are derived only from
(master_seed, trial_index), trials are scheduled in fixed-size batches, and
per-point results are reduced in trial order, so error and bit counts are
identical for any worker count.  Sweep points get independent sub-seeds,
except the reference-strength sweep, which reuses the same draws at every
strength so the recovery error can be compared pathwise across points.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .channel import (
    NoiseSpec,
    derive_point_seed,
    draw_channel,
    draw_noise,
    draw_reference,
    stream_rng,
)
from .constellation import demap, make_qam, modulate
from .detect import ml_linear, ml_single_shot, zf_linear
from .frontend import observe_prss, observe_single
from .reconstruct import SIN_PHI_TOL, reconstruct_general, reconstruct_optimal

SCHEMES = ("prss", "single_shot", "rf_baseline")
DETECTORS = ("ml", "zf")

PI_HALF = math.pi / 2

# trials per scheduling batch; the stopping rule is evaluated only at batch
# boundaries, which keeps counts independent of the worker count
BATCH_TRIALS = 256


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved settings for one experiment (scalars apply per sweep point).

    snr_db is defined as -10*log10(sigma_v_sq): constellations have unit
    average energy and channel entries have variance 1/N, so received signal
    power per receiver is 1 and every scheme spends the same energy per
    information bit (two unit-energy slots for 4 bits vs one for 2 bits).
    """

    m: int = 8
    n: int = 4
    scheme: str = "prss"
    detector: str = "ml"
    qam_order: int = 0  # 0 = scheme default: 16 for prss, 4 otherwise
    rsr_db: float = 26.0
    phi: float = PI_HALF
    sigma_v_sq: float = 0.1
    snr_db_list: tuple[float, ...] = ()
    phi_list: tuple[float, ...] = ()
    rsr_db_list: tuple[float, ...] = ()
    sigma_v_sq_list: tuple[float, ...] = (0.1, 0.01, 0.001)
    trials: int = 10_000
    target_errors: int = 200
    samples: int = 200_000
    master_seed: int = 20260808
    workers: int = 1

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.detector not in DETECTORS:
            raise ValueError(f"unknown detector {self.detector!r}; expected one of {DETECTORS}")
        if self.scheme == "single_shot" and self.detector != "ml":
            raise ValueError("single_shot only supports the ml detector")
        if self.m < 1 or self.n < 1:
            raise ValueError(f"dimensions must be positive, got m={self.m}, n={self.n}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.target_errors < 0:
            raise ValueError("target_errors must be >= 0 (0 disables early stopping)")
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.sigma_v_sq < 0:
            raise ValueError(f"sigma_v_sq must be >= 0, got {self.sigma_v_sq}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    @property
    def order(self) -> int:
        if self.qam_order:
            return self.qam_order
        return 16 if self.scheme == "prss" else 4


@dataclass(frozen=True)
class TrialResult:
    bit_errors: int
    bits: int


@dataclass(frozen=True)
class BerEstimate:
    """Accumulated error counts with a normal-approximation confidence width."""

    bit_errors: int
    bits_total: int
    ber: float
    half_width_95: float

    @classmethod
    def from_counts(cls, bit_errors: int, bits_total: int) -> "BerEstimate":
        p = bit_errors / bits_total
        hw = 1.96 * math.sqrt(p * (1.0 - p) / bits_total)
        return cls(bit_errors=bit_errors, bits_total=bits_total, ber=p, half_width_95=hw)


@dataclass(frozen=True)
class BerSweepRecord:
    scheme: str
    detector: str
    snr_db: float
    rsr_db: float
    m: int
    n: int
    qam: int
    estimate: BerEstimate
    trials: int
    seed: int


@dataclass(frozen=True)
class PhiSweepRecord:
    phi: float
    sigma_ve_sq: float
    sigma_v_sq: float
    rsr_db: float
    samples: int
    seed: int


@dataclass(frozen=True)
class RsrSweepRecord:
    rsr_db: float
    sigma_v_sq: float
    sigma_ve_sq: float
    samples: int
    seed: int


@lru_cache(maxsize=8)
def _alphabet(order: int):
    return make_qam(order)


def snr_db_to_sigma_v_sq(snr_db: float) -> float:
    return 10.0 ** (-snr_db / 10.0)


def default_phi_grid(step: float = math.pi / 36) -> tuple[float, ...]:
    """Offsets covering (-pi, pi] at the given step, singular points removed."""
    count = round(math.pi / step)
    grid = (np.arange(-count + 1, count + 1) * step).tolist()
    return tuple(p for p in grid if abs(math.sin(p)) >= SIN_PHI_TOL)


def run_trial(cfg: ExperimentConfig, trial_index: int) -> TrialResult:
    """One detection trial: fresh bits, channel, reference, noise; count bit errors."""
    c = _alphabet(cfg.order)
    seed = cfg.master_seed
    bits = stream_rng(seed, trial_index, "bits").integers(0, 2, cfg.n * c.bits_per_symbol)
    x = modulate(bits, c)
    H = draw_channel(cfg.m, cfg.n, stream_rng(seed, trial_index, "channel")).H
    spec = NoiseSpec(cfg.sigma_v_sq)
    v1 = draw_noise(cfg.m, spec, stream_rng(seed, trial_index, "noise1"))

    if cfg.scheme == "rf_baseline":
        s_obs = H @ x + v1  # complex observation, no magnitude readout
        det = ml_linear(s_obs, H, c) if cfg.detector == "ml" else zf_linear(s_obs, H, c)
    elif cfg.scheme == "single_shot":
        r = draw_reference(cfg.m, cfg.n, cfg.rsr_db, stream_rng(seed, trial_index, "reference")).r
        z = observe_single(H, x, r, v1)
        det = ml_single_shot(z, H, r, c)
    else:
        r = draw_reference(cfg.m, cfg.n, cfg.rsr_db, stream_rng(seed, trial_index, "reference")).r
        v2 = draw_noise(cfg.m, spec, stream_rng(seed, trial_index, "noise2"))
        obs = observe_prss(H, x, r, v1, v2, cfg.phi)
        if abs(abs(cfg.phi) - PI_HALF) < 1e-12:
            rec = reconstruct_optimal(obs, r, sign=1 if cfg.phi > 0 else -1)
        else:
            rec = reconstruct_general(obs, r, cfg.phi)
        det = (
            ml_linear(rec.s_hat, H, c)
            if cfg.detector == "ml"
            else zf_linear(rec.s_hat, H, c)
        )

    errors = int(np.count_nonzero(demap(det.x_hat, c) != bits))
    return TrialResult(bit_errors=errors, bits=bits.size)


def run_variance_trial(cfg: ExperimentConfig, trial_index: int) -> tuple[np.ndarray, np.ndarray]:
    """One reconstruction trial: returns (s_hat, s) with s = Hx kept as ground truth."""
    c = _alphabet(cfg.order)
    seed = cfg.master_seed
    bits = stream_rng(seed, trial_index, "bits").integers(0, 2, cfg.n * c.bits_per_symbol)
    x = modulate(bits, c)
    H = draw_channel(cfg.m, cfg.n, stream_rng(seed, trial_index, "channel")).H
    r = draw_reference(cfg.m, cfg.n, cfg.rsr_db, stream_rng(seed, trial_index, "reference")).r
    spec = NoiseSpec(cfg.sigma_v_sq)
    v1 = draw_noise(cfg.m, spec, stream_rng(seed, trial_index, "noise1"))
    v2 = draw_noise(cfg.m, spec, stream_rng(seed, trial_index, "noise2"))
    obs = observe_prss(H, x, r, v1, v2, cfg.phi)
    rec = reconstruct_general(obs, r, cfg.phi)
    return rec.s_hat, H @ x


def _ber_block(cfg: ExperimentConfig, start: int, stop: int) -> tuple[int, int]:
    errors = 0
    bits = 0
    for t in range(start, stop):
        res = run_trial(cfg, t)
        errors += res.bit_errors
        bits += res.bits
    return errors, bits


def _variance_block(cfg: ExperimentConfig, start: int, stop: int) -> np.ndarray:
    out = np.empty(stop - start)
    for i, t in enumerate(range(start, stop)):
        s_hat, s = run_variance_trial(cfg, t)
        out[i] = np.sum(np.abs(s_hat - s) ** 2)
    return out


def _split(start: int, stop: int, parts: int) -> list[tuple[int, int]]:
    step = math.ceil((stop - start) / parts)
    return [(lo, min(lo + step, stop)) for lo in range(start, stop, step)]


def _ber_point(cfg: ExperimentConfig, pool) -> tuple[BerEstimate, int]:
    """Accumulate trials in batches until target_errors or the trial cap is hit."""
    errors = 0
    bits = 0
    done = 0
    while done < cfg.trials:
        batch_stop = min(done + BATCH_TRIALS, cfg.trials)
        if pool is None:
            e, b = _ber_block(cfg, done, batch_stop)
            errors += e
            bits += b
        else:
            futures = [
                pool.submit(_ber_block, cfg, lo, hi)
                for lo, hi in _split(done, batch_stop, cfg.workers)
            ]
            for f in futures:
                e, b = f.result()
                errors += e
                bits += b
        done = batch_stop
        if cfg.target_errors and errors >= cfg.target_errors:
            break
    return BerEstimate.from_counts(errors, bits), done


def _variance_point(cfg: ExperimentConfig, pool) -> tuple[float, int]:
    """Estimate mean ||s_hat - s||^2 per receiver over >= cfg.samples samples."""
    trials = math.ceil(cfg.samples / cfg.m)
    per_trial = np.empty(trials)
    if pool is None:
        per_trial[:] = _variance_block(cfg, 0, trials)
    else:
        futures = {
            pool.submit(_variance_block, cfg, lo, hi): (lo, hi)
            for lo, hi in _split(0, trials, cfg.workers)
        }
        for f, (lo, hi) in futures.items():
            per_trial[lo:hi] = f.result()
    # single ordered reduction keeps the result identical for any worker count
    return float(np.sum(per_trial) / (trials * cfg.m)), trials * cfg.m


def _pool(cfg: ExperimentConfig):
    return ProcessPoolExecutor(max_workers=cfg.workers) if cfg.workers > 1 else None


def run_ber_sweep(cfg: ExperimentConfig) -> list[BerSweepRecord]:
    """BER vs SNR for the configured scheme; one independent sub-seed per point."""
    if not cfg.snr_db_list:
        raise ValueError("snr_db_list must not be empty")
    records = []
    pool = _pool(cfg)
    try:
        for i, snr_db in enumerate(cfg.snr_db_list):
            seed = derive_point_seed(cfg.master_seed, i)
            point = replace(
                cfg, sigma_v_sq=snr_db_to_sigma_v_sq(snr_db), master_seed=seed
            )
            est, trials = _ber_point(point, pool)
            records.append(
                BerSweepRecord(
                    scheme=cfg.scheme,
                    detector=cfg.detector,
                    snr_db=snr_db,
                    rsr_db=cfg.rsr_db,
                    m=cfg.m,
                    n=cfg.n,
                    qam=cfg.order,
                    estimate=est,
                    trials=trials,
                    seed=seed,
                )
            )
    finally:
        if pool is not None:
            pool.shutdown()
    return records


def run_phi_sweep(cfg: ExperimentConfig) -> list[PhiSweepRecord]:
    """Reconstruction error vs phase offset; fresh draws at every offset."""
    grid = cfg.phi_list or default_phi_grid()
    usable = [p for p in grid if abs(math.sin(p)) >= SIN_PHI_TOL]
    if not usable:
        raise ValueError("phi grid contains no usable (non-singular) offsets")
    records = []
    pool = _pool(cfg)
    try:
        for i, phi in enumerate(usable):
            seed = derive_point_seed(cfg.master_seed, i)
            point = replace(cfg, phi=phi, master_seed=seed)
            sigma_ve_sq, samples = _variance_point(point, pool)
            records.append(
                PhiSweepRecord(
                    phi=phi,
                    sigma_ve_sq=sigma_ve_sq,
                    sigma_v_sq=cfg.sigma_v_sq,
                    rsr_db=cfg.rsr_db,
                    samples=samples,
                    seed=seed,
                )
            )
    finally:
        if pool is not None:
            pool.shutdown()
    return records


def run_rsr_sweep(cfg: ExperimentConfig) -> list[RsrSweepRecord]:
    """Reconstruction error vs reference strength at a quarter-turn offset.

    All points reuse the same draws (only the reference magnitude changes),
    so the Taylor-residual decay with reference strength shows up pathwise
    rather than being buried in sampling noise.
    """
    if not cfg.rsr_db_list:
        raise ValueError("rsr_db_list must not be empty")
    if not cfg.sigma_v_sq_list:
        raise ValueError("sigma_v_sq_list must not be empty")
    records = []
    pool = _pool(cfg)
    try:
        for sigma_v_sq in cfg.sigma_v_sq_list:
            for rsr_db in cfg.rsr_db_list:
                point = replace(
                    cfg, rsr_db=rsr_db, sigma_v_sq=sigma_v_sq, phi=PI_HALF
                )
                sigma_ve_sq, samples = _variance_point(point, pool)
                records.append(
                    RsrSweepRecord(
                        rsr_db=rsr_db,
                        sigma_v_sq=sigma_v_sq,
                        sigma_ve_sq=sigma_ve_sq,
                        samples=samples,
                        seed=cfg.master_seed,
                    )
                )
    finally:
        if pool is not None:
            pool.shutdown()
    return records
