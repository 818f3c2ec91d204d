"""Monte Carlo spectra of ``diag(a, ..., a, -a, ..., -a) + GUE``.

The Gaussian weight with a linear source reduces, after completing the
square, to a deterministic shift of a GUE matrix normalised so that its
spectrum fills ``[-2, 2]``.
"""
from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .curve import gaussian_curve
from .density import DensityProfile, profile
from .sheets import branch_structure


class EigensolverError(RuntimeError):
    def __init__(self, message: str, sample: int):
        super().__init__(message)
        self.sample = sample


@dataclass(frozen=True)
class McConfig:
    n: int = 400
    samples: int = 100
    seed: int = 0
    bins: int = 80

    def __post_init__(self):
        if self.n <= 0 or self.n % 2:
            raise ValueError(f"n must be a positive even integer, got {self.n}")
        if self.samples <= 0:
            raise ValueError(f"samples must be positive, got {self.samples}")
        if self.bins <= 0:
            raise ValueError(f"bins must be positive, got {self.bins}")

    def to_dict(self) -> dict:
        return {"n": self.n, "samples": self.samples, "seed": self.seed, "bins": self.bins}


@dataclass(frozen=True)
class SpectrumBatch:
    """Eigenvalues of every sample; row ``s`` holds sample ``s`` sorted ascending."""
    eigenvalues: np.ndarray
    config: McConfig
    a: float

    @property
    def flat(self) -> np.ndarray:
        return self.eigenvalues.ravel()

    @property
    def count(self) -> int:
        return int(self.eigenvalues.size)


def thread_count() -> int:
    env = os.environ.get("EXTSOURCE_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def gue(n: int, rng: np.random.Generator) -> np.ndarray:
    """Hermitian ``H`` with diagonal variance ``1/n`` and off-diagonal total variance ``1/n``."""
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (z + z.conj().T) / (2.0 * np.sqrt(n))


def _one_sample(index: int, seq: np.random.SeedSequence, n: int, a: float) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seq))
    h = gue(n, rng)
    h[np.diag_indices(n)] += np.concatenate([np.full(n // 2, a), np.full(n // 2, -a)])
    try:
        vals = np.linalg.eigvalsh(h)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(f"eigensolver failed on sample {index}: {exc}", index) from exc
    return np.sort(vals)


def sample_spectrum_gaussian(cfg: McConfig, a: float, threads: int | None = None) -> SpectrumBatch:
    """Sorted spectra of ``cfg.samples`` independent matrices; deterministic in ``cfg.seed``."""
    if a < 0:
        raise ValueError("a must be non-negative")
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.samples)
    workers = threads or thread_count()
    if workers == 1:
        rows = [_one_sample(i, s, cfg.n, a) for i, s in enumerate(seqs)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda t: _one_sample(t[0], t[1], cfg.n, a), enumerate(seqs)))
    return SpectrumBatch(np.vstack(rows), cfg, float(a))


def gaussian_profile(a: float, x2: float = 0.5, points_per_cut: int = 200) -> DensityProfile:
    curve = gaussian_curve(a, x2)
    return profile(curve, branch_structure(curve), points_per_cut)


def _empirical_cdf(sorted_vals: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.searchsorted(sorted_vals, x, side="right") / sorted_vals.size


def compare_histogram(batch: SpectrumBatch, reference, bins: int | None = None) -> tuple[float, float]:
    """``(cdf_sup_distance, per_bin_max)`` against a density profile or another batch."""
    bins = bins or batch.config.bins
    vals = np.sort(batch.flat)
    if isinstance(reference, SpectrumBatch):
        ref = np.sort(reference.flat)
        pts = np.concatenate([vals, ref])
        # sup is attained at sample points; check both one-sided limits
        d_right = np.abs(_empirical_cdf(vals, pts) - _empirical_cdf(ref, pts))
        d_left = np.abs(np.searchsorted(vals, pts, side="left") / vals.size
                        - np.searchsorted(ref, pts, side="left") / ref.size)
        sup = float(max(d_right.max(), d_left.max()))
        lo, hi = min(vals[0], ref[0]), max(vals[-1], ref[-1])
        edges = np.linspace(lo, hi, bins + 1)
        h_ref = np.histogram(ref, edges)[0] / ref.size
    else:
        cdf = reference.cdf
        upper = np.arange(1, vals.size + 1) / vals.size
        lower = np.arange(vals.size) / vals.size
        model = cdf(vals)
        sup = float(max(np.max(np.abs(upper - model)), np.max(np.abs(lower - model))))
        s = reference.support
        lo, hi = min(vals[0], s[0][0]), max(vals[-1], s[-1][1])
        edges = np.linspace(lo, hi, bins + 1)
        h_ref = np.diff(cdf(edges))
    h_emp = np.histogram(vals, edges)[0] / vals.size
    width = edges[1] - edges[0]
    per_bin = float(np.max(np.abs(h_emp - h_ref)) / width)
    return sup, per_bin


def cluster_edges(batch: SpectrumBatch) -> tuple[float, float, float, float]:
    """Sample-averaged outer and inner extremes of the two halves of each spectrum."""
    ev = batch.eigenvalues
    h = batch.config.n // 2
    return (float(ev[:, 0].mean()), float(ev[:, h - 1].mean()),
            float(ev[:, h].mean()), float(ev[:, -1].mean()))


def reflection_distance(batch: SpectrumBatch) -> float:
    """Two-sample KS distance between the spectrum and its mirror image."""
    vals = np.sort(batch.flat)
    mirror = np.sort(-vals)
    pts = np.concatenate([vals, mirror])
    return float(np.max(np.abs(_empirical_cdf(vals, pts) - _empirical_cdf(mirror, pts))))


def comparison_record(batch: SpectrumBatch, prof: DensityProfile) -> dict:
    sup, per_bin = compare_histogram(batch, prof)
    return {"cdf_sup_distance": sup, "per_bin_max": per_bin, "n": batch.config.n,
            "samples": batch.config.samples, "seed": batch.config.seed, "a": batch.a}


def comparison_json(batch: SpectrumBatch, prof: DensityProfile) -> str:
    return json.dumps(comparison_record(batch, prof))
