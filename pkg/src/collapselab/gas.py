"""Pairwise random energy exchange in an N-particle gas.

Each step picks two distinct particles uniformly and splits their summed
energy by a uniform fraction: E'_i = r (E_i + E_j). Total energy is
conserved bit-exactly per pair; iterating drives any initial distribution
to the exponential (Boltzmann) density with the conserved mean.

Energies carry meV labels in outputs; the dynamics is unit-agnostic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

__all__ = [
    "EnergyEnsemble",
    "EnergyHistogram",
    "init_uniform",
    "redistribution_step",
    "run_exchange",
    "run_to_equilibrium",
    "boltzmann_pdf",
    "exponential_bin_probabilities",
    "histogram_probabilities",
    "kl_divergence_to_exponential",
    "shannon_entropy_of_histogram",
    "total_variation",
    "conservation_drift",
]

_CHUNK = 1_000_000  # RNG draws are consumed in fixed chunks for reproducibility


class EnergyEnsemble:
    """Mutable array of nonnegative particle energies with its conserved total."""

    def __init__(self, energies):
        arr = np.array(energies, dtype=float).reshape(-1)
        if arr.size < 2:
            raise ValidationError("ensemble needs at least two particles")
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ValidationError("energies must be finite and nonnegative")
        self.energies = arr
        self.total = math.fsum(arr.tolist())

    @property
    def n(self) -> int:
        return self.energies.size

    @property
    def mean(self) -> float:
        return self.total / self.n


@dataclass(frozen=True)
class EnergyHistogram:
    """Fixed-width energy counts; the last bin absorbs the open tail."""

    bin_width: float
    counts: np.ndarray
    n_total: int

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        if self.bin_width <= 0:
            raise ValidationError("bin width must be positive")
        if counts.sum() != self.n_total:
            raise ValidationError("histogram counts must sum to n_total")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @property
    def n_bins(self) -> int:
        return self.counts.size

    def centers(self) -> np.ndarray:
        return (np.arange(self.n_bins) + 0.5) * self.bin_width

    def density(self) -> np.ndarray:
        return self.counts / (self.n_total * self.bin_width)


def init_uniform(n: int, e0: float, rng: np.random.Generator) -> EnergyEnsemble:
    """Energies r*E0 with r uniform on [0, 1): a step density of mean E0/2."""
    if n < 2:
        raise ValidationError("need at least two particles")
    if not (e0 > 0 and math.isfinite(e0)):
        raise ValidationError("E0 must be positive and finite")
    return EnergyEnsemble(rng.random(n) * e0)


def _exchange(energies: list, i: int, j: int, r: float) -> None:
    a, b = energies[i], energies[j]
    pair_sum = a + b
    first = r * pair_sum
    second = pair_sum - first
    first = pair_sum - second  # redistribute rounding dust: first + second == pair_sum
    energies[i] = first
    energies[j] = second


def redistribution_step(ens: EnergyEnsemble, rng: np.random.Generator) -> EnergyEnsemble:
    """One exchange: uniform i, uniform j != i, uniform split of their sum.

    Mutates the ensemble in place and returns it; the pair sum is conserved
    bit-exactly.
    """
    i = int(rng.integers(0, ens.n))
    j = int(rng.integers(0, ens.n - 1))
    if j >= i:
        j += 1
    lst = ens.energies.tolist()
    _exchange(lst, i, j, float(rng.random()))
    ens.energies = np.array(lst)
    return ens


def run_exchange(ens: EnergyEnsemble, n_steps: int, rng: np.random.Generator
                 ) -> EnergyEnsemble:
    """Run many exchange steps with chunked RNG draws (hot loop)."""
    n = ens.n
    energies = ens.energies.tolist()
    remaining = n_steps
    while remaining > 0:
        m = min(_CHUNK, remaining)
        ii = rng.integers(0, n, size=m)
        jj = rng.integers(0, n - 1, size=m)
        jj = jj + (jj >= ii)
        rr = rng.random(m)
        for i, j, r in zip(ii.tolist(), jj.tolist(), rr.tolist()):
            a, b = energies[i], energies[j]
            pair_sum = a + b
            first = r * pair_sum
            second = pair_sum - first
            first = pair_sum - second
            energies[i] = first
            energies[j] = second
        remaining -= m
    ens.energies = np.array(energies)
    return ens


def make_histogram(ens: EnergyEnsemble, bin_width: float, n_bins: int) -> EnergyHistogram:
    edges = np.arange(n_bins) * bin_width
    idx = np.minimum(np.searchsorted(edges, ens.energies, side="right") - 1, n_bins - 1)
    counts = np.bincount(idx, minlength=n_bins)
    return EnergyHistogram(bin_width, counts, ens.n)


def run_to_equilibrium(ens: EnergyEnsemble, n_iterations: int, sample_every: int,
                       rng: np.random.Generator, bin_width: float | None = None,
                       n_bins: int = 200) -> list[EnergyHistogram]:
    """Sample the energy histogram every ``sample_every`` exchange steps.

    The binning grid is fixed up front (default width: 2*mean/50, i.e. E0/50
    for the uniform start) so successive histograms are comparable.
    """
    if sample_every < 1 or n_iterations < 0:
        raise ValidationError("need sample_every >= 1 and n_iterations >= 0")
    if bin_width is None:
        bin_width = 2.0 * ens.mean / 50.0
    hists = [make_histogram(ens, bin_width, n_bins)]
    done = 0
    while done < n_iterations:
        step = min(sample_every, n_iterations - done)
        run_exchange(ens, step, rng)
        done += step
        hists.append(make_histogram(ens, bin_width, n_bins))
    return hists


def boltzmann_pdf(eps: float, mean: float) -> float:
    """Equilibrium density (1/mean) exp(-eps/mean) on [0, inf)."""
    if mean <= 0:
        raise ValidationError("mean energy must be positive")
    if eps < 0:
        raise ValidationError("energy must be nonnegative")
    return math.exp(-eps / mean) / mean


def exponential_bin_probabilities(bin_width: float, n_bins: int, mean: float) -> np.ndarray:
    """Exact exponential mass per histogram bin; last bin takes the tail."""
    edges = np.arange(n_bins + 1) * bin_width
    cdf = 1.0 - np.exp(-edges / mean)
    probs = np.diff(cdf)
    probs[-1] += math.exp(-edges[-1] / mean)
    return probs


def histogram_probabilities(hist: EnergyHistogram) -> np.ndarray:
    return hist.counts / hist.n_total


def kl_divergence_to_exponential(hist: EnergyHistogram, mean: float) -> float:
    """KL(empirical bins || exponential bins) in nats."""
    p = histogram_probabilities(hist)
    q = exponential_bin_probabilities(hist.bin_width, hist.n_bins, mean)
    mask = p > 0
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def shannon_entropy_of_histogram(hist: EnergyHistogram) -> float:
    """-sum p ln p over occupied bins (per-particle, nats)."""
    if hist.n_total < 1:
        raise ValidationError("empty histogram")
    p = histogram_probabilities(hist)
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def total_variation(a: EnergyHistogram, b: EnergyHistogram) -> float:
    if a.n_bins != b.n_bins or a.bin_width != b.bin_width:
        raise ValidationError("histograms are not on the same grid")
    return 0.5 * float(np.abs(histogram_probabilities(a) - histogram_probabilities(b)).sum())


def conservation_drift(ens: EnergyEnsemble) -> float:
    """Relative drift of the compensated energy sum from the recorded total."""
    return abs(math.fsum(ens.energies.tolist()) - ens.total) / ens.total
