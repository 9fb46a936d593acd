"""Photon-on-screen collapse and the double-slit experiment.

A delocalized photon entangled with N screen absorbers reduces through a
sequence of group-wise collapses: each classical group either absorbs it or
is excluded, renormalizing the rest. The outcome distribution is exactly
the single-collapse Born law, independent of the grouping or its order.

Spatial propagation is spectral (split-step Fourier), exact for free flight.
hbar = m = 1 on the grid.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .config import NUMERICS
from .errors import NumericFailure, ValidationError

__all__ = [
    "AbsorptionAmplitudes",
    "ScreenPartition",
    "GridWavefunction",
    "sequential_absorption",
    "direct_born_sample",
    "sample_outcomes",
    "enumerate_outcome_distribution",
    "free_propagate",
    "apply_slits",
    "SlitCollapse",
    "DoubleSlitConfig",
    "DoubleSlitResult",
    "run_double_slit",
    "rebin_counts",
    "fringe_visibility",
    "counts_total_variation",
]


@dataclass(frozen=True)
class AbsorptionAmplitudes:
    """Entangled photon-screen amplitudes c_0..c_N; index 0 is the vacuum
    channel (amplitude 0 when the whole wavefront hits the screen)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        arr = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if arr.size < 2:
            raise ValidationError("need a vacuum channel plus at least one absorber")
        total = np.sum(np.abs(arr) ** 2)
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(f"|c|^2 sums to {total}, not 1 within 1e-9")
        arr.setflags(write=False)
        object.__setattr__(self, "amplitudes", arr)

    @classmethod
    def from_absorbers(cls, absorber_amplitudes, vacuum_amplitude: complex = 0.0
                       ) -> "AbsorptionAmplitudes":
        arr = np.asarray(absorber_amplitudes, dtype=complex).reshape(-1)
        return cls(np.concatenate([[vacuum_amplitude], arr]))

    @property
    def n_absorbers(self) -> int:
        return self.amplitudes.size - 1

    @property
    def escape_probability(self) -> float:
        return float(abs(self.amplitudes[0]) ** 2)


@dataclass(frozen=True)
class ScreenPartition:
    """Ordered disjoint groups of absorber indices covering {1..N}."""

    groups: tuple

    def __post_init__(self):
        groups = tuple(tuple(int(k) for k in grp) for grp in self.groups)
        if not groups or any(len(grp) == 0 for grp in groups):
            raise ValidationError("partition groups must be nonempty")
        flat = [k for grp in groups for k in grp]
        if len(set(flat)) != len(flat):
            raise ValidationError("partition groups must be disjoint")
        object.__setattr__(self, "groups", groups)

    def check_covers(self, n_absorbers: int) -> None:
        flat = sorted(k for grp in self.groups for k in grp)
        if flat != list(range(1, n_absorbers + 1)):
            raise ValidationError("partition must cover absorber indices 1..N exactly")

    @classmethod
    def contiguous(cls, n_absorbers: int, group_size: int) -> "ScreenPartition":
        if group_size < 1:
            raise ValidationError("group size must be positive")
        idx = list(range(1, n_absorbers + 1))
        return cls(tuple(tuple(idx[k:k + group_size]) for k in range(0, n_absorbers, group_size)))


def sequential_absorption(amps: AbsorptionAmplitudes, partition: ScreenPartition,
                          rng: np.random.Generator) -> int:
    """Group-by-group reduction; returns the absorbing index, or 0 if the
    photon escapes through the vacuum channel.

    Each rejection zeroes the group and renormalizes the remainder by
    1/sqrt(q~); the accumulated law is exactly |c_k|^2.
    """
    partition.check_covers(amps.n_absorbers)
    probs = np.abs(amps.amplitudes) ** 2
    remaining = 1.0
    for group in partition.groups:
        members = np.fromiter(group, dtype=int)
        member_probs = probs[members] / remaining
        group_mass = float(member_probs.sum())
        u = rng.random()
        if u < group_mass or 1.0 - group_mass <= 1e-12:
            cum = np.cumsum(member_probs)
            cum[-1] = max(cum[-1], group_mass)
            pick = min(int(np.searchsorted(cum, u, side="right")), members.size - 1)
            return int(members[pick])
        # rejection: exclude the group, renormalize the rest
        remaining -= float(probs[members].sum())
        if remaining <= 1e-15:
            raise NumericFailure("renormalization underflow after a rejection")
    return 0


def direct_born_sample(amps: AbsorptionAmplitudes, rng: np.random.Generator) -> int:
    """Single-collapse reference law: one draw over |c_k|^2 (k = 0..N)."""
    probs = np.abs(amps.amplitudes) ** 2
    cum = np.cumsum(probs)
    cum[-1] = max(cum[-1], 1.0)
    return min(int(np.searchsorted(cum, rng.random(), side="right")), probs.size - 1)


def sample_outcomes(amps: AbsorptionAmplitudes, n: int, rng: np.random.Generator,
                    method: str = "direct",
                    partition: ScreenPartition | None = None) -> np.ndarray:
    """Outcome counts over k = 0..N for n trials."""
    counts = np.zeros(amps.amplitudes.size, dtype=np.int64)
    if method == "direct":
        probs = np.abs(amps.amplitudes) ** 2
        cum = np.cumsum(probs)
        cum[-1] = max(cum[-1], 1.0)
        draws = np.minimum(np.searchsorted(cum, rng.random(n), side="right"),
                           probs.size - 1)
        counts += np.bincount(draws, minlength=counts.size)
    elif method == "sequential":
        if partition is None:
            raise ValidationError("sequential sampling needs a partition")
        for _ in range(n):
            counts[sequential_absorption(amps, partition, rng)] += 1
    else:
        raise ValidationError(f"unknown sampling method {method!r}")
    return counts


def enumerate_outcome_distribution(amps: AbsorptionAmplitudes,
                                   partition: ScreenPartition) -> np.ndarray:
    """Exact outcome distribution of ``sequential_absorption`` by summing every
    rejection path (independent oracle for the sequence-invariance theorem)."""
    partition.check_covers(amps.n_absorbers)
    probs = np.abs(amps.amplitudes) ** 2
    out = np.zeros_like(probs)
    reject_prefix = 1.0   # probability all previous groups rejected
    remaining = 1.0       # survival mass renormalizing the current stage
    for group in partition.groups:
        members = list(group)
        group_mass = float(np.sum(probs[members])) / remaining
        for k in members:
            out[k] += reject_prefix * (probs[k] / remaining)
        reject_prefix *= (1.0 - group_mass)
        remaining -= float(np.sum(probs[members]))
    out[0] = max(reject_prefix, 0.0)
    return out


@dataclass(frozen=True)
class GridWavefunction:
    """Complex amplitudes on a regular 1-D or 2-D grid, discretely normalized."""

    psi: np.ndarray
    dx: float

    def __post_init__(self):
        arr = np.array(self.psi, dtype=complex)
        if arr.ndim not in (1, 2):
            raise ValidationError("grid wavefunction must be 1-D or 2-D")
        if self.dx <= 0:
            raise ValidationError("grid spacing must be positive")
        norm = math.sqrt(float(np.sum(np.abs(arr) ** 2)) * self.dx ** arr.ndim)
        if abs(norm - 1.0) > NUMERICS.grid_norm_tol:
            raise ValidationError(f"grid norm {norm} is not 1 within {NUMERICS.grid_norm_tol}")
        arr.setflags(write=False)
        object.__setattr__(self, "psi", arr)

    @classmethod
    def gaussian_1d(cls, n: int, dx: float, center: float, sigma: float,
                    momentum: float = 0.0) -> "GridWavefunction":
        x = grid_coordinates(n, dx)
        psi = np.exp(-((x - center) ** 2) / (4 * sigma ** 2) + 1j * momentum * x)
        psi /= math.sqrt(float(np.sum(np.abs(psi) ** 2)) * dx)
        return cls(psi, dx)

    def coordinates(self) -> np.ndarray:
        return grid_coordinates(self.psi.shape[-1], self.dx)

    def density(self) -> np.ndarray:
        return np.abs(self.psi) ** 2 * self.dx ** self.psi.ndim

    def position_moments(self) -> tuple[float, float]:
        x = self.coordinates()
        w = np.abs(self.psi) ** 2
        if self.psi.ndim == 2:
            w = w.sum(axis=0)
        w = w / w.sum()
        mean = float(np.dot(w, x))
        var = float(np.dot(w, (x - mean) ** 2))
        return mean, math.sqrt(max(var, 0.0))


def grid_coordinates(n: int, dx: float) -> np.ndarray:
    return (np.arange(n) - n // 2) * dx


def _boundary_guard(wave: GridWavefunction) -> None:
    mean, sigma = wave.position_moments()
    half = wave.psi.shape[-1] // 2 * wave.dx
    if abs(mean) + 4 * sigma > half:
        raise ValidationError(
            "grid too small: the packet is within 4 sigma of the boundary")


def free_propagate(wave: GridWavefunction, mass: float, dt: float,
                   n_steps: int = 1) -> GridWavefunction:
    """Exact spectral free flight e^{-i k^2 t / 2m} over t = dt * n_steps."""
    if mass <= 0:
        raise ValidationError("mass must be positive")
    span = dt * n_steps
    k = 2 * math.pi * np.fft.fftfreq(wave.psi.shape[-1], wave.dx)
    if wave.psi.ndim == 1:
        k_sq = k ** 2
    else:
        ky = 2 * math.pi * np.fft.fftfreq(wave.psi.shape[0], wave.dx)
        k_sq = ky[:, None] ** 2 + k[None, :] ** 2
    spec = np.fft.fftn(wave.psi) * np.exp(-1j * k_sq * span / (2 * mass))
    out = GridWavefunction(np.fft.ifftn(spec), wave.dx)
    _boundary_guard(out)
    return out


class SlitCollapse(NamedTuple):
    state: "GridWavefunction"
    info_change: float


def apply_slits(wave: GridWavefunction, mask: np.ndarray) -> SlitCollapse:
    """Collapse onto the open-cell support: zero the blocked cells, renormalize.

    Irreversible; the recorded info change is -2 ln |<post|pre>| = -ln q with
    q the survival probability.
    """
    mask = np.asarray(mask)
    if mask.shape != wave.psi.shape:
        raise ValidationError("mask shape must match the grid")
    masked = wave.psi * (mask != 0)
    survival = float(np.sum(np.abs(masked) ** 2)) * wave.dx ** wave.psi.ndim
    if survival <= NUMERICS.zero_overlap:
        raise ValidationError("mask blocks the entire wavefunction")
    out = GridWavefunction(masked / math.sqrt(survival), wave.dx)
    return SlitCollapse(out, -math.log(min(survival, 1.0)))


@dataclass(frozen=True)
class DoubleSlitConfig:
    """Transverse-axis double slit: mask at t=0, spectral flight to the screen.

    The carrier momentum sets the flight time t = distance / k0 (hbar = m = 1).
    """

    n_cells: int = 1024
    extent: float = 140.0          # half-width of the transverse domain
    slit_width: float = 2.0
    slit_separation: float = 8.0   # center-to-center
    carrier_momentum: float = 10.0
    screen_distance: float = 100.0
    beam_sigma: float = 20.0

    @property
    def dx(self) -> float:
        return 2 * self.extent / self.n_cells

    @property
    def flight_time(self) -> float:
        return self.screen_distance / self.carrier_momentum

    @property
    def fringe_period(self) -> float:
        return 2 * math.pi * self.flight_time / self.slit_separation

    def issues(self) -> list[str]:
        problems = []
        if self.slit_separation < 8 * self.dx:
            problems.append("slit separation must span at least 8 grid cells")
        if self.fringe_period < 4 * self.dx:
            problems.append("fringes are narrower than 4 grid cells")
        central = 2 * self.extent / 3
        if central / self.fringe_period < 5:
            problems.append("screen develops fewer than 5 fringes in the central region")
        if self.slit_width <= 0 or self.slit_separation <= self.slit_width:
            problems.append("slits must have positive width and not overlap")
        if self.beam_sigma < 8 * self.dx:
            problems.append("incident beam must resolve on the grid (sigma >= 8 dx)")
        return problems

    def validate(self) -> None:
        problems = self.issues()
        if problems:
            raise ValidationError("; ".join(problems))

    def slit_mask(self, slits=("left", "right")) -> np.ndarray:
        x = grid_coordinates(self.n_cells, self.dx)
        mask = np.zeros(self.n_cells, dtype=bool)
        if "left" in slits:
            mask |= np.abs(x + self.slit_separation / 2) <= self.slit_width / 2
        if "right" in slits:
            mask |= np.abs(x - self.slit_separation / 2) <= self.slit_width / 2
        return mask


class DoubleSlitResult(NamedTuple):
    counts: np.ndarray         # impacts per screen cell
    screen_density: np.ndarray  # |psi|^2 cell masses used for sampling
    positions: np.ndarray      # screen cell centers
    side_counts: dict


def _screen_density(config: DoubleSlitConfig, slits) -> np.ndarray:
    beam = GridWavefunction.gaussian_1d(config.n_cells, config.dx, 0.0, config.beam_sigma)
    post = apply_slits(beam, config.slit_mask(slits)).state
    arrived = free_propagate(post, 1.0, config.flight_time)
    return arrived.density()


def run_double_slit(config: DoubleSlitConfig, n_photons: int, which_path: bool,
                    rng: np.random.Generator, slits=("left", "right")
                    ) -> DoubleSlitResult:
    """Accumulate photon impacts on the screen line.

    Coherent mode samples impacts from the two-slit interference density.
    With ``which_path`` each photon first collapses onto one slit (with the
    mask-split probabilities) and then flies incoherently.
    """
    config.validate()
    if n_photons < 1:
        raise ValidationError("need at least one photon")
    x = grid_coordinates(config.n_cells, config.dx)
    side_counts: dict = {}
    if which_path and len(slits) == 2:
        beam = GridWavefunction.gaussian_1d(config.n_cells, config.dx, 0.0, config.beam_sigma)
        masked = apply_slits(beam, config.slit_mask(slits)).state
        left_mass = float(np.sum(masked.density()[x < 0]))
        n_left = int(rng.binomial(n_photons, left_mass))
        densities = {"left": _screen_density(config, ("left",)),
                     "right": _screen_density(config, ("right",))}
        side_counts = {"left": n_left, "right": n_photons - n_left}
        counts = np.zeros(config.n_cells, dtype=np.int64)
        for side in ("left", "right"):
            m = side_counts[side]
            if m:
                cells = rng.choice(config.n_cells, size=m, p=densities[side])
                counts += np.bincount(cells, minlength=config.n_cells)
        density = left_mass * densities["left"] + (1 - left_mass) * densities["right"]
    else:
        density = _screen_density(config, slits)
        cells = rng.choice(config.n_cells, size=n_photons, p=density)
        counts = np.bincount(cells, minlength=config.n_cells)
    return DoubleSlitResult(counts, density, x, side_counts)


def rebin_counts(counts: np.ndarray, n_bins: int) -> np.ndarray:
    counts = np.asarray(counts)
    if counts.size % n_bins != 0:
        raise ValidationError("cell count must be divisible by the target bin count")
    return counts.reshape(n_bins, -1).sum(axis=1)


def fringe_visibility(counts: np.ndarray, positions: np.ndarray,
                      half_width: float, n_bins: int = 64) -> float:
    """(I_max - I_min)/(I_max + I_min) on a rebinned central window."""
    binned = rebin_counts(counts, n_bins).astype(float)
    centers = rebin_counts(positions, n_bins) / (positions.size // n_bins)
    window = binned[np.abs(centers) <= half_width]
    if window.size < 3:
        raise ValidationError("central window too narrow for a visibility estimate")
    peak, trough = float(window.max()), float(window.min())
    if peak + trough == 0:
        return 0.0
    return (peak - trough) / (peak + trough)


def counts_total_variation(a: np.ndarray, b: np.ndarray, n_bins: int = 64) -> float:
    pa = rebin_counts(a, n_bins).astype(float)
    pb = rebin_counts(b, n_bins).astype(float)
    return 0.5 * float(np.abs(pa / pa.sum() - pb / pb.sum()).sum())
