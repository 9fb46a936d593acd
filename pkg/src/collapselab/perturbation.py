"""Time-dependent perturbation theory for discrete spectra.

First-order transition amplitudes for a harmonic drive, resonance curves,
exact interaction-picture integration (RK4), the golden-rule rate, and the
two-level thermal ensemble with its stimulated-rate symmetry.

hbar = k_B = 1 throughout.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericFailure, StepSizeError, ValidationError
from .quantum import DensityMatrix, HermitianOperator

__all__ = [
    "DiscreteSpectrum",
    "HarmonicPerturbation",
    "WeakCouplingWarning",
    "first_order_amplitude",
    "resonance_curve",
    "integrate_interaction_picture",
    "fermi_golden_rule_rate",
    "two_level_thermal_density",
    "einstein_balance_check",
]


class WeakCouplingWarning(UserWarning):
    """First-order perturbation theory pushed outside its regime."""


@dataclass(frozen=True)
class DiscreteSpectrum:
    """Sorted eigenenergies of the unperturbed Hamiltonian."""

    energies: np.ndarray

    def __post_init__(self):
        arr = np.array(self.energies, dtype=float).reshape(-1)
        if arr.size < 2:
            raise ValidationError("spectrum needs at least two levels")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("non-finite energy")
        if np.any(np.diff(arr) < 0):
            raise ValidationError("energies must be sorted ascending")
        arr.setflags(write=False)
        object.__setattr__(self, "energies", arr)

    @property
    def dim(self) -> int:
        return self.energies.size

    def frequency(self, i: int, f: int) -> float:
        """Transition angular frequency (E_f - E_i), hbar = 1."""
        return float(self.energies[f] - self.energies[i])


@dataclass(frozen=True)
class HarmonicPerturbation:
    """Drive 2 W cos(omega t) with a time-independent Hermitian W."""

    coupling: HermitianOperator
    omega: float

    def __post_init__(self):
        if self.omega < 0 or not math.isfinite(self.omega):
            raise ValidationError("drive frequency must be nonnegative and finite")


def _check_levels(spectrum: DiscreteSpectrum, *levels: int) -> None:
    for level in levels:
        if not (0 <= level < spectrum.dim):
            raise ValidationError(f"level index {level} out of range for dim {spectrum.dim}")


def _sinc(x: float) -> float:
    return float(np.sinc(x / math.pi))


def _first_order(w_fi: complex, omega_fi: float, omega: float, dt: float,
                 same_level: bool) -> complex:
    # resonant-lobe form: a = delta_if + dt (W_fi / i) e^{i theta} sinc(theta),
    # theta = (|omega| - |omega_fi|) dt / 2. Even in omega by construction.
    theta = (abs(omega) - abs(omega_fi)) * dt / 2.0
    amp = dt * (w_fi / 1j) * complex(math.cos(theta), math.sin(theta)) * _sinc(theta)
    return amp + (1.0 if same_level else 0.0)


def first_order_amplitude(spectrum: DiscreteSpectrum, pert: HarmonicPerturbation,
                          i: int, f: int, dt: float) -> complex:
    """First-order amplitude to land on |f> after driving |i> for time dt.

    At resonance the modulus is exactly dt*|W_fi|; far off resonance it
    decays like 1/|theta|. Warns when the weak-coupling precondition
    |W_fi| << |E_f - E_i| is violated or the result exceeds unit probability.
    """
    _check_levels(spectrum, i, f)
    if spectrum.dim != pert.coupling.dim:
        raise ValidationError("coupling dimension disagrees with the spectrum")
    if dt <= 0:
        raise ValidationError("dt must be positive")
    w_fi = complex(pert.coupling.matrix[f, i])
    omega_fi = spectrum.frequency(i, f)
    if i != f and abs(w_fi) > 0.1 * abs(omega_fi):
        warnings.warn("coupling is not small next to the level spacing",
                      WeakCouplingWarning, stacklevel=2)
    amp = _first_order(w_fi, omega_fi, pert.omega, dt, i == f)
    if i != f and abs(amp) ** 2 > 1.0:
        warnings.warn("first-order probability exceeds 1; result is not trustworthy",
                      WeakCouplingWarning, stacklevel=2)
    return amp


def resonance_curve(spectrum: DiscreteSpectrum, coupling: HermitianOperator,
                    i: int, f: int, dt: float, omega_grid) -> np.ndarray:
    """|a_f|^2 against drive frequency; exactly even in omega, peaked at |omega_fi|.

    Returns an (n, 2) array of (omega, probability).
    """
    _check_levels(spectrum, i, f)
    grid = np.asarray(omega_grid, dtype=float).reshape(-1)
    if grid.size == 0:
        raise ValidationError("empty frequency grid")
    w_fi = complex(coupling.matrix[f, i])
    omega_fi = spectrum.frequency(i, f)
    probs = np.array([abs(_first_order(w_fi, omega_fi, w, dt, i == f)) ** 2
                      for w in grid])
    return np.column_stack([grid, probs])


def integrate_interaction_picture(spectrum: DiscreteSpectrum, pert: HarmonicPerturbation,
                                  initial: int, total_time: float, n_steps: int
                                  ) -> np.ndarray:
    """RK4 integration of the exact interaction-picture amplitude equations.

    da_f/dt = (1/i) sum_n a_n <f|H'(t)|n> e^{i omega_fn t} with the drive
    H'(t) = 2 W cos(omega t) and a_n(0) = delta_{in}. The step must resolve
    the fastest phase: dt <= 1/(50 max(|omega_fn|, omega)).
    """
    _check_levels(spectrum, initial)
    if spectrum.dim != pert.coupling.dim:
        raise ValidationError("coupling dimension disagrees with the spectrum")
    if total_time <= 0 or n_steps < 1:
        raise ValidationError("need positive total_time and at least one step")
    energies = spectrum.energies
    omega_mat = energies[:, None] - energies[None, :]  # omega_fn
    fastest = max(float(np.max(np.abs(omega_mat))), pert.omega)
    dt = total_time / n_steps
    if fastest > 0 and dt > 1.0 / (50.0 * fastest):
        raise StepSizeError(
            f"step {dt} too large; need <= {1.0 / (50.0 * fastest)} to resolve the phases")
    w = pert.coupling.matrix
    omega = pert.omega

    def deriv(t: float, amps: np.ndarray) -> np.ndarray:
        drive = 2.0 * math.cos(omega * t)
        return (drive / 1j) * ((w * np.exp(1j * omega_mat * t)) @ amps)

    amps = np.zeros(spectrum.dim, dtype=complex)
    amps[initial] = 1.0
    t = 0.0
    for _ in range(n_steps):
        k1 = deriv(t, amps)
        k2 = deriv(t + dt / 2, amps + dt / 2 * k1)
        k3 = deriv(t + dt / 2, amps + dt / 2 * k2)
        k4 = deriv(t + dt, amps + dt * k3)
        amps = amps + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        t += dt
    norm_sq = float(np.sum(np.abs(amps) ** 2))
    if abs(norm_sq - 1.0) > 1e-6:
        raise NumericFailure(f"amplitude normalization drifted to {norm_sq}")
    return amps


def fermi_golden_rule_rate(coupling_element: complex, density_of_states: float) -> float:
    """w = 2 pi |W_fi|^2 rho(E), hbar = 1."""
    if density_of_states < 0:
        raise ValidationError("density of states must be nonnegative")
    return 2.0 * math.pi * abs(coupling_element) ** 2 * density_of_states


def two_level_thermal_density(omega1: float, omega2: float, temperature: float
                              ) -> DensityMatrix:
    """Thermal mixture of two levels at angular frequencies omega1 < omega2.

    Populations follow the partition function; p2/p1 = exp(-(w2-w1)/T).
    """
    if temperature <= 0:
        raise ValidationError("temperature must be positive")
    exponents = -np.array([omega1, omega2]) / temperature
    weights = np.exp(exponents - exponents.max())
    weights /= weights.sum()
    return DensityMatrix(np.diag(weights).astype(complex))


def einstein_balance_check(spectrum: DiscreteSpectrum, pert: HarmonicPerturbation,
                           dt: float) -> tuple[float, float]:
    """First-order absorption and stimulated-emission probabilities; equal by
    Hermiticity of W and the omega -> -omega symmetry."""
    if spectrum.dim != 2:
        raise ValidationError("balance check is defined for two levels")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeakCouplingWarning)
        up = abs(first_order_amplitude(spectrum, pert, 0, 1, dt)) ** 2
        down = abs(first_order_amplitude(spectrum, pert, 1, 0, dt)) ** 2
    return up, down
