"""Stochastic timing and orchestration of collapse events.

Poisson clocks with exponential waiting times, GRW rate scaling, the
Penrose collapse time, a CSL-style stochastic integrator, and the
alternating unitary/collapse trajectory loop.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import StepSizeError, ValidationError
from .quantum import (
    HermitianOperator,
    StateVector,
    collapse,
    collapse_info_measure,
)

__all__ = [
    "PoissonClock",
    "CollapseEvent",
    "AlternatingTrajectory",
    "poisson_pmf",
    "sample_waiting_time",
    "grw_rate",
    "penrose_time",
    "csl_step",
    "csl_ensemble",
    "run_alternating",
    "run_alternating_batch",
    "trajectory_to_rows",
    "write_trajectory_csv",
]


@dataclass(frozen=True)
class PoissonClock:
    """Homogeneous Poisson event source; ``rate`` is 1/time, mean gap 1/rate."""

    rate: float

    def __post_init__(self):
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise ValidationError(f"clock rate must be positive and finite, got {self.rate}")


@dataclass(frozen=True)
class CollapseEvent:
    """One reduction event inside a trajectory."""

    time: float
    pre_state: StateVector
    post_state: StateVector
    chosen_index: int
    info_change: float


@dataclass
class AlternatingTrajectory:
    """Sampled states of one alternating unitary/collapse run."""

    samples: list[tuple[float, StateVector]] = field(default_factory=list)
    events: list[CollapseEvent] = field(default_factory=list)


def poisson_pmf(k: int, lam: float) -> float:
    """P(k, lam) = exp(-lam) lam^k / k!."""
    if k < 0 or int(k) != k:
        raise ValidationError("count k must be a nonnegative integer")
    if lam < 0:
        raise ValidationError("lambda must be nonnegative")
    if lam == 0.0:
        return 1.0 if k == 0 else 0.0
    return math.exp(k * math.log(lam) - lam - math.lgamma(k + 1))


def sample_waiting_time(clock: PoissonClock, rng: np.random.Generator) -> float:
    return float(rng.exponential(1.0 / clock.rate))


def grw_rate(n_particles: int, lambda_micro: float) -> float:
    """Additive spontaneous-collapse rate: n constituents -> n * lambda_micro."""
    if n_particles < 1:
        raise ValidationError("need at least one constituent")
    if not (lambda_micro > 0 and math.isfinite(lambda_micro)):
        raise ValidationError("per-particle rate must be positive and finite")
    return n_particles * lambda_micro


def penrose_time(energy_gap: float) -> float:
    """Gravitational self-energy collapse lifetime 1/E (hbar = 1)."""
    if not (energy_gap > 0):
        raise ValidationError("energy gap must be positive")
    return 1.0 / energy_gap


def _csl_checks(hamiltonian: HermitianOperator, localizer: HermitianOperator,
                rate: float, dt: float) -> None:
    if rate < 0 or not math.isfinite(rate):
        raise ValidationError("rate must be nonnegative and finite")
    if dt <= 0:
        raise ValidationError("dt must be positive")
    if rate * dt >= 0.1:
        raise StepSizeError(f"rate*dt = {rate * dt} must stay below 0.1")
    if hamiltonian.dim != localizer.dim:
        raise ValidationError("operator dimensions disagree")


def csl_step(psi: StateVector, hamiltonian: HermitianOperator,
             localizer: HermitianOperator, rate: float, dt: float,
             rng: np.random.Generator) -> StateVector:
    """One Euler-Maruyama step of the continuous-localization equation.

    d|psi> = [-iH + A w(t) - rate*A^2] |psi> dt with w(t)dt a complex
    Gaussian increment of total variance 2*rate*dt, then renormalize.
    Over long runs the state concentrates on an eigenvector of A.
    """
    _csl_checks(hamiltonian, localizer, rate, dt)
    if psi.dim != hamiltonian.dim:
        raise ValidationError("state and operator dimensions disagree")
    h, a = hamiltonian.matrix, localizer.matrix
    sigma = math.sqrt(rate * dt)
    noise = complex(rng.normal(0.0, sigma), rng.normal(0.0, sigma)) if rate > 0 else 0.0
    v = psi.amplitudes
    drift = (-1j * (h @ v) - rate * (a @ (a @ v))) * dt
    out = v + drift + noise * (a @ v)
    return StateVector(out / np.linalg.norm(out))


def csl_ensemble(psi0: StateVector, hamiltonian: HermitianOperator,
                 localizer: HermitianOperator, rate: float, dt: float,
                 n_steps: int, n_runs: int, rng: np.random.Generator) -> np.ndarray:
    """Terminal states of ``n_runs`` independent CSL trajectories, vectorized.

    Returns an (n_runs, dim) array of normalized amplitudes.
    """
    _csl_checks(hamiltonian, localizer, rate, dt)
    h, a = hamiltonian.matrix, localizer.matrix
    sigma = math.sqrt(rate * dt)
    states = np.tile(psi0.amplitudes, (n_runs, 1))
    for _ in range(n_steps):
        noise = rng.normal(0.0, sigma, n_runs) + 1j * rng.normal(0.0, sigma, n_runs)
        av = states @ a.T
        drift = (-1j * (states @ h.T) - rate * (av @ a.T)) * dt
        states = states + drift + noise[:, None] * av
        states /= np.linalg.norm(states, axis=1)[:, None]
    return states


def run_alternating(psi0: StateVector, hamiltonian: HermitianOperator,
                    clock: PoissonClock, basis: Sequence[StateVector],
                    total_time: float, sample_dt: float, rng: np.random.Generator,
                    rate_fn: Callable[[StateVector, float], float] | None = None,
                    ) -> AlternatingTrajectory:
    """Alternate exact unitary segments with Poisson-scheduled collapses.

    Between events the state is propagated with the exact matrix
    exponential (eigendecomposition reused across segments). Collapses
    reduce onto ``basis`` with Born weights. ``rate_fn(state, t)`` lets the
    event rate depend on the current state; default is the constant clock
    rate, re-evaluated piecewise after each event.
    """
    if total_time <= 0 or sample_dt <= 0:
        raise ValidationError("total_time and sample_dt must be positive")
    if psi0.dim != hamiltonian.dim:
        raise ValidationError("state and Hamiltonian dimensions disagree")
    energies, modes = hamiltonian.eig()
    modes_h = modes.conj().T

    def advance(state: StateVector, span: float) -> StateVector:
        if span == 0.0:
            return state
        out = modes @ (np.exp(-1j * energies * span) * (modes_h @ state.amplitudes))
        return StateVector(out / np.linalg.norm(out))

    def next_gap(state: StateVector, now: float) -> float:
        rate = clock.rate if rate_fn is None else rate_fn(state, now)
        if rate <= 0:
            return math.inf
        return float(rng.exponential(1.0 / rate))

    traj = AlternatingTrajectory()
    t, psi = 0.0, psi0
    traj.samples.append((0.0, psi))
    t_sample = sample_dt
    t_event = next_gap(psi, 0.0)
    while True:
        t_next = min(t_sample, t_event, total_time)
        psi = advance(psi, t_next - t)
        t = t_next
        if t >= total_time:
            traj.samples.append((total_time, psi))
            break
        if t == t_event:
            pre = psi
            k, psi = collapse(pre, basis, rng)
            traj.events.append(CollapseEvent(
                time=t, pre_state=pre, post_state=psi, chosen_index=k,
                info_change=collapse_info_measure(pre, psi)))
            t_event = t + next_gap(psi, t)
        if t == t_sample:
            traj.samples.append((t, psi))
            t_sample = round(t_sample / sample_dt + 1) * sample_dt
    return traj


def run_alternating_batch(psi0: StateVector, hamiltonian: HermitianOperator,
                          clock: PoissonClock, basis: Sequence[StateVector],
                          total_time: float, sample_dt: float,
                          n_runs: int, master_seed: int,
                          rate_fn: Callable[[StateVector, float], float] | None = None,
                          ) -> list[AlternatingTrajectory]:
    """Independent trajectories with per-run generators seeded master_seed + index."""
    return [
        run_alternating(psi0, hamiltonian, clock, basis, total_time, sample_dt,
                        np.random.default_rng(master_seed + idx), rate_fn)
        for idx in range(n_runs)
    ]


def trajectory_to_rows(traj: AlternatingTrajectory) -> list[list[float]]:
    """Flatten a trajectory to (t, re/im amplitudes..., event_flag, chosen_index) rows."""
    rows = []
    for t, state in traj.samples:
        amps = state.amplitudes
        rows.append([t, *np.column_stack([amps.real, amps.imag]).ravel(), 0, -1])
    for ev in traj.events:
        amps = ev.post_state.amplitudes
        rows.append([ev.time, *np.column_stack([amps.real, amps.imag]).ravel(),
                     1, ev.chosen_index])
    rows.sort(key=lambda row: (row[0], row[-2]))
    return rows


def write_trajectory_csv(traj: AlternatingTrajectory, path) -> None:
    dim = traj.samples[0][1].dim
    header = ["t[1/energy]"]
    for k in range(dim):
        header += [f"re_{k}[-]", f"im_{k}[-]"]
    header += ["event_flag[-]", "chosen_index[-]"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in trajectory_to_rows(traj):
            writer.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])
