"""Classical-limit machinery.

Symplectic (leapfrog) Hamiltonian trajectories with an optional exact-volume
drag contrast, Liouville volume checks, Benettin Lyapunov exponents, grid
Ehrenfest tracking with collapse-driven re-localization, phase-volume Monte
Carlo, coarse/fine ensemble entropy with and without collapse jitter, and
the Schrodinger-versus-heat mode contrast.

hbar = m = 1 on quantum grids unless stated; phase space is (q, p) in
canonical units.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import NumericFailure, ValidationError

__all__ = [
    "PhaseSpacePoint",
    "HamiltonianSystem",
    "harmonic_oscillator",
    "free_particle",
    "pendulum",
    "henon_heiles",
    "quartic_oscillator",
    "free_particle_in_box",
    "hamilton_step",
    "integrate",
    "simplex_cloud",
    "liouville_volume_check",
    "lyapunov_estimate",
    "GaussianPacket",
    "EhrenfestSeries",
    "ehrenfest_track",
    "WalkResult",
    "collapse_random_walk",
    "binomial_walk_displacements",
    "PhaseVolumeEstimate",
    "estimate_phase_volume",
    "EntropySeries",
    "ensemble_entropy_evolution",
    "reversed_replay",
    "coarse_entropy",
    "cloud_total_variation",
    "unitary_vs_diffusive",
]


@dataclass(frozen=True)
class PhaseSpacePoint:
    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float).reshape(-1)
        p = np.array(self.p, dtype=float).reshape(-1)
        if q.size != p.size or q.size == 0:
            raise ValidationError("q and p must have equal, nonzero length")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise ValidationError("non-finite phase-space coordinate")
        q.setflags(write=False)
        p.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "p", p)

    @property
    def dof(self) -> int:
        return self.q.size

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.q, self.p])


class HamiltonianSystem:
    """Separable Hamiltonian with analytic gradients, validated against
    finite differences on construction."""

    def __init__(self, hamiltonian: Callable, dq_grad: Callable, dp_grad: Callable,
                 dof: int, name: str = "", validate: bool = True,
                 sample_scale: float = 1.0):
        self.hamiltonian = hamiltonian
        self.dq_grad = dq_grad
        self.dp_grad = dp_grad
        self.dof = dof
        self.name = name
        if validate:
            self._validate_gradients(sample_scale)

    def energy(self, q, p) -> float:
        return float(self.hamiltonian(np.asarray(q, float), np.asarray(p, float)))

    def _validate_gradients(self, scale: float, n_points: int = 4) -> None:
        rng = np.random.default_rng(20260810)
        h = 1e-6 * scale
        for _ in range(n_points):
            q = rng.uniform(-scale, scale, self.dof)
            p = rng.uniform(-scale, scale, self.dof)
            for grad, var in ((self.dq_grad(q, p), "q"), (self.dp_grad(q, p), "p")):
                for k in range(self.dof):
                    plus, minus = q.copy(), q.copy()
                    pp, pm = p.copy(), p.copy()
                    if var == "q":
                        plus[k] += h
                        minus[k] -= h
                        fd = (self.energy(plus, p) - self.energy(minus, p)) / (2 * h)
                    else:
                        pp[k] += h
                        pm[k] -= h
                        fd = (self.energy(q, pp) - self.energy(q, pm)) / (2 * h)
                    ref = max(abs(fd), abs(np.asarray(grad).reshape(-1)[k]), 1e-3)
                    if abs(np.asarray(grad).reshape(-1)[k] - fd) > 1e-5 * ref:
                        raise ValidationError(
                            f"analytic {var}-gradient disagrees with finite differences "
                            f"(component {k}: {grad} vs {fd})")


def harmonic_oscillator(omega: float = 1.0, mass: float = 1.0) -> HamiltonianSystem:
    k = mass * omega ** 2
    return HamiltonianSystem(
        lambda q, p: 0.5 * np.sum(p * p, axis=-1) / mass + 0.5 * k * np.sum(q * q, axis=-1),
        lambda q, p: k * q,
        lambda q, p: p / mass,
        dof=1, name="harmonic")


def free_particle(mass: float = 1.0) -> HamiltonianSystem:
    return HamiltonianSystem(
        lambda q, p: 0.5 * np.sum(p * p, axis=-1) / mass,
        lambda q, p: np.zeros_like(q),
        lambda q, p: p / mass,
        dof=1, name="free")


def pendulum() -> HamiltonianSystem:
    return HamiltonianSystem(
        lambda q, p: 0.5 * np.sum(p * p, axis=-1) - np.cos(q[..., 0]),
        lambda q, p: np.sin(q),
        lambda q, p: p,
        dof=1, name="pendulum")


def henon_heiles() -> HamiltonianSystem:
    def ham(q, p):
        x, y = q[..., 0], q[..., 1]
        return (0.5 * np.sum(p * p, axis=-1) + 0.5 * (x * x + y * y)
                + x * x * y - y ** 3 / 3.0)

    def dq(q, p):
        x, y = q[..., 0], q[..., 1]
        return np.stack([x + 2 * x * y, y + x * x - y * y], axis=-1)

    return HamiltonianSystem(ham, dq, lambda q, p: p, dof=2, name="henon_heiles",
                             sample_scale=0.5)


def quartic_oscillator(strength: float = 0.25, mass: float = 1.0) -> HamiltonianSystem:
    return HamiltonianSystem(
        lambda q, p: 0.5 * np.sum(p * p, axis=-1) / mass + strength * np.sum(q ** 4, axis=-1),
        lambda q, p: 4.0 * strength * q ** 3,
        lambda q, p: p / mass,
        dof=1, name="quartic")


def free_particle_in_box(side: float, mass: float = 1.0) -> HamiltonianSystem:
    """Kinetic Hamiltonian confined to [0, side]^2; +inf outside.

    Gradients are undefined at the walls, so this system is for phase-volume
    estimation only (construction skips the gradient check).
    """

    def ham(q, p):
        kinetic = 0.5 * np.sum(p * p, axis=-1) / mass
        inside = np.all((q >= 0) & (q <= side), axis=-1)
        return np.where(inside, kinetic, np.inf)

    return HamiltonianSystem(ham, None, None, dof=2, name="box", validate=False)


def _steps(sys: HamiltonianSystem, q: np.ndarray, p: np.ndarray, dt: float,
           n_steps: int, drag: float) -> tuple[np.ndarray, np.ndarray]:
    # kick-(drag)-drift-(drag)-kick; the drag factor is applied exactly so the
    # phase-volume contraction per step is e^{-drag*dt*dof} bit-for-bit
    shrink = math.exp(-drag * dt / 2.0) if drag else 1.0
    half = dt / 2.0
    for _ in range(n_steps):
        p = p - half * sys.dq_grad(q, p)
        if drag:
            p = p * shrink
        q = q + dt * sys.dp_grad(q, p)
        if drag:
            p = p * shrink
        p = p - half * sys.dq_grad(q, p)
    return q, p


def hamilton_step(sys: HamiltonianSystem, x: PhaseSpacePoint, dt: float,
                  drag: float = 0.0) -> PhaseSpacePoint:
    """One leapfrog step; time-reversible and symplectic for drag = 0."""
    if not math.isfinite(dt):
        raise ValidationError("dt must be finite")
    q, p = _steps(sys, x.q.copy(), x.p.copy(), dt, 1, drag)
    if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
        raise NumericFailure("trajectory escaped to non-finite values")
    return PhaseSpacePoint(q, p)


def integrate(sys: HamiltonianSystem, x: PhaseSpacePoint, dt: float, n_steps: int,
              drag: float = 0.0, record_every: int = 0):
    """Leapfrog trajectory. With record_every > 0, returns (times, qs, ps)
    arrays; otherwise the final PhaseSpacePoint."""
    q, p = x.q.copy(), x.p.copy()
    if record_every <= 0:
        q, p = _steps(sys, q, p, dt, n_steps, drag)
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(p))):
            raise NumericFailure("trajectory escaped to non-finite values")
        return PhaseSpacePoint(q, p)
    times, qs, ps = [0.0], [q.copy()], [p.copy()]
    done = 0
    while done < n_steps:
        chunk = min(record_every, n_steps - done)
        q, p = _steps(sys, q, p, dt, chunk, drag)
        done += chunk
        times.append(done * dt)
        qs.append(q.copy())
        ps.append(p.copy())
    return np.array(times), np.array(qs), np.array(ps)


def simplex_cloud(x0: PhaseSpacePoint, eps: float) -> list[PhaseSpacePoint]:
    """x0 plus one vertex eps along each phase-space axis."""
    base = x0.as_vector()
    n = base.size
    cloud = [x0]
    for k in range(n):
        v = base.copy()
        v[k] += eps
        cloud.append(PhaseSpacePoint(v[:n // 2], v[n // 2:]))
    return cloud


def _edge_volume(cloud: Sequence[PhaseSpacePoint]) -> float:
    base = cloud[0].as_vector()
    edges = np.column_stack([c.as_vector() - base for c in cloud[1:]])
    return float(np.linalg.det(edges))


def liouville_volume_check(sys: HamiltonianSystem, cloud: Sequence[PhaseSpacePoint],
                           total_time: float, dt: float = 1e-3,
                           drag: float = 0.0) -> float:
    """Ratio of evolved to initial simplex volume.

    1 for Hamiltonian flow (incompressible); e^{-drag*T*dof} with linear
    momentum drag, the dissipative contrast.
    """
    n = 2 * cloud[0].dof
    if len(cloud) != n + 1:
        raise ValidationError(f"need {n + 1} points spanning the phase space")
    before = _edge_volume(cloud)
    if before == 0.0:
        raise ValidationError("degenerate cloud: zero initial volume")
    n_steps = max(1, round(total_time / dt))
    moved = [integrate(sys, c, total_time / n_steps, n_steps, drag=drag) for c in cloud]
    return _edge_volume(moved) / before


def lyapunov_estimate(sys: HamiltonianSystem, x0: PhaseSpacePoint, eps0: float,
                      total_time: float, renormalize_every: int, dt: float,
                      rng: np.random.Generator | None = None) -> float:
    """Benettin renormalized divergence rate along one trajectory.

    Zero (within sampling) for integrable systems; positive and seed-stable
    in a chaotic sea.
    """
    if eps0 <= 0 or renormalize_every < 1:
        raise ValidationError("need positive eps0 and renormalize_every >= 1")
    n = 2 * x0.dof
    if rng is None:
        direction = np.zeros(n)
        direction[0] = 1.0
    else:
        direction = rng.normal(size=n)
        direction /= np.linalg.norm(direction)
    ref_q, ref_p = x0.q.copy(), x0.p.copy()
    pert = x0.as_vector() + eps0 * direction
    pert_q, pert_p = pert[:x0.dof].copy(), pert[x0.dof:].copy()
    n_intervals = max(1, round(total_time / (renormalize_every * dt)))
    log_sum = 0.0
    for _ in range(n_intervals):
        ref_q, ref_p = _steps(sys, ref_q, ref_p, dt, renormalize_every, 0.0)
        pert_q, pert_p = _steps(sys, pert_q, pert_p, dt, renormalize_every, 0.0)
        if not (np.all(np.isfinite(ref_q)) and np.all(np.isfinite(pert_q))):
            raise NumericFailure("trajectory escaped during Lyapunov estimation")
        delta = np.concatenate([pert_q - ref_q, pert_p - ref_p])
        dist = float(np.linalg.norm(delta))
        if dist == 0.0:
            continue
        log_sum += math.log(dist / eps0)
        scaled = delta * (eps0 / dist)
        pert_q = ref_q + scaled[:x0.dof]
        pert_p = ref_p + scaled[x0.dof:]
    return log_sum / (n_intervals * renormalize_every * dt)


# ---------------------------------------------------------------------------
# quantum 1-D grid tools


@dataclass(frozen=True)
class GaussianPacket:
    """Localized packet: centers and widths obeying sigma_q*sigma_p >= 1/2."""

    q_center: float
    p_center: float
    sigma_q: float
    sigma_p: float | None = None

    def __post_init__(self):
        if self.sigma_q <= 0:
            raise ValidationError("sigma_q must be positive")
        sp = self.sigma_p if self.sigma_p is not None else 0.5 / self.sigma_q
        if self.sigma_q * sp < 0.5 - 1e-12:
            raise ValidationError("uncertainty bound violated: sigma_q*sigma_p < 1/2")
        object.__setattr__(self, "sigma_p", sp)


class _Grid1D:
    def __init__(self, n_cells: int, extent: float, mass: float = 1.0):
        self.n = n_cells
        self.dx = 2 * extent / n_cells
        self.extent = extent
        self.mass = mass
        self.x = (np.arange(n_cells) - n_cells // 2) * self.dx
        self.k = 2 * math.pi * np.fft.fftfreq(n_cells, self.dx)

    def packet(self, packet: GaussianPacket) -> np.ndarray:
        if packet.sigma_q < 8 * self.dx:
            raise ValidationError("grid does not resolve the packet (sigma_q < 8 dx)")
        psi = np.exp(-((self.x - packet.q_center) ** 2) / (4 * packet.sigma_q ** 2)
                     + 1j * packet.p_center * self.x)
        return psi / math.sqrt(float(np.sum(np.abs(psi) ** 2)) * self.dx)

    def moments(self, psi: np.ndarray):
        w = np.abs(psi) ** 2
        w /= w.sum()
        q_mean = float(np.dot(w, self.x))
        q_sig = math.sqrt(max(float(np.dot(w, (self.x - q_mean) ** 2)), 0.0))
        spec = np.abs(np.fft.fft(psi)) ** 2
        spec /= spec.sum()
        p_mean = float(np.dot(spec, self.k))
        p_sig = math.sqrt(max(float(np.dot(spec, (self.k - p_mean) ** 2)), 0.0))
        return q_mean, p_mean, q_sig, p_sig

    def boundary_check(self, q_mean: float, q_sig: float) -> None:
        if abs(q_mean) + 4 * q_sig > self.extent:
            raise ValidationError("boundary contact: packet within 4 sigma of the edge")


class EhrenfestSeries(NamedTuple):
    times: np.ndarray
    q_mean: np.ndarray
    p_mean: np.ndarray
    q_sigma: np.ndarray
    p_sigma: np.ndarray


def _strang_phases(grid: _Grid1D, potential: Callable, dt: float):
    v = potential(grid.x)
    return np.exp(-0.5j * v * dt), np.exp(-1j * grid.k ** 2 * dt / (2 * grid.mass))


def ehrenfest_track(potential: Callable, packet: GaussianPacket, total_time: float,
                    dt: float, n_cells: int = 512, extent: float = 25.0,
                    mass: float = 1.0, record_every: int = 1) -> EhrenfestSeries:
    """Strang split-step evolution recording (<q>, <p>, sigma_q, sigma_p).

    For quadratic potentials the means track the classical trajectory; for
    anharmonic ones the deviation diagnoses the classical-limit breakdown.
    """
    grid = _Grid1D(n_cells, extent, mass)
    psi = grid.packet(packet)
    half_v, kinetic = _strang_phases(grid, potential, dt)
    n_steps = max(1, round(total_time / dt))
    rows = [(0.0, *grid.moments(psi))]
    for step in range(1, n_steps + 1):
        psi = half_v * np.fft.ifft(kinetic * np.fft.fft(half_v * psi))
        if step % record_every == 0 or step == n_steps:
            moms = grid.moments(psi)
            grid.boundary_check(moms[0], moms[2])
            rows.append((step * dt, *moms))
    arr = np.array(rows)
    return EhrenfestSeries(arr[:, 0], arr[:, 1], arr[:, 2], arr[:, 3], arr[:, 4])


class WalkResult(NamedTuple):
    times: np.ndarray
    q_mean: np.ndarray
    n_events: int


def collapse_random_walk(potential: Callable, packet: GaussianPacket,
                         clock, sigma_r: float, total_time: float, dt: float,
                         rng: np.random.Generator, n_cells: int = 512,
                         extent: float = 25.0, mass: float = 1.0,
                         record_every: int = 1) -> WalkResult:
    """Split-step evolution with Poisson-timed Gaussian re-localizations.

    At each event the wavefunction is multiplied by a Gaussian window of
    width sigma_r centered at a position drawn from |psi|^2, then
    renormalized; <q> then performs a random walk. ``clock=None`` disables
    events (recovers the deterministic track).
    """
    grid = _Grid1D(n_cells, extent, mass)
    if sigma_r < 4 * grid.dx:
        raise ValidationError("localization width must span at least 4 grid cells")
    psi = grid.packet(packet)
    half_v, kinetic = _strang_phases(grid, potential, dt)
    n_steps = max(1, round(total_time / dt))
    next_event = math.inf if clock is None else rng.exponential(1.0 / clock.rate)
    n_events = 0
    times, means = [0.0], [grid.moments(psi)[0]]
    for step in range(1, n_steps + 1):
        psi = half_v * np.fft.ifft(kinetic * np.fft.fft(half_v * psi))
        t = step * dt
        while t >= next_event:
            weights = np.abs(psi) ** 2
            weights /= weights.sum()
            center = grid.x[int(rng.choice(grid.n, p=weights))]
            psi = psi * np.exp(-((grid.x - center) ** 2) / (4 * sigma_r ** 2))
            psi /= math.sqrt(float(np.sum(np.abs(psi) ** 2)) * grid.dx)
            n_events += 1
            next_event += rng.exponential(1.0 / clock.rate)
        if step % record_every == 0 or step == n_steps:
            times.append(t)
            means.append(grid.moments(psi)[0])
    return WalkResult(np.array(times), np.array(means), n_events)


def binomial_walk_displacements(n_steps: int, step_size: float, n_walks: int,
                                rng: np.random.Generator, p: float = 0.5) -> np.ndarray:
    """Centered right-step counts of symmetric walks, scaled by the step size.

    The displacement statistic (m - n p) * d has standard deviation
    d * sqrt(n p (1-p)), i.e. d sqrt(n)/2 in the symmetric case.
    """
    if n_steps < 1 or n_walks < 1 or not (0 < p < 1):
        raise ValidationError("need n_steps, n_walks >= 1 and p in (0, 1)")
    rights = rng.binomial(n_steps, p, size=n_walks)
    return (rights - n_steps * p) * step_size


class PhaseVolumeEstimate(NamedTuple):
    gamma0: float            # hypervolume of {H(X) <= E}
    omega: float             # density of states dGamma0/dE (central difference)
    gamma0_stderr: float


def estimate_phase_volume(sys: HamiltonianSystem, energy: float, box,
                          n_samples: int, rng: np.random.Generator,
                          delta_e_frac: float = 0.02) -> PhaseVolumeEstimate:
    """Monte Carlo measure of the sub-energy region and its energy derivative.

    ``box`` is (lows, highs) over the 2*dof coordinates (q dims then p dims)
    and must strictly enclose the region; samples of H <= E hugging the box
    boundary raise an error.
    """
    lows = np.asarray(box[0], dtype=float)
    highs = np.asarray(box[1], dtype=float)
    if lows.size != 2 * sys.dof or np.any(highs <= lows):
        raise ValidationError("box must give lows < highs over all phase-space dims")
    samples = rng.uniform(lows, highs, size=(n_samples, lows.size))
    q, p = samples[:, :sys.dof], samples[:, sys.dof:]
    h_vals = np.asarray(sys.hamiltonian(q, p))
    volume = float(np.prod(highs - lows))
    inside = h_vals <= energy
    frac = float(inside.mean())
    margin = 0.005 * (highs - lows)
    near_edge = np.any((samples <= lows + margin) | (samples >= highs - margin), axis=1)
    if np.any(inside & near_edge):
        raise ValidationError("box too small: the energy region touches the sampling box")
    delta = delta_e_frac * abs(energy)
    frac_hi = float((h_vals <= energy + delta).mean())
    frac_lo = float((h_vals <= energy - delta).mean())
    stderr = volume * math.sqrt(max(frac * (1 - frac), 0.0) / n_samples)
    return PhaseVolumeEstimate(volume * frac,
                               volume * (frac_hi - frac_lo) / (2 * delta),
                               stderr)


class EntropySeries(NamedTuple):
    times: np.ndarray
    coarse: np.ndarray
    fine: np.ndarray | None
    n_events: int


def coarse_entropy(q: np.ndarray, p: np.ndarray, edges: np.ndarray) -> float:
    counts, _, _ = np.histogram2d(q.ravel(), p.ravel(), bins=(edges, edges))
    probs = counts.ravel() / counts.sum()
    probs = probs[probs > 0]
    return float(-np.sum(probs * np.log(probs)))


def _jitter(q, p, mask, sigma, rng):
    q[mask] += rng.normal(0.0, sigma, size=q[mask].shape)
    p[mask] += rng.normal(0.0, sigma, size=p[mask].shape)


def ensemble_entropy_evolution(sys: HamiltonianSystem, q0: np.ndarray, p0: np.ndarray,
                               total_time: float, dt: float, edges: np.ndarray,
                               collapse_rate: float = 0.0, jitter_sigma: float = 0.0,
                               rng: np.random.Generator | None = None,
                               record_every: int = 1, fine_eps: float = 1e-6
                               ) -> EntropySeries:
    """Coarse-grained Shannon entropy of an M-point ensemble over time.

    The histogram grid ``edges`` is fixed up front. With the collapse clock
    off, a fine-grained series (log of the Liouville-transported volume via
    the flow Jacobian at the centroid) is also returned; it stays constant,
    separating the coarse-graining artifact from the collapse-driven growth.
    Collapse events are Bernoulli-thinned per point and step at probability
    collapse_rate * dt and jitter (q, p) by ``jitter_sigma``.
    """
    q = np.array(q0, dtype=float)
    p = np.array(p0, dtype=float)
    if q.shape != p.shape or q.shape[0] < 10_000:
        raise ValidationError("need matching q/p clouds with at least 1e4 points")
    if collapse_rate > 0 and rng is None:
        raise ValidationError("collapse jitter needs an RNG")
    if collapse_rate * dt > 0.5:
        raise ValidationError("collapse_rate*dt too large for Bernoulli thinning")
    n_steps = max(1, round(total_time / dt))
    track_fine = collapse_rate == 0.0
    if track_fine:
        centroid = PhaseSpacePoint(np.atleast_1d(q.mean(axis=0)),
                                   np.atleast_1d(p.mean(axis=0)))
        vertices = simplex_cloud(centroid, fine_eps)
        vol0 = abs(_edge_volume(vertices))
    times = [0.0]
    coarse = [coarse_entropy(q, p, edges)]
    fine = [0.0] if track_fine else None
    n_events = 0
    for step in range(1, n_steps + 1):
        q, p = _steps(sys, q, p, dt, 1, 0.0)
        if collapse_rate > 0:
            mask = rng.random(q.shape[0]) < collapse_rate * dt
            hits = int(mask.sum())
            if hits:
                _jitter(q, p, mask, jitter_sigma, rng)
                n_events += hits
        elif track_fine:
            vertices = [hamilton_step(sys, v, dt) for v in vertices]
        if step % record_every == 0 or step == n_steps:
            times.append(step * dt)
            coarse.append(coarse_entropy(q, p, edges))
            if track_fine:
                fine.append(math.log(abs(_edge_volume(vertices)) / vol0))
    return EntropySeries(np.array(times), np.array(coarse),
                         np.array(fine) if track_fine else None, n_events)


def cloud_total_variation(q_a, p_a, q_b, p_b, edges: np.ndarray) -> float:
    ca, _, _ = np.histogram2d(np.ravel(q_a), np.ravel(p_a), bins=(edges, edges))
    cb, _, _ = np.histogram2d(np.ravel(q_b), np.ravel(p_b), bins=(edges, edges))
    return 0.5 * float(np.abs(ca / ca.sum() - cb / cb.sum()).sum())


def reversed_replay(sys: HamiltonianSystem, q0: np.ndarray, p0: np.ndarray,
                    total_time: float, dt: float, edges: np.ndarray,
                    collapse_rate: float = 0.0, jitter_sigma: float = 0.0,
                    rng: np.random.Generator | None = None
                    ) -> tuple[np.ndarray, np.ndarray, float]:
    """Evolve, flip momenta, evolve again, flip back; compare with the start.

    Deterministic flow returns the initial cloud (leapfrog is exactly
    time-reversible); with collapse jitter active the replay does not.
    Returns (q_final, p_final, total-variation distance from the start).
    """
    q = np.array(q0, dtype=float)
    p = np.array(p0, dtype=float)
    n_steps = max(1, round(total_time / dt))

    def leg(q, p):
        for _ in range(n_steps):
            q, p = _steps(sys, q, p, dt, 1, 0.0)
            if collapse_rate > 0:
                mask = rng.random(q.shape[0]) < collapse_rate * dt
                if mask.any():
                    _jitter(q, p, mask, jitter_sigma, rng)
        return q, p

    q, p = leg(q, p)
    q, p = leg(q, -p)
    p = -p
    return q, p, cloud_total_variation(q, p, q0, p0, edges)


class DiffusionContrast(NamedTuple):
    times: np.ndarray
    schrodinger_profiles: np.ndarray  # complex, one row per time
    heat_profiles: np.ndarray         # real, one row per time
    schrodinger_norms: np.ndarray
    heat_norms: np.ndarray


def unitary_vs_diffusive(profile: np.ndarray, dx: float, times,
                         alpha: float = 1.0, mass: float = 1.0) -> DiffusionContrast:
    """Evolve one real profile under both the free Schrodinger equation and
    the heat equation (spectral, exact per mode).

    Schrodinger phases advance as k^2 t / 2m at constant modulus; heat modes
    contract by e^{-k^2 alpha t}. Negative heat times are refused (ill-posed
    amplification).
    """
    u0 = np.asarray(profile, dtype=float)
    if u0.ndim != 1:
        raise ValidationError("profile must be 1-D")
    ts = np.asarray(times, dtype=float)
    if np.any(ts < 0):
        raise ValidationError("heat evolution for t < 0 is ill-posed; refused")
    k = 2 * math.pi * np.fft.fftfreq(u0.size, dx)
    spec = np.fft.fft(u0)
    schro, heat = [], []
    for t in ts:
        schro.append(np.fft.ifft(spec * np.exp(-1j * k ** 2 * t / (2 * mass))))
        heat.append(np.fft.ifft(spec * np.exp(-k ** 2 * alpha * t)).real)
    schro = np.array(schro)
    heat = np.array(heat)
    return DiffusionContrast(
        ts, schro, heat,
        np.sqrt(np.sum(np.abs(schro) ** 2, axis=1) * dx),
        np.sqrt(np.sum(heat ** 2, axis=1) * dx))
