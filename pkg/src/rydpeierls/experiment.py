"""Monte Carlo emulation of the measurement pipeline.

Each shot draws, in this order and from its own counter-based stream keyed
by ``(seed, shot index)``:

1. one uniform per site for vacancies,
2. one uniform per targeted site for preparation failures,
3. ``2 * n_sites`` normals for positional jitter,
4. ``T`` uniforms for the projective readout and ``T * n_sites`` uniforms
   for detection errors (only when readout sampling is on).

The shot then rebuilds the exchange Hamiltonian on the jittered layout of
the occupied sites, propagates the prepared product state exactly, and
reads out one pattern per time point. Results therefore do not depend on
the number of workers or their scheduling.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .dynamics import MeasuredProbabilities, detection_patterns, marginalize
from .geometry import SiteLayout, jitter
from .hilbert import NonHermitianError, basis_vector, evolve
from .model import VModelParams, v_hamiltonian

log = logging.getLogger(__name__)

LEAKAGE_MODES = ("failed_pulse", "lost")


@dataclass(frozen=True)
class NoiseModel:
    """Experimental imperfections. Defaults are the values used to model
    the three-atom experiment; detection errors and jitter width are
    assumptions, not measured inputs."""

    vacancy_p: float = 0.17
    sigma_pos: float = 0.2
    eps_rydberg_as_ground: float = 0.05
    eps_ground_as_rydberg: float = 0.05
    prep_leakage: float = 0.05
    leakage_mode: str = "failed_pulse"
    n_samples: int = 500
    seed: int = 0
    two_excitation_scale: float = 1.0
    sample_readout: bool = True

    def __post_init__(self):
        for name in ("vacancy_p", "eps_rydberg_as_ground", "eps_ground_as_rydberg", "prep_leakage"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be a probability in [0, 1], got {value}")
        if not self.sigma_pos >= 0:
            raise ValueError(f"sigma_pos must be non-negative, got {self.sigma_pos}")
        if self.n_samples < 1:
            raise ValueError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.leakage_mode not in LEAKAGE_MODES:
            raise ValueError(f"leakage_mode must be one of {LEAKAGE_MODES}, got {self.leakage_mode!r}")
        if not self.two_excitation_scale >= 0:
            raise ValueError("two_excitation_scale must be non-negative")

    @classmethod
    def ideal(cls, n_samples: int = 1, seed: int = 0) -> "NoiseModel":
        """No imperfections and exact (unsampled) readout."""
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, "failed_pulse", n_samples, seed, 1.0, False)


@dataclass(frozen=True)
class ExperimentConfig:
    layout: SiteLayout
    params: VModelParams
    excited: tuple[int, ...]
    times: np.ndarray
    noise: NoiseModel = field(default_factory=NoiseModel.ideal)
    vdw: float = 0.0

    def __post_init__(self):
        excited = tuple(int(i) for i in self.excited)
        if len(set(excited)) != len(excited):
            raise ValueError(f"initially excited sites must be distinct, got {excited}")
        for i in excited:
            if not 0 <= i < self.layout.n_sites:
                raise ValueError(f"excited site {i} out of range for {self.layout.n_sites} sites")
        times = np.atleast_1d(np.asarray(self.times, dtype=np.float64))
        if times.ndim != 1 or not np.all(np.isfinite(times)):
            raise ValueError("times must be a finite 1-D grid")
        object.__setattr__(self, "excited", excited)
        object.__setattr__(self, "times", times)

    @property
    def n_sites(self) -> int:
        return self.layout.n_sites


@dataclass(frozen=True)
class ShotRecord:
    """Classical defects of one shot."""

    vacant: tuple[bool, ...]
    prep_failed: tuple[bool, ...]
    aborted: bool = False

    @property
    def n_vacancies(self) -> int:
        return sum(self.vacant)


@dataclass(frozen=True)
class PreparedShot:
    present: tuple[int, ...]
    lost: tuple[int, ...]
    psi: np.ndarray
    record: ShotRecord


@dataclass
class MonteCarloResult:
    measured: MeasuredProbabilities
    shots: list[ShotRecord]
    n_aborted: int
    backend: str = _backend.BACKEND

    @property
    def n_ok(self) -> int:
        return len(self.shots) - self.n_aborted


def shot_rng(seed: int, shot: int) -> np.random.Generator:
    """Counter-based stream for one shot."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(shot,))))


def prepare_initial(config: ExperimentConfig, rng: np.random.Generator) -> PreparedShot:
    """Draw vacancies and preparation failures and build the product state
    on the occupied sites (``-`` on each successfully prepared target)."""
    noise = config.noise
    n = config.n_sites
    vacant = tuple(bool(u < noise.vacancy_p) for u in rng.random(n))
    failed = tuple(bool(u < noise.prep_leakage) for u in rng.random(len(config.excited)))
    excited_ok = set()
    lost = []
    for site, bad in zip(config.excited, failed):
        if vacant[site]:
            continue
        if not bad:
            excited_ok.add(site)
        elif noise.leakage_mode == "lost":
            lost.append(site)
    present = tuple(i for i in range(n) if not vacant[i] and i not in lost)
    label = "".join("-" if i in excited_ok else "0" for i in present)
    psi = basis_vector(label) if present else np.ones(1, dtype=np.complex128)
    return PreparedShot(present, tuple(lost), psi, ShotRecord(vacant, failed))


def detection_channel(n_sites: int, eps_1to0: float, eps_0to1: float) -> np.ndarray:
    """Row-stochastic matrix ``F[true, observed]`` of independent bit flips."""
    single = np.array([[1.0 - eps_0to1, eps_0to1], [eps_1to0, 1.0 - eps_1to0]])
    out = np.ones((1, 1))
    for _ in range(n_sites):
        out = np.kron(out, single)
    return out


def detect(bits, noise: NoiseModel, rng: np.random.Generator) -> np.ndarray:
    """Flip each bit 1 -> 0 with ``eps_rydberg_as_ground`` and 0 -> 1 with
    ``eps_ground_as_rydberg``, independently."""
    bits = np.asarray(bits, dtype=np.int64)
    u = rng.random(bits.shape)
    flip = np.where(bits == 1, u < noise.eps_rydberg_as_ground, u < noise.eps_ground_as_rydberg)
    return bits ^ flip.astype(np.int64)


def _embed(sub_probs: np.ndarray, n_sites: int, present, lost) -> np.ndarray:
    """Place pattern probabilities of the occupied sites into the full
    pattern space; vacant sites read 0, lost sites read 1."""
    k = len(present)
    fixed = sum(1 << (n_sites - 1 - i) for i in lost)
    target = np.full(1 << k, fixed, dtype=np.int64)
    for m, site in enumerate(present):
        bit = (np.arange(1 << k) >> (k - 1 - m)) & 1
        target += bit << (n_sites - 1 - site)
    out = np.zeros(sub_probs.shape[:-1] + (1 << n_sites,))
    out[..., target] = sub_probs
    return out


def shot_pattern_probabilities(config: ExperimentConfig, layout: SiteLayout, prepared: PreparedShot) -> np.ndarray:
    """Exact pattern probabilities (T, 2**n) of one shot before detection errors."""
    n = config.n_sites
    T = len(config.times)
    if not prepared.present:
        return _embed(np.ones((T, 1)), n, (), prepared.lost)
    sub = layout.subset(prepared.present)
    H = v_hamiltonian(sub, config.params, config.vdw)
    trajectory = evolve(H, prepared.psi, config.times)
    probs = marginalize(np.abs(trajectory) ** 2, sub.n_sites)
    if not np.all(np.isfinite(probs)):
        raise FloatingPointError("non-finite probabilities")
    return _embed(probs, n, prepared.present, prepared.lost)


def simulate_ideal(config: ExperimentConfig) -> MeasuredProbabilities:
    """Noise-free pipeline: nominal layout, perfect preparation, exact readout."""
    label = "".join("-" if i in config.excited else "0" for i in range(config.n_sites))
    H = v_hamiltonian(config.layout, config.params, config.vdw)
    trajectory = evolve(H, basis_vector(label), config.times)
    return detection_patterns(trajectory, config.n_sites, config.times)


def _run_shot(config: ExperimentConfig, shot: int):
    noise = config.noise
    rng = shot_rng(noise.seed, shot)
    prepared = prepare_initial(config, rng)
    layout = jitter(config.layout, noise.sigma_pos, rng)
    if noise.sample_readout:
        T = len(config.times)
        u_pattern = rng.random(T)
        u_flip = rng.random((T, config.n_sites))
    try:
        probs = shot_pattern_probabilities(config, layout, prepared)
    except (np.linalg.LinAlgError, NonHermitianError, FloatingPointError, ValueError) as exc:
        log.warning("shot %d aborted: %s", shot, exc)
        rec = prepared.record
        return ShotRecord(rec.vacant, rec.prep_failed, aborted=True), None
    if noise.sample_readout:
        observed = _backend.sample_detect(
            probs, u_pattern, u_flip, noise.eps_rydberg_as_ground, noise.eps_ground_as_rydberg
        )
        return prepared.record, observed
    if noise.eps_rydberg_as_ground or noise.eps_ground_as_rydberg:
        probs = probs @ detection_channel(config.n_sites, noise.eps_rydberg_as_ground, noise.eps_ground_as_rydberg)
    return prepared.record, probs


def _run_chunk(config: ExperimentConfig, shots) -> list:
    return [_run_shot(config, int(s)) for s in shots]


def run_monte_carlo(config: ExperimentConfig, workers: int = 1) -> MonteCarloResult:
    """Average ``noise.n_samples`` shots; mean and standard error per pattern
    and time. Aborted shots are excluded and counted."""
    noise = config.noise
    n_shots = noise.n_samples
    if workers > 1 and n_shots > 1:
        chunks = np.array_split(np.arange(n_shots), min(n_shots, 4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = [item for part in pool.map(_run_chunk, [config] * len(chunks), chunks) for item in part]
    else:
        outputs = _run_chunk(config, range(n_shots))

    records = [rec for rec, _ in outputs]
    payloads = [p for _, p in outputs if p is not None]
    n_aborted = len(outputs) - len(payloads)
    T, P = len(config.times), 1 << config.n_sites
    if not payloads:
        nan = np.full((T, P), np.nan)
        return MonteCarloResult(MeasuredProbabilities(config.times, nan, nan.copy()), records, n_aborted)

    n_ok = len(payloads)
    if noise.sample_readout:
        observed = np.stack(payloads)
        counts = np.zeros((T, P), dtype=np.int64)
        for k in range(P):
            counts[:, k] = (observed == k).sum(axis=0)
        mean = counts / n_ok
        sem = np.sqrt(mean * (1.0 - mean) / (n_ok - 1)) if n_ok > 1 else np.zeros_like(mean)
    else:
        stack = np.stack(payloads)
        mean = stack.mean(axis=0) if n_ok > 1 else stack[0]
        sem = stack.std(axis=0, ddof=1) / np.sqrt(n_ok) if n_ok > 1 else np.zeros_like(mean)

    if noise.two_excitation_scale != 1.0:
        mean = mean.copy()
        sem = sem.copy()
        mean[:, 1:] *= noise.two_excitation_scale
        sem[:, 1:] *= noise.two_excitation_scale
    return MonteCarloResult(MeasuredProbabilities(config.times, mean, sem), records, n_aborted)
