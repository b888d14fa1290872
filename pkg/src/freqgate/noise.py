"""Noise models for the interference gate.

Covers the emission-position phase, interferometer path phases, path-length
mismatch between the two frequency components, and Doppler-induced
temporal-mode mismatch.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .atom_photon import TWO_PI, AtomQubit, AtomicSpecies, mode_label
from .gate import (apply_mode_phases, conditioned_density, ideal_output,
                   zz_measurement_gate)
from .quantum_core import JointState, fidelity_up_to_global_phase

SPEED_OF_LIGHT = 299_792_458.0
BALANCED = AtomQubit(1 / math.sqrt(2), 1 / math.sqrt(2))
# artifact convention for "much less than": ratio below this passes
DEFAULT_DOPPLER_THRESHOLD = 0.1


@dataclass(frozen=True)
class TrapParams:
    nu_t: float  # rad/s
    l_s: float  # m

    def __post_init__(self):
        if not self.nu_t > 0:
            raise ValueError("trap frequency must be positive")
        if self.l_s < 0:
            raise ValueError("oscillation length must be non-negative")

    @classmethod
    def from_config(cls, cfg: Mapping) -> TrapParams:
        return cls(nu_t=TWO_PI * float(cfg["nu_t_hz"]), l_s=float(cfg["l_s_nm"]) * 1e-9)


@dataclass(frozen=True)
class EmissionEnvelope:
    """One-sided exponential sqrt(gamma) exp(-gamma (t - t0)/2) exp(i detuning t)."""

    gamma: float
    detuning: float = 0.0
    emission_time_offset: float = 0.0

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        dt = t - self.emission_time_offset
        amp = np.sqrt(self.gamma) * np.exp(-self.gamma * np.maximum(dt, 0) / 2)
        return np.where(dt >= 0, amp * np.exp(1j * self.detuning * t), 0.0)


@dataclass(frozen=True)
class InterferometerPhases:
    phi_arm1_nu0: float = 0.0
    phi_arm1_nu1: float = 0.0
    phi_arm2_nu0: float = 0.0
    phi_arm2_nu1: float = 0.0

    def __post_init__(self):
        if not all(math.isfinite(getattr(self, f)) for f in self.__dataclass_fields__):
            raise ValueError("phases must be finite")

    @classmethod
    def common(cls, arm1: float, arm2: float = 0.0) -> InterferometerPhases:
        """Each arm shifts both frequency components equally."""
        return cls(arm1, arm1, arm2, arm2)

    @classmethod
    def differential(cls, delta: float) -> InterferometerPhases:
        """nu1 in arm 1 lags nu0 by ``delta``; arm 2 untouched."""
        return cls(0.0, delta, 0.0, 0.0)

    def as_mode_phases(self) -> dict[str, float]:
        return {mode_label(1, 0): self.phi_arm1_nu0, mode_label(1, 1): self.phi_arm1_nu1,
                mode_label(2, 0): self.phi_arm2_nu0, mode_label(2, 1): self.phi_arm2_nu1}

    @property
    def relative_phase(self) -> float:
        return (self.phi_arm1_nu1 - self.phi_arm1_nu0) - (self.phi_arm2_nu1 - self.phi_arm2_nu0)


def position_phase(state: JointState, k_dot_r: float) -> JointState:
    """Emission from position r: every photon picks up exp(i k.r)."""
    modes = [label for label in state.labels if not label.startswith("atom")]
    return apply_mode_phases(state, {m: k_dot_r for m in modes})


def mode_overlap(e1: EmissionEnvelope, e2: EmissionEnvelope) -> complex:
    """<f1|f2> for two one-sided exponential envelopes, in closed form."""
    g1, g2 = e1.gamma, e2.gamma
    t1, t2 = e1.emission_time_offset, e2.emission_time_offset
    start = max(t1, t2)
    rate = (g1 + g2) / 2 - 1j * (e2.detuning - e1.detuning)
    return complex(math.sqrt(g1 * g2)
                   * cmath.exp(g1 * t1 / 2 + g2 * t2 / 2 - rate * start) / rate)


def doppler_sigma(species: AtomicSpecies, trap: TrapParams) -> float:
    """Characteristic Doppler shift |k| nu_t l_s (rad/s)."""
    return species.k_mag * trap.nu_t * trap.l_s


@dataclass(frozen=True)
class DopplerReport:
    ratio: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.ratio < self.threshold

    @property
    def status(self) -> str:
        return "pass" if self.passed else "warn"

    def describe(self) -> str:
        return (f"|k| nu_t l_s / gamma = {self.ratio:.4g} -> {self.status} "
                f"(threshold {self.threshold:g} is a labeled convention)")


def doppler_regime_check(species: AtomicSpecies, trap: TrapParams,
                         threshold: float = DEFAULT_DOPPLER_THRESHOLD) -> DopplerReport:
    return DopplerReport(doppler_sigma(species, trap) / species.gamma, threshold)


def sample_doppler_overlaps(species: AtomicSpecies, trap: TrapParams,
                            rng: np.random.Generator, size: int) -> np.ndarray:
    """Envelope overlaps for random static Doppler detunings of both atoms.

    Each atom's detuning is drawn from N(0, |k| nu_t l_s).
    """
    sigma = doppler_sigma(species, trap)
    detunings = rng.normal(0.0, sigma, size=(size, 2))
    g = species.gamma
    return g / (g - 1j * (detunings[:, 1] - detunings[:, 0]))


def state_fidelity(rho: np.ndarray, target: JointState) -> float:
    """<psi|rho|psi> / tr(rho) for a two-atom pure target."""
    psi = target.amplitudes
    return float((psi.conj() @ rho @ psi).real / np.trace(rho).real)


@dataclass(frozen=True)
class PhaseGateResult:
    probability: float
    fidelity: float
    state: JointState | None


def interferometer_phase_gate(atom1: AtomQubit, atom2: AtomQubit,
                              phases: InterferometerPhases) -> PhaseGateResult:
    """Run the Fock gate with path phases and compare to the noiseless output."""
    noisy = zz_measurement_gate(atom1, atom2, phases=phases.as_mode_phases())
    ideal = ideal_output(atom1, atom2)
    if noisy.state is None or ideal is None:
        return PhaseGateResult(noisy.probability, float("nan"), None)
    return PhaseGateResult(noisy.probability,
                           fidelity_up_to_global_phase(noisy.state, ideal), noisy.state)


def differential_phase_fidelity(delta: float | np.ndarray) -> float | np.ndarray:
    """Fidelity for balanced inputs under relative phase ``delta``: cos^2(delta/2)."""
    return np.cos(np.asarray(delta) / 2) ** 2


def path_mismatch_phase(species: AtomicSpecies, mismatch: float) -> float:
    """Relative nu0/nu1 phase from an arm-length difference ``mismatch`` (m)."""
    return species.frequency_splitting * mismatch / SPEED_OF_LIGHT


@dataclass(frozen=True)
class SweepRow:
    delta_over_gamma: float
    overlap_sq: float
    fidelity: float
    coincidence_prob: float


@dataclass(frozen=True)
class DopplerSweep:
    rows: list[SweepRow]
    regime: DopplerReport


def doppler_fidelity_sweep(species: AtomicSpecies, trap: TrapParams,
                           ratios: Iterable[float],
                           atoms: tuple[AtomQubit, AtomQubit] = (BALANCED, BALANCED),
                           threshold: float = DEFAULT_DOPPLER_THRESHOLD) -> DopplerSweep:
    """Conditioned-state fidelity versus relative detuning delta/gamma.

    The grid is in units of gamma; the trap only sets the reported operating
    point |k| nu_t l_s / gamma.
    """
    ideal = ideal_output(*atoms)
    base = EmissionEnvelope(species.gamma)
    rows = []
    for x in ratios:
        j = mode_overlap(base, EmissionEnvelope(species.gamma, detuning=x * species.gamma))
        rho, p = conditioned_density(atoms[0].vector, atoms[1].vector, j)
        rows.append(SweepRow(float(x), abs(j) ** 2, state_fidelity(rho, ideal), p))
    return DopplerSweep(rows, doppler_regime_check(species, trap, threshold))
