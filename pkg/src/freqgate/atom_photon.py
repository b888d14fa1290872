"""Atomic clock-state qubits and their frequency-tagged spontaneous emission.

The qubit lives in the two m=0 hyperfine ground states.  A pi-polarized
ultrafast pulse moves each qubit state to its own excited hyperfine level,
so a pi-polarized decay photon comes out at frequency nu0 or nu1 depending
on which qubit state it came from.  Pulse excitation followed by pi decay
therefore maps ``c0|0> + c1|1>`` to ``c0|0>|nu0> + c1|1>|nu1>``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np

from .quantum_core import ATOM_DIM, MODE_DIM, JointState
from .tolerances import NORM_ATOL

TWO_PI = 2.0 * math.pi


class ResolvabilityWarning(UserWarning):
    """The two pi-decay frequencies are only marginally resolved."""


@dataclass(frozen=True)
class AtomicSpecies:
    """Level-scheme constants.  Frequencies and rates are angular (rad/s)."""

    F: int
    delta_hf_s: float
    delta_hf_p: float
    gamma: float
    k_mag: float
    eta_b: float
    fine_structure_split: float
    # warn when (delta_hf_s + delta_hf_p) / gamma falls below this
    resolvability_warn_ratio: float = 10.0

    def __post_init__(self):
        if self.F < 0:
            raise ValueError("F must be non-negative")
        for name in ("delta_hf_s", "delta_hf_p", "gamma", "k_mag", "fine_structure_split"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.eta_b <= 1.0:
            raise ValueError("eta_b must lie in [0, 1]")
        ratio = self.resolvability_ratio
        if ratio <= 1.0:
            raise ValueError(
                f"pi-decay frequencies unresolved: (delta_hf_s + delta_hf_p)/gamma = {ratio:.3g}")
        if ratio < self.resolvability_warn_ratio:
            warnings.warn(
                f"(delta_hf_s + delta_hf_p)/gamma = {ratio:.3g} is below "
                f"{self.resolvability_warn_ratio:g}", ResolvabilityWarning, stacklevel=3)

    @property
    def resolvability_ratio(self) -> float:
        return (self.delta_hf_s + self.delta_hf_p) / self.gamma

    @property
    def frequency_splitting(self) -> float:
        """Angular frequency difference between the nu0 and nu1 photons."""
        return self.delta_hf_s + self.delta_hf_p

    @property
    def wavelength(self) -> float:
        return TWO_PI / self.k_mag

    @classmethod
    def from_config(cls, cfg: Mapping[str, Any]) -> AtomicSpecies:
        """Build from the JSON ``species`` section (frequencies in Hz)."""
        required = ("f", "delta_hf_s_hz", "delta_hf_p_hz", "gamma_hz",
                    "wavelength_nm", "eta_b", "fine_structure_thz")
        missing = [key for key in required if key not in cfg]
        if missing:
            raise ValueError(f"species config missing keys: {missing}")
        kwargs = {}
        if "resolvability_warn_ratio" in cfg:
            kwargs["resolvability_warn_ratio"] = float(cfg["resolvability_warn_ratio"])
        return cls(
            F=int(cfg["f"]),
            delta_hf_s=TWO_PI * float(cfg["delta_hf_s_hz"]),
            delta_hf_p=TWO_PI * float(cfg["delta_hf_p_hz"]),
            gamma=TWO_PI * float(cfg["gamma_hz"]),
            k_mag=TWO_PI / (float(cfg["wavelength_nm"]) * 1e-9),
            eta_b=float(cfg["eta_b"]),
            fine_structure_split=TWO_PI * float(cfg["fine_structure_thz"]) * 1e12,
            **kwargs,
        )


# 111Cd+: 14 GHz ground splitting and 74 THz fine structure.  The P1/2
# splitting, linewidth and wavelength here are illustrative inputs.
CADMIUM_111 = {
    "f": 0,
    "delta_hf_s_hz": 14.0e9,
    "delta_hf_p_hz": 2.1e9,
    "gamma_hz": 50.0e6,
    "wavelength_nm": 214.5,
    "fine_structure_thz": 74.0,
}


def cadmium_like(eta_b: float, **overrides) -> AtomicSpecies:
    return AtomicSpecies.from_config({**CADMIUM_111, "eta_b": eta_b, **overrides})


@dataclass(frozen=True)
class AtomQubit:
    c0: complex
    c1: complex

    def __post_init__(self):
        c0, c1 = complex(self.c0), complex(self.c1)
        if not (np.isfinite(c0) and np.isfinite(c1)):
            raise ValueError("amplitudes must be finite")
        if abs(abs(c0) ** 2 + abs(c1) ** 2 - 1.0) > NORM_ATOL:
            raise ValueError(f"qubit amplitudes ({c0}, {c1}) are not normalized")
        object.__setattr__(self, "c0", c0)
        object.__setattr__(self, "c1", c1)

    @classmethod
    def from_unnormalized(cls, c0: complex, c1: complex) -> AtomQubit:
        norm = math.sqrt(abs(c0) ** 2 + abs(c1) ** 2)
        if norm == 0:
            raise ValueError("zero vector is not a qubit state")
        return cls(c0 / norm, c1 / norm)

    @classmethod
    def haar(cls, rng: np.random.Generator) -> AtomQubit:
        v = rng.normal(size=2) + 1j * rng.normal(size=2)
        return cls.from_unnormalized(v[0], v[1])

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.c0, self.c1])

    def as_state(self, label: str) -> JointState:
        return JointState(((label, ATOM_DIM),), self.vector)


def haar_amplitudes(rng: np.random.Generator, size: int) -> np.ndarray:
    """``size`` Haar-random qubit vectors as a ``(size, 2)`` array."""
    v = rng.normal(size=(size, 2)) + 1j * rng.normal(size=(size, 2))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


class Polarization(enum.Enum):
    PI = "pi"
    SIGMA_PLUS = "sigma_plus"
    SIGMA_MINUS = "sigma_minus"


@dataclass(frozen=True)
class PulseSpec:
    bandwidth: float
    polarization: Polarization = Polarization.PI

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError("pulse bandwidth must be positive")


@dataclass(frozen=True)
class PulseReport:
    violations: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_pulse(species: AtomicSpecies, pulse: PulseSpec) -> PulseReport:
    """Check the pulse drives only D1 and maps each qubit state to one level.

    The bandwidth must exceed the ground hyperfine splitting and stay below
    the P1/2-P3/2 fine-structure splitting, and the pulse must be pi-polarized.
    """
    violations = []
    if not pulse.bandwidth > species.delta_hf_s:
        violations.append("bandwidth does not exceed the ground hyperfine splitting")
    if not pulse.bandwidth < species.fine_structure_split:
        violations.append("bandwidth reaches the fine-structure splitting (D2 driven)")
    if pulse.polarization is not Polarization.PI:
        violations.append(f"polarization is {pulse.polarization.value}, not pi")
    return PulseReport(tuple(violations))


def atom_label(index: int) -> str:
    return f"atom{index}"


def mode_label(arm: int, freq: int, temporal: int | None = None, prefix: str = "arm") -> str:
    label = f"{prefix}{arm}_nu{freq}"
    return label if temporal is None else f"{label}_t{temporal}"


def excite_and_decay_pi_filtered(atom: AtomQubit, index: int = 1,
                                 temporal: Sequence[complex] | None = None) -> JointState:
    """Atom-photon state after pulse excitation and a pi-polarized decay.

    Factors: ``atom{index}`` then the photonic modes of spatial channel
    ``arm{index}``, one per frequency (nu0, nu1).  With ``temporal`` given, each
    frequency is split into that many temporal basis modes and the photon
    occupies them with the listed amplitudes.
    """
    if temporal is None:
        coeffs = np.array([1.0 + 0j])
        tags: list[int | None] = [None]
    else:
        coeffs = np.asarray(temporal, dtype=complex)
        if abs(np.vdot(coeffs, coeffs).real - 1.0) > NORM_ATOL:
            raise ValueError("temporal envelope amplitudes must be normalized")
        tags = list(range(coeffs.size))
    modes = [mode_label(index, f, t) for f in (0, 1) for t in tags]
    factors = ((atom_label(index), ATOM_DIM),) + tuple((m, MODE_DIM) for m in modes)
    n_t = len(tags)
    terms: dict[tuple[int, ...], complex] = {}
    for qubit_level, amp in ((0, atom.c0), (1, atom.c1)):
        for t, env in enumerate(coeffs):
            occupation = [0] * len(modes)
            occupation[qubit_level * n_t + t] = 1
            terms[(qubit_level, *occupation)] = amp * env
    return JointState.from_terms(factors, terms)


class DecayChannel(enum.Enum):
    PI = "pi"
    SIGMA = "sigma"


@dataclass(frozen=True)
class DecayOutcome:
    """Result of one excitation/decay cycle.

    A pi decay leaves the coherent atom-photon state; a sigma decay has its
    photon blocked by the polarization filter and leaves the atom in the
    ground Zeeman level ``sigma_level = (F_ground, m)``.
    """

    channel: DecayChannel
    post_state: JointState | None = None
    sigma_level: tuple[int, int] | None = None
    polarization: Polarization = Polarization.PI

    @property
    def photon_passed(self) -> bool:
        return self.channel is DecayChannel.PI


def sigma_decay_targets(F: int, qubit_level: int) -> list[tuple[int, int, Polarization]]:
    """Ground ``(F_g, m, polarization)`` reachable by sigma decay.

    |0> = |F,0> is excited to |F+1,0>'; |1> = |F+1,0> to |F,0>'.
    """
    f_excited = F + 1 if qubit_level == 0 else F
    targets = []
    for f_ground in (F, F + 1):
        if abs(f_ground - f_excited) > 1:
            continue
        for m, pol in ((-1, Polarization.SIGMA_PLUS), (1, Polarization.SIGMA_MINUS)):
            if abs(m) <= f_ground:
                targets.append((f_ground, m, pol))
    return targets


def sample_decay_channel(atom: AtomQubit, species: AtomicSpecies,
                         rng: np.random.Generator, index: int = 1) -> DecayOutcome:
    if rng.random() < species.eta_b:
        return DecayOutcome(DecayChannel.PI, post_state=excite_and_decay_pi_filtered(atom, index))
    level = 0 if rng.random() < abs(atom.c0) ** 2 else 1
    targets = sigma_decay_targets(species.F, level)
    f_ground, m, pol = targets[rng.integers(len(targets))]
    return DecayOutcome(DecayChannel.SIGMA, sigma_level=(f_ground, m), polarization=pol)
