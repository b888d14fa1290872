"""The two-atom ZZ measurement gate built from photon interference.

Each atom emits a frequency-qubit photon into its own arm.  The arms meet
on a 50:50 beam splitter whose outputs feed two frequency-blind detectors;
one click on each detector projects the atoms onto the -1 eigenspace of
Z1 Z2, leaving c0 d1|01> - c1 d0|10> (an extra Z on atom 1 relative to the
bare projector).
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping

import numpy as np

from .atom_photon import (AtomQubit, atom_label, excite_and_decay_pi_filtered,
                          haar_amplitudes)
from .quantum_core import (JointState, apply, conditional_density, relabel,
                           reorder, tensor)
from .tolerances import NULL_PROBABILITY, PURITY_ATOL

MAX_PHOTONS = 2
# a -> (d1 + d2)/sqrt2, b -> (d1 - d2)/sqrt2
BEAM_SPLITTER = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
ATOM_LABELS = (atom_label(1), atom_label(2))
SWAP_2Q = np.eye(4)[[0, 2, 1, 3]]


@dataclass(frozen=True)
class EfficiencyModel:
    eta_d: float = 1.0
    eta_c: float = 1.0
    eta_b: float = 1.0
    # per-detector, per-attempt false click probability
    dark_rate: float = 0.0

    def __post_init__(self):
        for name in ("eta_d", "eta_c", "eta_b", "dark_rate"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} must lie in [0, 1]")

    @property
    def per_atom(self) -> float:
        """Probability that one atom's photon reaches a detector and clicks."""
        return self.eta_b * self.eta_c * self.eta_d

    @classmethod
    def from_config(cls, cfg: Mapping) -> EfficiencyModel:
        known = {"eta_d", "eta_c", "eta_b", "dark_rate"}
        unknown = set(cfg) - known
        if unknown:
            raise ValueError(f"unknown efficiency keys: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in cfg.items()})


def success_probability(eff: EfficiencyModel) -> float:
    """eta_d^2 eta_c^2 eta_b^2 / 4."""
    return eff.eta_d ** 2 * eff.eta_c ** 2 * eff.eta_b ** 2 / 4.0


def _is_mode(label: str) -> bool:
    return not label.startswith("atom")


def photon_number(state: JointState, levels) -> int:
    return sum(lv for label, lv in zip(state.labels, levels) if _is_mode(label))


@lru_cache(maxsize=None)
def _two_mode_unitary(u_key: tuple, cutoff: int = MAX_PHOTONS) -> np.ndarray:
    """Fock-space action of a 2x2 mode transformation, occupations 0..cutoff.

    Input mode creators map as a^+ -> u00 c^+ + u10 d^+, b^+ -> u01 c^+ + u11 d^+.
    Blocks with more than ``cutoff`` photons in total are left as identity.
    """
    u = np.array(u_key, dtype=complex).reshape(2, 2)
    dim = cutoff + 1
    out = np.zeros((dim * dim, dim * dim), dtype=complex)
    for n1, n2 in itertools.product(range(dim), repeat=2):
        col = n1 * dim + n2
        if n1 + n2 > cutoff:
            out[col, col] = 1.0
            continue
        norm = 1.0 / math.sqrt(math.factorial(n1) * math.factorial(n2))
        for k in range(n1 + 1):
            for m in range(n2 + 1):
                p = k + m  # photons into c
                q = n1 + n2 - p
                coeff = (math.comb(n1, k) * u[0, 0] ** k * u[1, 0] ** (n1 - k)
                         * math.comb(n2, m) * u[0, 1] ** m * u[1, 1] ** (n2 - m))
                out[p * dim + q, col] += coeff * norm * math.sqrt(
                    math.factorial(p) * math.factorial(q))
    return out


def two_mode_unitary(u: np.ndarray) -> np.ndarray:
    return _two_mode_unitary(tuple(np.asarray(u, dtype=complex).ravel()))


def _check_truncation(state: JointState) -> None:
    mode_axes = [i for i, label in enumerate(state.labels) if _is_mode(label)]
    if not mode_axes:
        return
    grids = np.meshgrid(*[np.arange(state.dims[i]) for i in mode_axes], indexing="ij")
    total = sum(grids)
    psi = np.moveaxis(state.tensor(), mode_axes, range(len(mode_axes)))
    over = np.abs(psi[total > MAX_PHOTONS]) ** 2
    if over.sum() > NULL_PROBABILITY:
        raise ValueError(f"more than {MAX_PHOTONS} photons in the interferometer")


def beam_splitter(state: JointState) -> JointState:
    """Interfere every ``arm1_<s>`` mode with its ``arm2_<s>`` partner.

    Output modes are renamed ``d1_<s>`` and ``d2_<s>`` (detector ports).
    """
    _check_truncation(state)
    pairs = [(label, "arm2" + label[4:]) for label in state.labels
             if label.startswith("arm1")]
    if not pairs:
        raise ValueError("no arm1/arm2 mode pairs in state")
    u9 = two_mode_unitary(BEAM_SPLITTER)
    mapping = {}
    for a, b in pairs:
        if b not in state.labels:
            raise ValueError(f"mode {a} has no partner {b}")
        state = apply(state, [a, b], u9)
        mapping[a] = "d1" + a[4:]
        mapping[b] = "d2" + b[4:]
    return relabel(state, mapping)


def apply_mode_phases(state: JointState, phases: Mapping[str, float]) -> JointState:
    """Phase shift exp(i n phi) on each named mode with occupation n."""
    for label, phi in phases.items():
        dim = state.dims[state.index_of(label)]
        state = apply(state, [label], np.diag(np.exp(1j * phi * np.arange(dim))))
    return state


def detector_counts(labels, levels) -> tuple[int, int]:
    d1 = sum(lv for label, lv in zip(labels, levels) if label.startswith("d1"))
    d2 = sum(lv for label, lv in zip(labels, levels) if label.startswith("d2"))
    return d1, d2


def pattern_probabilities(state: JointState) -> dict[tuple[int, int], float]:
    """Distribution of (D1 count, D2 count) for a detector-port state."""
    probs: dict[tuple[int, int], float] = {}
    weights = np.abs(state.amplitudes) ** 2
    for levels, w in zip(state.basis_labels(), weights):
        if w == 0:
            continue
        key = detector_counts(state.labels, levels)
        probs[key] = probs.get(key, 0.0) + float(w)
    return probs


def herald(state: JointState, pattern: tuple[int, int] = (1, 1),
           keep=ATOM_LABELS) -> tuple[np.ndarray, float]:
    """Atomic density matrix heralded by a detector pattern (unnormalized)."""
    traced = [label for label in state.labels if label not in keep]
    return conditional_density(
        state, keep, lambda levels: detector_counts(traced, levels) == tuple(pattern))


def _temporal_basis(overlap: complex) -> tuple[np.ndarray, np.ndarray]:
    """Two-mode temporal amplitudes whose inner product is ``overlap``."""
    j = complex(overlap)
    if abs(j) > 1 + 1e-12:
        raise ValueError("|overlap| must not exceed 1")
    s = math.sqrt(max(0.0, 1.0 - abs(j) ** 2))
    return np.array([1.0, 0.0]), np.array([j, s])


def interfere(atom1: AtomQubit, atom2: AtomQubit, overlap: complex | None = None,
              phases: Mapping[str, float] | None = None) -> JointState:
    """Full Fock simulation up to the detectors.

    ``overlap`` is the inner product of the two photons' temporal envelopes;
    when given, each frequency mode carries two explicit temporal basis modes.
    ``phases`` maps arm-mode labels to path phases applied before the beam
    splitter.
    """
    if overlap is None:
        s1 = excite_and_decay_pi_filtered(atom1, 1)
        s2 = excite_and_decay_pi_filtered(atom2, 2)
    else:
        env1, env2 = _temporal_basis(overlap)
        s1 = excite_and_decay_pi_filtered(atom1, 1, temporal=env1)
        s2 = excite_and_decay_pi_filtered(atom2, 2, temporal=env2)
    joint = tensor(s1, s2)
    modes = sorted(label for label in joint.labels if _is_mode(label))
    joint = reorder(joint, list(ATOM_LABELS) + modes)
    if phases:
        joint = apply_mode_phases(joint, phases)
    return beam_splitter(joint)


@dataclass(frozen=True)
class GateResult:
    """Conditioned two-atom state and the (1,1) coincidence probability."""

    state: JointState | None
    probability: float
    density: np.ndarray | None = None

    @property
    def is_null(self) -> bool:
        return self.state is None and self.density is None


def _pure_from_density(rho: np.ndarray) -> JointState:
    vals, vecs = np.linalg.eigh(rho)
    if abs(vals[-1] - 1.0) > PURITY_ATOL:
        raise ValueError(f"conditioned state is mixed (top eigenvalue {vals[-1]:.6g})")
    vec = vecs[:, -1]
    # fix the global phase: largest-magnitude amplitude real positive
    k = int(np.argmax(np.abs(vec)))
    vec = vec * abs(vec[k]) / vec[k]
    return JointState(tuple((label, 2) for label in ATOM_LABELS), vec)


def zz_measurement_gate(atom1: AtomQubit, atom2: AtomQubit,
                        phases: Mapping[str, float] | None = None) -> GateResult:
    """Ideal-optics gate: Fock simulation, beam splitter, (1,1) herald."""
    rho, p = herald(interfere(atom1, atom2, phases=phases))
    if p <= NULL_PROBABILITY:
        return GateResult(None, p)
    rho = rho / p
    return GateResult(_pure_from_density(rho), p, rho)


def fock_conditioned_density(atom1: AtomQubit, atom2: AtomQubit,
                             overlap: complex) -> tuple[np.ndarray, float]:
    """Heralded density matrix from the explicit temporal-mode simulation."""
    return herald(interfere(atom1, atom2, overlap=overlap))


def conditioned_density(c: np.ndarray, d: np.ndarray,
                        overlap: complex = 1.0) -> tuple[np.ndarray, float]:
    """Closed-form (1,1)-heralded atomic density matrix, unnormalized.

    rho = 1/2 (v v^+) * (I - |J|^2 SWAP) elementwise, with v = c (x) d.
    Only |J|^2 enters: the detectors integrate over time and frequency.  With
    |J| < 1 the same-frequency branches |00>, |11> also herald, with weight
    (1 - |J|^2)/2.  Returns ``(rho, trace)``; the trace is the coincidence
    probability.
    """
    v = np.kron(np.asarray(c, dtype=complex), np.asarray(d, dtype=complex))
    mask = np.eye(4) - abs(overlap) ** 2 * SWAP_2Q
    rho = 0.5 * np.outer(v, v.conj()) * mask
    return rho, float(np.trace(rho).real)


def coincidence_probability(c: np.ndarray, d: np.ndarray, overlap=1.0) -> np.ndarray:
    """Vectorized trace of :func:`conditioned_density` over leading axes."""
    c = np.asarray(c)
    d = np.asarray(d)
    c0, c1 = c[..., 0], c[..., 1]
    d0, d1 = d[..., 0], d[..., 1]
    j2 = np.abs(overlap) ** 2
    return (0.5 * (np.abs(c0 * d1) ** 2 + np.abs(c1 * d0) ** 2)
            + 0.5 * (1.0 - j2) * (np.abs(c0 * d0) ** 2 + np.abs(c1 * d1) ** 2))


def ideal_output(atom1: AtomQubit, atom2: AtomQubit) -> JointState | None:
    """Normalized c0 d1|01> - c1 d0|10>, or None when it vanishes."""
    vec = np.array([0.0, atom1.c0 * atom2.c1, -atom1.c1 * atom2.c0, 0.0])
    if np.vdot(vec, vec).real <= NULL_PROBABILITY:
        return None
    return JointState(tuple((label, 2) for label in ATOM_LABELS), vec).normalized()


class Status(enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"


class FailureReason(enum.Enum):
    SIGMA_DECAY = "sigma_decay"
    NOT_COLLECTED = "not_collected"
    NOT_DETECTED = "not_detected"
    NO_COINCIDENCE = "no_coincidence"


@dataclass(frozen=True)
class GateOutcome:
    status: Status
    detector_pattern: tuple[int, int]
    failure_reason: FailureReason | None = None
    post_state: JointState | None = None
    density: np.ndarray | None = None
    # (1,1) pattern completed by a dark count; the atomic state is not heralded
    false_herald: bool = False

    @property
    def success(self) -> bool:
        return self.status is Status.SUCCESS


def _photon_fate(eff: EfficiencyModel, rng: np.random.Generator) -> FailureReason | None:
    if rng.random() >= eff.eta_b:
        return FailureReason.SIGMA_DECAY
    if rng.random() >= eff.eta_c:
        return FailureReason.NOT_COLLECTED
    if rng.random() >= eff.eta_d:
        return FailureReason.NOT_DETECTED
    return None


def run_gate_attempt(atom1: AtomQubit, atom2: AtomQubit, eff: EfficiencyModel,
                     overlap: complex, rng: np.random.Generator) -> GateOutcome:
    """One stochastic gate attempt including losses and imperfect overlap.

    Draw order per attempt: atom 1 photon fate (pi decay, collection,
    detection), atom 2 photon fate, detector pattern, dark counts.
    """
    if abs(overlap) > 1 + 1e-12:
        raise ValueError("|overlap| must not exceed 1")
    fates = [_photon_fate(eff, rng), _photon_fate(eff, rng)]
    detected = sum(f is None for f in fates)
    rho = None
    if detected == 2:
        rho, p11 = conditioned_density(atom1.vector, atom2.vector, overlap)
        u = rng.random()
        if u < p11:
            pattern = (1, 1)
        else:
            # bunched events split evenly between the two detectors
            pattern = (2, 0) if u < p11 + (1.0 - p11) / 2 else (0, 2)
    elif detected == 1:
        pattern = (1, 0) if rng.random() < 0.5 else (0, 1)
    else:
        pattern = (0, 0)
    if eff.dark_rate > 0:
        dark = rng.random(2) < eff.dark_rate
        pattern = (pattern[0] + int(dark[0]), pattern[1] + int(dark[1]))
    if pattern != (1, 1):
        reason = next((f for f in fates if f is not None), FailureReason.NO_COINCIDENCE)
        return GateOutcome(Status.FAILURE, pattern, reason)
    if detected < 2:
        return GateOutcome(Status.SUCCESS, pattern, false_herald=True)
    rho = rho / np.trace(rho).real
    post = _pure_from_density(rho) if abs(overlap) >= 1 - 1e-12 else None
    return GateOutcome(Status.SUCCESS, pattern, post_state=post, density=rho)


def simulate_success_count(n_attempts: int, eff: EfficiencyModel, overlap: complex,
                           rng: np.random.Generator,
                           atoms: tuple[AtomQubit, AtomQubit] | None = None) -> int:
    """Vectorized batch of gate attempts; returns the number of (1,1) heralds.

    Same stages as :func:`run_gate_attempt`.  With ``atoms=None`` every
    attempt draws a fresh Haar-random pair of input qubits.
    """
    if atoms is None:
        c = haar_amplitudes(rng, n_attempts)
        d = haar_amplitudes(rng, n_attempts)
    else:
        c = np.broadcast_to(atoms[0].vector, (n_attempts, 2))
        d = np.broadcast_to(atoms[1].vector, (n_attempts, 2))
    through = rng.random((n_attempts, 2, 3)) < np.array([eff.eta_b, eff.eta_c, eff.eta_d])
    n_real = through.all(axis=2).sum(axis=1)
    p11 = coincidence_probability(c, d, overlap)
    u = rng.random(n_attempts)
    split = rng.random(n_attempts) < 0.5
    d1 = np.where(n_real == 2, np.where(u < p11, 1, np.where(u < p11 + (1 - p11) / 2, 2, 0)),
                  np.where(n_real == 1, split.astype(int), 0))
    d2 = n_real - d1
    if eff.dark_rate > 0:
        dark = rng.random((n_attempts, 2)) < eff.dark_rate
        d1 = d1 + dark[:, 0]
        d2 = d2 + dark[:, 1]
    return int(np.count_nonzero((d1 == 1) & (d2 == 1)))
