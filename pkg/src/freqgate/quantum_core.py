"""Dense state vectors over labeled tensor factors.

A :class:`JointState` is an immutable amplitude vector together with an
ordered list of ``(label, dimension)`` factors.  Atoms are two-level
factors, photonic modes are Fock factors truncated at occupation 2.
Amplitudes are indexed row-major in factor order.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .tolerances import DUMP_CUTOFF, NORM_ATOL, NULL_PROBABILITY

ATOM_DIM = 2
MODE_DIM = 3

Factor = tuple[str, int]


@dataclass(frozen=True, eq=False)
class JointState:
    factors: tuple[Factor, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        factors = tuple((str(label), int(dim)) for label, dim in self.factors)
        labels = [label for label, _ in factors]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate subsystem labels in {labels}")
        if any(dim < 1 for _, dim in factors):
            raise ValueError(f"factor dimensions must be positive: {factors}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        expected = math.prod(dim for _, dim in factors)
        if amps.size != expected:
            raise ValueError(
                f"amplitude vector has length {amps.size}, factors need {expected}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "factors", factors)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_terms(cls, factors: Sequence[Factor],
                   terms: Mapping[tuple[int, ...], complex]) -> JointState:
        """Build a state from ``{levels: amplitude}``; unlisted levels are 0."""
        dims = tuple(d for _, d in factors)
        amps = np.zeros(dims, dtype=complex)
        for levels, amp in terms.items():
            amps[tuple(levels)] += amp
        return cls(tuple(factors), amps)

    @classmethod
    def basis(cls, factors: Sequence[Factor], levels: Sequence[int]) -> JointState:
        return cls.from_terms(factors, {tuple(levels): 1.0})

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm2 - 1.0) < NORM_ATOL

    def tensor(self) -> np.ndarray:
        """Amplitudes reshaped to one axis per factor (read-only view)."""
        return self.amplitudes.reshape(self.dims)

    def amplitude(self, levels: Sequence[int]) -> complex:
        return complex(self.tensor()[tuple(levels)])

    def basis_labels(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(*(range(d) for d in self.dims))

    def normalized(self) -> JointState:
        n2 = self.norm2
        if n2 <= NULL_PROBABILITY:
            raise ValueError("cannot normalize a null state")
        return JointState(self.factors, self.amplitudes / math.sqrt(n2))

    def scaled(self, factor: complex) -> JointState:
        return JointState(self.factors, self.amplitudes * factor)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no subsystem {label!r} in {self.labels}") from None

    def to_json(self) -> str:
        """Debug dump: ``[[basis-label, re, im], ...]`` skipping tiny amplitudes."""
        rows = []
        for levels in self.basis_labels():
            amp = self.amplitude(levels)
            if abs(amp) < DUMP_CUTOFF:
                continue
            name = ",".join(f"{label}={lv}" for label, lv in zip(self.labels, levels))
            rows.append([name, amp.real, amp.imag])
        return json.dumps(rows)

    def __repr__(self) -> str:
        return f"JointState(labels={self.labels}, norm2={self.norm2:.6g})"


def qubit(c0: complex, c1: complex, label: str) -> JointState:
    return JointState(((label, ATOM_DIM),), [c0, c1])


def tensor(a: JointState, b: JointState) -> JointState:
    """Kronecker product, factors of ``a`` first."""
    overlap = set(a.labels) & set(b.labels)
    if overlap:
        raise ValueError(f"subsystems {sorted(overlap)} appear in both states")
    return JointState(a.factors + b.factors, np.kron(a.amplitudes, b.amplitudes))


def tensor_all(states: Iterable[JointState]) -> JointState:
    out = None
    for state in states:
        out = state if out is None else tensor(out, state)
    if out is None:
        raise ValueError("need at least one state")
    return out


def reorder(state: JointState, labels: Sequence[str]) -> JointState:
    """Permute factors into the given label order."""
    if sorted(labels) != sorted(state.labels):
        raise ValueError(f"{labels} is not a permutation of {state.labels}")
    axes = [state.index_of(label) for label in labels]
    amps = np.transpose(state.tensor(), axes)
    return JointState(tuple(state.factors[i] for i in axes), amps)


def relabel(state: JointState, mapping: Mapping[str, str]) -> JointState:
    factors = tuple((mapping.get(label, label), dim) for label, dim in state.factors)
    return JointState(factors, state.amplitudes)


def apply(state: JointState, labels: Sequence[str], operator: np.ndarray) -> JointState:
    """Apply a (not necessarily unitary) operator on the named factors."""
    axes = [state.index_of(label) for label in labels]
    sub_dims = [state.dims[i] for i in axes]
    size = math.prod(sub_dims)
    op = np.asarray(operator, dtype=complex)
    if op.shape != (size, size):
        raise ValueError(f"operator shape {op.shape} does not match dims {sub_dims}")
    psi = np.moveaxis(state.tensor(), axes, range(len(axes)))
    rest = psi.shape[len(axes):]
    psi = (op @ psi.reshape(size, -1)).reshape(tuple(sub_dims) + rest)
    psi = np.moveaxis(psi, range(len(axes)), axes)
    return JointState(state.factors, psi)


@dataclass(frozen=True)
class Projection:
    """Unnormalized residual after projecting onto a target vector.

    ``probability`` is the squared norm of the projection relative to the
    input norm; a probability below ``NULL_PROBABILITY`` flags a null result.
    """

    residual: JointState
    probability: float

    @property
    def is_null(self) -> bool:
        return self.probability <= NULL_PROBABILITY

    def normalized(self) -> JointState:
        if self.is_null:
            raise ValueError("null projection has no normalized state")
        return self.residual.normalized()


def project(state: JointState,
            targets: Sequence[tuple[Sequence[str], np.ndarray | Sequence[complex]]]
            ) -> Projection:
    """Contract ``<target|`` against the named factors, for each target in turn.

    Each target vector is given over its factors in the listed order and must
    be normalized.  The residual lives on the remaining factors.
    """
    total = state.norm2
    current = state
    for labels, target in targets:
        labels = list(labels)
        vec = np.asarray(target, dtype=complex).reshape(-1)
        if abs(np.vdot(vec, vec).real - 1.0) > NORM_ATOL:
            raise ValueError("projection target must be normalized")
        axes = [current.index_of(label) for label in labels]
        size = math.prod(current.dims[i] for i in axes)
        if vec.size != size:
            raise ValueError(f"target has length {vec.size}, factors need {size}")
        psi = np.moveaxis(current.tensor(), axes, range(len(axes))).reshape(size, -1)
        residual = vec.conj() @ psi
        keep = tuple(f for i, f in enumerate(current.factors) if i not in axes)
        current = JointState(keep, residual)
    probability = current.norm2 / total if total > 0 else 0.0
    return Projection(current, probability)


def conditional_density(state: JointState, keep: Sequence[str],
                        accept: Callable[[tuple[int, ...]], bool]
                        ) -> tuple[np.ndarray, float]:
    """Density matrix on ``keep`` conditioned on the traced factors' outcome.

    The traced-out factors are measured in their number basis; ``accept``
    receives their levels (in state order) and selects which outcomes herald.
    Returns the unnormalized density matrix and its trace.
    """
    keep = list(keep)
    keep_axes = [state.index_of(label) for label in keep]
    traced_axes = [i for i in range(len(state.factors)) if i not in keep_axes]
    keep_size = math.prod(state.dims[i] for i in keep_axes)
    traced_dims = [state.dims[i] for i in traced_axes]
    psi = np.transpose(state.tensor(), keep_axes + traced_axes).reshape(keep_size, -1)
    mask = np.fromiter(
        (accept(levels) for levels in itertools.product(*(range(d) for d in traced_dims))),
        dtype=bool, count=psi.shape[1])
    sel = psi[:, mask]
    rho = sel @ sel.conj().T
    return rho, float(np.trace(rho).real)


def fidelity_up_to_global_phase(a: JointState, b: JointState) -> float:
    """|<a|b>|^2 for states on identical factor lists."""
    if a.factors != b.factors:
        raise ValueError(f"basis mismatch: {a.factors} vs {b.factors}")
    overlap = np.vdot(a.amplitudes, b.amplitudes)
    f = abs(overlap) ** 2 / (a.norm2 * b.norm2)
    return float(min(max(f, 0.0), 1.0))
