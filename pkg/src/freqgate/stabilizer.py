"""Binary symplectic Pauli strings and stabilizer tableaux.

A Pauli string is stored as ``i^r * prod_j X_j^{x_j} Z_j^{z_j}`` so that
multiplication is exact: the product of two strings adds ``2 * (z1 . x2)``
to the phase exponent.  Y on a qubit is ``x = z = 1`` with one extra factor
of i, since ``Y = i X Z``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_LETTER_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1), "_": (0, 0)}
_PHASE_PREFIX = {"+i": 1, "-i": 3, "+": 0, "-": 2, "i": 1}
_PHASE_STR = {0: "+", 1: "+i", 2: "-", 3: "-i"}


@dataclass(eq=False)
class PauliString:
    x: np.ndarray
    z: np.ndarray
    r: int = 0

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.uint8) & 1
        self.z = np.asarray(self.z, dtype=np.uint8) & 1
        if self.x.shape != self.z.shape or self.x.ndim != 1:
            raise ValueError("x and z must be equal-length bit vectors")
        self.r = int(self.r) % 4

    @classmethod
    def from_str(cls, text: str) -> PauliString:
        """Parse strings such as ``"-XZIY"`` or ``"+iZ_Z"``."""
        text = text.strip()
        r = 0
        for prefix in ("+i", "-i", "+", "-", "i"):
            if text.startswith(prefix):
                r = _PHASE_PREFIX[prefix]
                text = text[len(prefix):]
                break
        try:
            bits = [_LETTER_BITS[ch] for ch in text.upper()]
        except KeyError as err:
            raise ValueError(f"bad Pauli letter {err} in {text!r}") from None
        x = np.array([b[0] for b in bits], dtype=np.uint8)
        z = np.array([b[1] for b in bits], dtype=np.uint8)
        return cls(x, z, r + int(np.sum(x & z)))

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8))

    @classmethod
    def single(cls, n: int, ops: dict[int, str], sign: int = 1) -> PauliString:
        letters = ["I"] * n
        for q, letter in ops.items():
            letters[q] = letter
        p = cls.from_str("".join(letters))
        if sign == -1:
            p.r = (p.r + 2) % 4
        return p

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def display_phase(self) -> int:
        """Phase exponent in front of the X/Y/Z letter form."""
        return (self.r - int(np.sum(self.x & self.z))) % 4

    @property
    def sign(self) -> int:
        ph = self.display_phase
        if ph % 2:
            raise ValueError(f"{self} is not Hermitian")
        return 1 if ph == 0 else -1

    def letters(self) -> str:
        return "".join("IXZY"[xb + 2 * zb] for xb, zb in zip(self.x, self.z))

    def __str__(self) -> str:
        return _PHASE_STR[self.display_phase] + self.letters()

    __repr__ = __str__

    def __eq__(self, other) -> bool:
        return (isinstance(other, PauliString) and self.r == other.r
                and np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z))

    def __mul__(self, other: PauliString) -> PauliString:
        r = self.r + other.r + 2 * int(np.sum(self.z & other.x))
        return PauliString(self.x ^ other.x, self.z ^ other.z, r)

    def __neg__(self) -> PauliString:
        return PauliString(self.x.copy(), self.z.copy(), self.r + 2)

    def commutes(self, other: PauliString) -> bool:
        return (int(np.sum(self.x & other.z)) + int(np.sum(self.z & other.x))) % 2 == 0

    def same_operator(self, other: PauliString) -> bool:
        """Equal up to phase."""
        return np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)

    def extended(self, n_before: int, n_after: int) -> PauliString:
        pad = lambda v: np.concatenate([np.zeros(n_before, np.uint8), v,
                                        np.zeros(n_after, np.uint8)])
        return PauliString(pad(self.x), pad(self.z), self.r)

    def to_matrix(self) -> np.ndarray:
        x_m = np.array([[0, 1], [1, 0]], dtype=complex)
        z_m = np.array([[1, 0], [0, -1]], dtype=complex)
        out = np.array([[1j ** self.r]])
        for xb, zb in zip(self.x, self.z):
            out = np.kron(out, np.linalg.matrix_power(x_m, xb) @ np.linalg.matrix_power(z_m, zb))
        return out

    def apply_to_vector(self, vec: np.ndarray) -> np.ndarray:
        """Act on a 2^n state vector; qubit 0 is the most significant bit."""
        n = self.n
        idx = np.arange(2 ** n)
        bits = (idx[:, None] >> (n - 1 - np.arange(n))) & 1
        z_sign = (-1.0) ** ((bits & self.z).sum(axis=1) % 2)
        x_mask = int("".join(map(str, self.x)), 2) if n else 0
        out = np.empty_like(vec, dtype=complex)
        out[idx ^ x_mask] = z_sign * vec
        return (1j ** self.r) * out


def gf2_rank(mat: np.ndarray) -> int:
    m = np.array(mat, dtype=np.uint8) & 1
    rank = 0
    rows, cols = m.shape
    for c in range(cols):
        pivots = np.nonzero(m[rank:, c])[0]
        if pivots.size == 0:
            continue
        p = rank + pivots[0]
        m[[rank, p]] = m[[p, rank]]
        others = np.nonzero(m[:, c])[0]
        others = others[others != rank]
        m[others] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def gf2_solve(a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """Solve ``s @ a = b`` over GF(2); None when inconsistent."""
    a = np.asarray(a, dtype=np.uint8) & 1
    b = np.asarray(b, dtype=np.uint8) & 1
    n_rows = a.shape[0]
    # augmented system a^T s = b
    aug = np.concatenate([a.T, b[:, None]], axis=1)
    pivot_cols = []
    rank = 0
    for c in range(n_rows):
        pivots = np.nonzero(aug[rank:, c])[0]
        if pivots.size == 0:
            continue
        p = rank + pivots[0]
        aug[[rank, p]] = aug[[p, rank]]
        others = np.nonzero(aug[:, c])[0]
        others = others[others != rank]
        aug[others] ^= aug[rank]
        pivot_cols.append(c)
        rank += 1
        if rank == aug.shape[0]:
            break
    if np.any(aug[rank:, -1]):
        return None
    s = np.zeros(n_rows, dtype=np.uint8)
    for i, c in enumerate(pivot_cols):
        s[c] = aug[i, -1]
    return s


class StabilizerTableau:
    """``n`` independent commuting generators over ``n`` qubits."""

    def __init__(self, x: np.ndarray, z: np.ndarray, r: np.ndarray):
        self.x = np.array(x, dtype=np.uint8) & 1
        self.z = np.array(z, dtype=np.uint8) & 1
        self.r = np.array(r, dtype=np.int64) % 4
        if self.x.shape != self.z.shape or self.x.shape[0] != self.r.size:
            raise ValueError("inconsistent tableau shapes")

    @classmethod
    def from_paulis(cls, paulis) -> StabilizerTableau:
        paulis = [PauliString.from_str(p) if isinstance(p, str) else p for p in paulis]
        return cls(np.array([p.x for p in paulis]), np.array([p.z for p in paulis]),
                   np.array([p.r for p in paulis]))

    @classmethod
    def zero_state(cls, n: int) -> StabilizerTableau:
        return cls(np.zeros((n, n)), np.eye(n), np.zeros(n))

    @classmethod
    def plus_state(cls, n: int) -> StabilizerTableau:
        return cls(np.eye(n), np.zeros((n, n)), np.zeros(n))

    @property
    def n(self) -> int:
        return self.x.shape[1]

    def copy(self) -> StabilizerTableau:
        return StabilizerTableau(self.x.copy(), self.z.copy(), self.r.copy())

    def row(self, i: int) -> PauliString:
        return PauliString(self.x[i].copy(), self.z[i].copy(), int(self.r[i]))

    def generators(self) -> list[PauliString]:
        return [self.row(i) for i in range(self.x.shape[0])]

    def __str__(self) -> str:
        return "\n".join(str(g) for g in self.generators())

    def _set_row(self, i: int, p: PauliString) -> None:
        self.x[i], self.z[i], self.r[i] = p.x, p.z, p.r

    def direct_sum(self, other: StabilizerTableau) -> StabilizerTableau:
        n1, n2 = self.n, other.n
        x = np.zeros((n1 + n2, n1 + n2), np.uint8)
        z = np.zeros_like(x)
        x[:n1, :n1], z[:n1, :n1] = self.x, self.z
        x[n1:, n1:], z[n1:, n1:] = other.x, other.z
        return StabilizerTableau(x, z, np.concatenate([self.r, other.r]))

    # -- validity --------------------------------------------------------
    def all_commute(self) -> bool:
        sym = (self.x.astype(int) @ self.z.T.astype(int) + self.z.astype(int) @ self.x.T) % 2
        return not sym.any()

    def rank(self) -> int:
        return gf2_rank(np.concatenate([self.x, self.z], axis=1))

    def all_hermitian(self) -> bool:
        return all(g.display_phase % 2 == 0 for g in self.generators())

    def is_valid(self) -> bool:
        return (self.x.shape[0] == self.n and self.all_commute()
                and self.rank() == self.n and self.all_hermitian())

    # -- Clifford gates (conjugation of every generator) -----------------
    def h(self, q: int) -> None:
        self.r = (self.r + 2 * (self.x[:, q] & self.z[:, q])) % 4
        self.x[:, q], self.z[:, q] = self.z[:, q].copy(), self.x[:, q].copy()

    def s(self, q: int) -> None:
        self.r = (self.r + self.x[:, q]) % 4
        self.z[:, q] ^= self.x[:, q]

    def cnot(self, c: int, t: int) -> None:
        self.x[:, t] ^= self.x[:, c]
        self.z[:, c] ^= self.z[:, t]

    def cz(self, a: int, b: int) -> None:
        self.h(b)
        self.cnot(a, b)
        self.h(b)

    def pauli_x(self, q: int) -> None:
        self.r = (self.r + 2 * self.z[:, q]) % 4

    def pauli_z(self, q: int) -> None:
        self.r = (self.r + 2 * self.x[:, q]) % 4

    def apply_pauli(self, p: PauliString) -> None:
        """Conjugate the state by a Pauli operator (sign flips only)."""
        flips = ((self.x.astype(int) @ p.z.astype(int)) + (self.z.astype(int) @ p.x.astype(int))) % 2
        self.r = (self.r + 2 * flips) % 4

    # -- measurement ------------------------------------------------------
    def expectation(self, p: PauliString) -> int:
        """+1/-1 if ``p`` (or -p) is in the stabilizer group, else 0."""
        if not all(p.commutes(g) for g in self.generators()):
            return 0
        s = gf2_solve(np.concatenate([self.x, self.z], axis=1), np.concatenate([p.x, p.z]))
        if s is None:
            raise ValueError("commuting Pauli not generated by a full-rank tableau")
        prod = PauliString.identity(self.n)
        for i in np.nonzero(s)[0]:
            prod = prod * self.row(i)
        return 1 if prod.r == p.r else -1

    def measure(self, p: PauliString, outcome: int | None = None,
                rng: np.random.Generator | None = None) -> tuple[int, bool]:
        """Projectively measure a Hermitian Pauli; returns ``(outcome, was_random)``.

        For a random outcome, ``outcome`` forces the branch (post-selection);
        otherwise ``rng`` draws it.  Forcing the impossible branch of a
        deterministic measurement raises ``ValueError``.
        """
        if p.n != self.n:
            raise ValueError("Pauli length does not match tableau")
        p.sign  # raises for non-Hermitian input
        anti = [i for i in range(self.x.shape[0]) if not p.commutes(self.row(i))]
        if not anti:
            value = self.expectation(p)
            if outcome is not None and outcome != value:
                raise ValueError(f"outcome {outcome} has zero probability (state has {value})")
            return value, False
        if outcome is None:
            if rng is None:
                raise ValueError("random outcome needs an rng or a forced outcome")
            outcome = 1 if rng.random() < 0.5 else -1
        if outcome not in (1, -1):
            raise ValueError("outcome must be +1 or -1")
        first = anti[0]
        g = self.row(first)
        for i in anti[1:]:
            self._set_row(i, self.row(i) * g)
        self._set_row(first, p if outcome == 1 else -p)
        return outcome, True

    def measure_zz(self, a: int, b: int, outcome: int | None = -1,
                   rng: np.random.Generator | None = None) -> tuple[int, bool]:
        if a == b:
            raise ValueError("ZZ measurement needs two distinct qubits")
        return self.measure(PauliString.single(self.n, {a: "Z", b: "Z"}), outcome, rng)

    # -- dense conversion -------------------------------------------------
    def to_statevector(self) -> np.ndarray:
        """Stabilized state (arbitrary global phase); small n only."""
        n = self.n
        if n > 14:
            raise ValueError("state vector too large")
        gens = self.generators()
        for start in range(2 ** n):
            vec = np.zeros(2 ** n, dtype=complex)
            vec[start] = 1.0
            for g in gens:
                vec = (vec + g.apply_to_vector(vec)) / 2
            norm = np.linalg.norm(vec)
            if norm > 1e-6:
                return vec / norm
        raise ValueError("tableau stabilizes no state")
