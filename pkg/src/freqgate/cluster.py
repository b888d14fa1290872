"""Linear cluster chains joined by probabilistic ZZ measurement gates.

Measuring Z_n Z_{n+1} on the boundary qubits of two chains of lengths
``n_a`` and ``n_b`` fuses them into one chain of ``n_a + n_b - 1`` logical
qubits; the two boundary qubits form a repetition-code logical qubit with
X_L = X_n X_{n+1} and Z_L = Z_n.  A failed attempt costs
``failure_cost_per_chain`` logical qubits from each boundary, so with success
probability p the merged length averages
``sum_i (2n - 1 - 4i) p (1-p)^i ~= 2n - n_c`` with ``n_c = 1 + 4(1-p)/p``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .stabilizer import PauliString, StabilizerTableau


@dataclass
class Fusion:
    """Two physical qubits fused by a ZZ measurement with the given outcome."""

    qubits: tuple[int, int]
    outcome: int
    x_logical: PauliString
    z_logical: PauliString


@dataclass
class ClusterChain:
    """A stabilizer tableau plus the bookkeeping of one linear chain.

    ``frame`` holds byproduct Paulis that are tracked rather than applied:
    the physical state is ``frame`` times the tableau's state.
    """

    tableau: StabilizerTableau
    active: list[int]
    fusions: list[Fusion] = field(default_factory=list)
    frame: PauliString | None = None

    def __post_init__(self):
        if self.frame is None:
            self.frame = PauliString.identity(self.tableau.n)

    @property
    def n_physical(self) -> int:
        return self.tableau.n

    def logical_sites(self) -> list[list[int]]:
        """Active qubits grouped into logical sites, in chain order."""
        linked = {frozenset(f.qubits) for f in self.fusions}
        sites: list[list[int]] = []
        for q in self.active:
            if sites and frozenset((sites[-1][-1], q)) in linked:
                sites[-1].append(q)
            else:
                sites.append([q])
        return sites

    @property
    def length(self) -> int:
        return len(self.logical_sites())

    def measure_zz(self, a: int, b: int, outcome: int | None = -1,
                   rng: np.random.Generator | None = None) -> int:
        for q in (a, b):
            if q not in self.active:
                raise ValueError(f"qubit {q} is not active in this chain")
        value, _ = self.tableau.measure_zz(a, b, outcome, rng)
        return value

    def validate(self) -> None:
        if not self.tableau.is_valid():
            raise AssertionError("tableau lost commutation, rank or hermiticity")
        for f in self.fusions:
            zz = PauliString.single(self.n_physical, {f.qubits[0]: "Z", f.qubits[1]: "Z"})
            if self.tableau.expectation(zz) != f.outcome:
                raise AssertionError(f"fusion {f.qubits} no longer has Z Z = {f.outcome}")
            if f.x_logical.commutes(f.z_logical):
                raise AssertionError("logical X and Z must anticommute")
            if not (f.x_logical.commutes(zz) and f.z_logical.commutes(zz)):
                raise AssertionError("logical operators must preserve the code space")


def make_chain(n: int) -> ClusterChain:
    """1D cluster state with generators Z_{i-1} X_i Z_{i+1}."""
    if n < 1:
        raise ValueError("chain length must be at least 1")
    x = np.eye(n, dtype=np.uint8)
    z = np.zeros((n, n), dtype=np.uint8)
    for i in range(n):
        if i > 0:
            z[i, i - 1] = 1
        if i < n - 1:
            z[i, i + 1] = 1
    return ClusterChain(StabilizerTableau(x, z, np.zeros(n)), list(range(n)))


def _shift(p: PauliString, before: int, after: int) -> PauliString:
    return p.extended(before, after)


def merge_chains(chain_a: ClusterChain, chain_b: ClusterChain,
                 outcome: int | None = -1,
                 rng: np.random.Generator | None = None) -> ClusterChain:
    """Fuse the last qubit of ``chain_a`` with the first qubit of ``chain_b``.

    Keeps the -1 branch by default, as the optical gate heralds it, and
    records the gate's Z byproduct on the first boundary qubit in the frame.
    """
    if not chain_a.active or not chain_b.active:
        raise ValueError("cannot merge an exhausted chain")
    na, nb = chain_a.n_physical, chain_b.n_physical
    tab = chain_a.tableau.direct_sum(chain_b.tableau)
    fusions = [Fusion(f.qubits, f.outcome, _shift(f.x_logical, 0, nb),
                      _shift(f.z_logical, 0, nb)) for f in chain_a.fusions]
    fusions += [Fusion((f.qubits[0] + na, f.qubits[1] + na), f.outcome,
                       _shift(f.x_logical, na, 0), _shift(f.z_logical, na, 0))
                for f in chain_b.fusions]
    active = chain_a.active + [q + na for q in chain_b.active]
    frame = _shift(chain_a.frame, 0, nb) * _shift(chain_b.frame, na, 0)
    merged = ClusterChain(tab, active, fusions, frame)

    qa, qb = chain_a.active[-1], chain_b.active[0] + na
    value = merged.measure_zz(qa, qb, outcome, rng)
    n = tab.n
    merged.fusions.append(Fusion((qa, qb), value,
                                 PauliString.single(n, {qa: "X", qb: "X"}),
                                 PauliString.single(n, {qa: "Z"})))
    merged.frame = merged.frame * PauliString.single(n, {qa: "Z"})
    return merged


def trim_chain(chain: ClusterChain, k: int, side: str,
               rng: np.random.Generator) -> ClusterChain:
    """Remove ``k`` logical sites from one end by Z-measuring their qubits."""
    if side not in ("start", "end"):
        raise ValueError("side must be 'start' or 'end'")
    out = ClusterChain(chain.tableau.copy(), list(chain.active), list(chain.fusions),
                       chain.frame)
    sites = out.logical_sites()
    doomed = sites[:k] if side == "start" else sites[len(sites) - k:] if k else []
    gone = {q for site in doomed for q in site}
    for q in sorted(gone):
        out.tableau.measure(PauliString.single(out.n_physical, {q: "Z"}), rng=rng)
    out.active = [q for q in out.active if q not in gone]
    out.fusions = [f for f in out.fusions if not set(f.qubits) & gone]
    return out


def logical_statevector(chain: ClusterChain) -> np.ndarray:
    """Amplitudes on logical sites, read off the repetition-code subspace.

    Inactive qubits must be in Z eigenstates; each fused site's logical
    level is the Z value of its first qubit.  Small chains only.
    """
    psi = chain.tableau.to_statevector().reshape([2] * chain.n_physical)
    idx: list = [None] * chain.n_physical
    inactive = [q for q in range(chain.n_physical) if q not in chain.active]
    for q in inactive:
        val = chain.tableau.expectation(PauliString.single(chain.n_physical, {q: "Z"}))
        if val == 0:
            raise ValueError(f"inactive qubit {q} is not in a Z eigenstate")
        idx[q] = 0 if val == 1 else 1
    outcome = {frozenset(f.qubits): f.outcome for f in chain.fusions}
    sites = chain.logical_sites()
    out = np.zeros([2] * len(sites), dtype=complex)
    for logical in np.ndindex(*out.shape):
        for level, site in zip(logical, sites):
            bit = level
            idx[site[0]] = bit
            for prev, q in zip(site, site[1:]):
                bit = bit if outcome[frozenset((prev, q))] == 1 else 1 - bit
                idx[q] = bit
        out[logical] = psi[tuple(idx)]
    return out.reshape(-1)


# -- merged-length accounting -----------------------------------------------

def critical_length(p_s: float) -> float:
    """n_c = 1 + 4(1 - p_s)/p_s for the ZZ measurement gate."""
    return 1.0 + 4.0 * (1.0 - p_s) / p_s


def critical_length_cpf(p_s: float) -> float:
    """Critical length of the controlled-phase-flip gate, 4(1 - p_s)/p_s."""
    return 4.0 * (1.0 - p_s) / p_s


@dataclass(frozen=True)
class MergedLength:
    exact: float
    approx: float
    n_c: float


def expected_merged_length(n: int, p_s: float, failure_cost_per_chain: int = 2) -> MergedLength:
    """Mean length after merging two n-chains, summed while terms are positive."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not 0 < p_s <= 1:
        raise ValueError("p_s must lie in (0, 1]")
    step = 2 * failure_cost_per_chain
    exact = 0.0
    i = 0
    while 2 * n - 1 - step * i > 0:
        exact += (2 * n - 1 - step * i) * p_s * (1 - p_s) ** i
        i += 1
    n_c = critical_length(p_s)
    return MergedLength(exact, 2 * n - n_c, n_c)


class Strategy(enum.Enum):
    PAIRWISE_DOUBLING = "pairwise_doubling"
    INCREMENTAL = "incremental"


@dataclass(frozen=True)
class GrowthPolicy:
    p_s: float
    failure_cost_per_chain: int = 2
    strategy: Strategy = Strategy.PAIRWISE_DOUBLING
    # length of the prepared chains growth starts from
    seed_length: int = 2

    def __post_init__(self):
        if not 0 < self.p_s <= 1:
            raise ValueError("p_s must lie in (0, 1]")
        if self.failure_cost_per_chain < 1:
            raise ValueError("failure cost must be at least 1")
        if self.seed_length < 1:
            raise ValueError("seed length must be at least 1")
        object.__setattr__(self, "strategy", Strategy(self.strategy))

    @property
    def n_c(self) -> float:
        return critical_length(self.p_s)


@dataclass(frozen=True)
class MergeAttempt:
    """``length`` is 0 when a chain ran out; ``left_a``/``left_b`` are what remains."""

    length: int
    attempts: int
    left_a: int
    left_b: int

    @property
    def succeeded(self) -> bool:
        return self.length > 0


def merge_attempts(n_a: int, n_b: int, p_s: float, failure_cost: int,
                   rng: np.random.Generator) -> MergeAttempt:
    """Retry the gate until success or until a chain is used up."""
    attempts = 0
    while True:
        attempts += 1
        if rng.random() < p_s:
            return MergeAttempt(n_a + n_b - 1, attempts, 0, 0)
        n_a -= failure_cost
        n_b -= failure_cost
        if n_a < 1 or n_b < 1:
            return MergeAttempt(0, attempts, max(n_a, 0), max(n_b, 0))


def merge_round_samples(n: int, p_s: float, trials: int, rng: np.random.Generator,
                        failure_cost: int = 2) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`merge_attempts` for two n-chains, ``trials`` times.

    One uniform draw per live trial per attempt round, in trial order.
    """
    lengths = np.zeros(trials, dtype=np.int64)
    attempts = np.zeros(trials, dtype=np.int64)
    live = np.ones(trials, dtype=bool)
    remaining = n
    while live.any():
        idx = np.nonzero(live)[0]
        attempts[idx] += 1
        won = rng.random(idx.size) < p_s
        lengths[idx[won]] = 2 * remaining - 1
        live[idx[won]] = False
        remaining -= failure_cost
        if remaining < 1:
            live[:] = False
    return lengths, attempts


@dataclass(frozen=True)
class MergeStats:
    n: int
    p_s: float
    analytic: MergedLength
    empirical_mean: float
    empirical_stderr: float
    trials: int
    mean_attempts: float

    @property
    def non_growing(self) -> bool:
        return self.n <= self.analytic.n_c


def merge_round_statistics(n: int, p_s: float, trials: int, rng: np.random.Generator,
                           failure_cost: int = 2) -> MergeStats:
    lengths, attempts = merge_round_samples(n, p_s, trials, rng, failure_cost)
    std = lengths.std(ddof=1) if trials > 1 else 0.0
    return MergeStats(n, p_s, expected_merged_length(n, p_s, failure_cost),
                      float(lengths.mean()), float(std / math.sqrt(trials)), trials,
                      float(attempts.mean()))


@dataclass
class GrowthTrial:
    final_length: int
    attempts: int
    failures: int
    seeds_used: int
    round_lengths: list[int]


@dataclass(frozen=True)
class GrowthStats:
    target_length: int
    policy: GrowthPolicy
    trials: int
    non_growing: bool
    mean_attempts: float = math.nan
    stderr_attempts: float = math.nan
    mean_qubit_operations: float = math.nan
    stderr_qubit_operations: float = math.nan
    mean_seeds: float = math.nan
    round_means: tuple[float, ...] = ()


class _AttemptBudget:
    def __init__(self, limit: int):
        self.used = 0
        self.failures = 0
        self.limit = limit

    def spend(self, result: MergeAttempt) -> None:
        self.used += result.attempts
        self.failures += result.attempts - int(result.succeeded)
        if self.used > self.limit:
            raise RuntimeError("attempt budget exhausted; growth is not converging")


def _build_tree(depth: int, policy: GrowthPolicy, rng, budget: _AttemptBudget) -> tuple[int, int]:
    """A chain from 2^depth seeds merged pairwise; retries failed subtrees."""
    if depth == 0:
        return policy.seed_length, 1
    seeds = 0
    while True:
        la, sa = _build_tree(depth - 1, policy, rng, budget)
        lb, sb = _build_tree(depth - 1, policy, rng, budget)
        seeds += sa + sb
        result = merge_attempts(la, lb, policy.p_s, policy.failure_cost_per_chain, rng)
        budget.spend(result)
        if result.succeeded:
            return result.length, seeds


def _grow_once(target: int, policy: GrowthPolicy, rng, budget: _AttemptBudget) -> GrowthTrial:
    length, seeds, depth = policy.seed_length, 1, 0
    rounds: list[int] = []
    while length < target:
        if policy.strategy is Strategy.PAIRWISE_DOUBLING:
            partner, used = _build_tree(depth, policy, rng, budget)
        else:
            partner, used = policy.seed_length, 1
        seeds += used
        result = merge_attempts(length, partner, policy.p_s,
                                policy.failure_cost_per_chain, rng)
        budget.spend(result)
        if result.succeeded:
            length = result.length
            depth += 1
        elif result.left_a >= 1:
            length = result.left_a
        else:
            length, depth = policy.seed_length, 0
            seeds += 1
        rounds.append(length)
    return GrowthTrial(length, budget.used, budget.failures, seeds, rounds)


def incremental_drift(p_s: float, seed_length: int, failure_cost: int) -> float:
    """Expected change of a long chain's length when one seed is appended."""
    drift = 0.0
    i = 0
    while seed_length - failure_cost * i >= 1:
        drift += p_s * (1 - p_s) ** i * (seed_length - 1 - 2 * failure_cost * i)
        i += 1
    return drift - (1 - p_s) ** i * failure_cost * i


def is_growing(policy: GrowthPolicy) -> bool:
    n, c = policy.seed_length, policy.failure_cost_per_chain
    if policy.strategy is Strategy.INCREMENTAL:
        return incremental_drift(policy.p_s, n, c) > 0
    return expected_merged_length(n, policy.p_s, c).exact > n


def grow_chain_monte_carlo(target_length: int, policy: GrowthPolicy,
                           rng: np.random.Generator, trial_count: int,
                           max_attempts_per_trial: int = 10_000_000) -> GrowthStats:
    """Grow chains from ``seed_length`` seeds until they reach ``target_length``.

    ``pairwise_doubling`` merges the growing chain with a partner built from
    an equally deep binary tree of seeds; ``incremental`` merges one seed at a
    time.  When the growing chain is used up it restarts from a fresh seed.
    Qubit operations: each gate attempt acts on two qubits and each failure
    discards ``2 * failure_cost_per_chain`` more.  Policies whose seeds cannot
    grow on average are reported as non-growing without simulation.
    """
    if trial_count < 1:
        raise ValueError("trial_count must be at least 1")
    if target_length < 1:
        raise ValueError("target_length must be at least 1")
    if target_length > policy.seed_length and not is_growing(policy):
        return GrowthStats(target_length, policy, trial_count, non_growing=True)
    attempts = np.empty(trial_count)
    seeds = np.empty(trial_count)
    ops = np.empty(trial_count)
    rounds: list[list[int]] = []
    for t in range(trial_count):
        trial = _grow_once(target_length, policy, rng, _AttemptBudget(max_attempts_per_trial))
        attempts[t] = trial.attempts
        seeds[t] = trial.seeds_used
        ops[t] = 2 * trial.attempts + 2 * policy.failure_cost_per_chain * trial.failures
        rounds.append(trial.round_lengths)
    depth = max((len(r) for r in rounds), default=0)
    round_means = tuple(float(np.mean([r[k] for r in rounds if len(r) > k])) for k in range(depth))
    sem = (lambda a: float(a.std(ddof=1) / math.sqrt(a.size)) if a.size > 1 else 0.0)
    return GrowthStats(target_length, policy, trial_count, False,
                       float(attempts.mean()), sem(attempts), float(ops.mean()), sem(ops),
                       float(seeds.mean()), round_means)
