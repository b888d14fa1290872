"""Batch front end.

Exit status: 0 on success, 1 on a runtime failure, 2 on a usage error
(bad flags, unparseable values, invalid config).
"""
from __future__ import annotations

import argparse
import logging
import math
import re
import sys
from functools import partial
from pathlib import Path

import numpy as np

from . import cluster, gate, montecarlo, noise
from .atom_photon import AtomQubit
from .config import ConfigError, RunConfig
from .quantum_core import fidelity_up_to_global_phase
from .reports import utc_now, write_csv, write_json, write_manifest
from .tolerances import INPUT_NORM_ATOL

log = logging.getLogger("freqgate")

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2
LONG_RUN_TRIALS = 10_000_000
NOISE_PARAMS = ("doppler", "arm_phase", "path_mismatch")
_COMPLEX_RE = re.compile(r"^[+-]?[0-9.eE+-]*[ij]?$")


class UsageError(Exception):
    pass


def parse_complex(token: str) -> complex:
    """Parse ``a``, ``a+bi``, ``a-bi`` or ``bi`` (``j`` also accepted)."""
    text = token.strip().replace(" ", "")
    if not text or not _COMPLEX_RE.match(text):
        raise argparse.ArgumentTypeError(f"cannot parse complex literal {token!r}")
    text = text.replace("i", "j")
    if text.endswith("j") and text[:-1] in ("", "+", "-"):
        text = text[:-1] + "1j"
    try:
        value = complex(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse complex literal {token!r}") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise argparse.ArgumentTypeError(f"complex literal {token!r} is not finite")
    return value


def parse_range(token: str) -> tuple[float, float]:
    try:
        lo, hi = (float(part) for part in token.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like LOW:HIGH, got {token!r}") from None
    if not lo < hi:
        raise argparse.ArgumentTypeError(f"range needs LOW < HIGH, got {token!r}")
    return lo, hi


def probability(token: str) -> float:
    try:
        p = float(token)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {token!r}") from None
    if not 0 < p <= 1:
        raise argparse.ArgumentTypeError(f"p_s must lie in (0, 1], got {token}")
    return p


def positive_int(token: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {token!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {token}")
    return value


def seed_value(token: str) -> int:
    value = int(token)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _global_options(parser: argparse.ArgumentParser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--config", type=Path, default=default, help="JSON run config")
    parser.add_argument("--seed", type=seed_value, default=default, help="master seed (u64)")
    parser.add_argument("--out", type=Path, default=default, help="output directory")
    parser.add_argument("--workers", type=positive_int, default=argparse.SUPPRESS if suppress else 1)
    parser.add_argument("--allow-long", action="store_true",
                        default=argparse.SUPPRESS if suppress else False,
                        help=f"permit runs above {LONG_RUN_TRIALS:.0e} trials")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freqgate", description=__doc__.splitlines()[0])
    _global_options(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _global_options(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate-gate", parents=[common],
                       help="Monte Carlo of the ZZ gate for fixed input qubits")
    for name in ("c0", "c1", "d0", "d1"):
        p.add_argument(f"--{name}", type=parse_complex, required=True)
    p.add_argument("--trials", type=positive_int)

    p = sub.add_parser("noise-sweep", parents=[common], help="gate fidelity versus one noise knob")
    p.add_argument("--param", choices=NOISE_PARAMS, required=True)
    p.add_argument("--range", dest="span", type=parse_range, required=True, metavar="LOW:HIGH")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--mode", choices=("common", "differential"), default="common",
                   help="arm_phase only: phase on both frequencies or on nu1 only")

    p = sub.add_parser("grow-cluster", parents=[common],
                       help="merged chain length, analytic versus Monte Carlo")
    p.add_argument("--n", type=positive_int, nargs="+", required=True)
    p.add_argument("--p-s", type=probability, nargs="+", required=True)
    p.add_argument("--trials", type=positive_int)
    p.add_argument("--strategy", choices=[s.value for s in cluster.Strategy])

    p = sub.add_parser("scaling-report", parents=[common],
                       help="gate attempts needed to grow a chain to a target length")
    p.add_argument("--target", type=positive_int, nargs="+", required=True)
    p.add_argument("--p-s", type=probability, nargs="+", required=True)
    p.add_argument("--trials", type=positive_int, default=200)
    p.add_argument("--strategy", choices=[s.value for s in cluster.Strategy])
    p.add_argument("--seed-length", type=positive_int)

    sub.add_parser("validate-config", parents=[common], help="check a config file and exit")
    return parser


class Context:
    def __init__(self, args: argparse.Namespace, config: RunConfig):
        self.args = args
        self.config = config
        self.seed = args.seed if args.seed is not None else config.master_seed
        self.out = Path(args.out if args.out is not None else config.output_dir)
        self.workers = args.workers
        self.started = utc_now()

    def trials(self, requested: int | None) -> int:
        trials = requested if requested is not None else self.config.trials
        if trials > LONG_RUN_TRIALS and not self.args.allow_long:
            raise UsageError(f"{trials} trials exceeds {LONG_RUN_TRIALS}; pass --allow-long")
        return trials

    def emit(self, name: str, header, rows, parameters: dict,
             partition_rule: str = "") -> Path:
        path = write_csv(self.out / name, header, rows)
        write_manifest(path, command=self.args.command, config_hash=self.config.hash(),
                       master_seed=self.seed, parameters=parameters, workers=self.workers,
                       partition_rule=partition_rule, started_at=self.started)
        log.info("wrote %s", path)
        return path


def _qubit(a: complex, b: complex, name: str) -> AtomQubit:
    norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
    if norm == 0:
        raise UsageError(f"{name} amplitudes are both zero")
    if abs(norm - 1) > INPUT_NORM_ATOL:
        log.info("renormalizing %s amplitudes (norm %.6g)", name, norm)
    return AtomQubit(a / norm, b / norm)


def _gate_chunk(count, rng, eff, c, d):
    return gate.simulate_success_count(count, eff, 1.0, rng, atoms=(c, d))


def cmd_simulate_gate(ctx: Context) -> int:
    args = ctx.args
    c = _qubit(args.c0, args.c1, "atom 1")
    d = _qubit(args.d0, args.d1, "atom 2")
    trials = ctx.trials(args.trials)
    eff = ctx.config.efficiency_model()
    fn = partial(_gate_chunk, eff=eff, c=c, d=d)
    stream = montecarlo.stream_id("simulate-gate")
    successes = sum(montecarlo.run_chunked(fn, trials, ctx.seed, stream, ctx.workers))
    rate = successes / trials
    stderr = math.sqrt(rate * (1 - rate) / trials)
    rule = montecarlo.PARTITION_RULE.format(chunk_size=montecarlo.CHUNK_SIZE)
    params = {"c0": str(c.c0), "c1": str(c.c1), "d0": str(d.c0), "d1": str(d.c1),
              "trials": trials, "efficiencies": vars(eff)}
    ctx.emit("gate.csv", ["attempt_count", "successes", "rate", "stderr", "seed"],
             [[trials, successes, rate, stderr, ctx.seed]], params, rule)

    exact = gate.zz_measurement_gate(c, d)
    predicted = gate.success_probability(eff) * 4 * exact.probability
    summary = {
        "attempt_count": trials, "successes": successes, "rate": rate, "stderr": stderr,
        "seed": ctx.seed,
        "predicted_coincidence_probability": exact.probability,
        "predicted_success_rate": predicted,
        "null_outcome": exact.state is None,
    }
    if exact.state is None:
        summary["note"] = "inputs give zero coincidence probability (photons always bunch)"
    else:
        ideal = gate.ideal_output(c, d)
        summary["amp_01"] = [exact.state.amplitude((0, 1)).real, exact.state.amplitude((0, 1)).imag]
        summary["amp_10"] = [exact.state.amplitude((1, 0)).real, exact.state.amplitude((1, 0)).imag]
        summary["fidelity_vs_prediction"] = fidelity_up_to_global_phase(exact.state, ideal)
    write_json(ctx.out / "gate_summary.json", summary)
    print(f"rate {rate:.6g} +- {stderr:.2g} (predicted {predicted:.6g})")
    if exact.state is None:
        print("null outcome: " + summary["note"])
    return EXIT_OK


def cmd_noise_sweep(ctx: Context) -> int:
    args = ctx.args
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    grid = np.linspace(args.span[0], args.span[1], args.steps)
    species = ctx.config.atomic_species()
    params = {"param": args.param, "range": list(args.span), "steps": args.steps}
    a = noise.BALANCED
    if args.param == "doppler":
        sweep = noise.doppler_fidelity_sweep(
            species, ctx.config.trap_params(), grid,
            threshold=ctx.config.noise_params()["threshold_ratio"])
        header = ["delta_over_gamma", "overlap_sq", "fidelity", "coincidence_prob"]
        rows = [[r.delta_over_gamma, r.overlap_sq, r.fidelity, r.coincidence_prob]
                for r in sweep.rows]
        print(sweep.regime.describe())
    elif args.param == "arm_phase":
        params["mode"] = args.mode
        header = ["phase_rad", "fidelity", "coincidence_prob"]
        rows = []
        for phi in grid:
            phases = (noise.InterferometerPhases.common(phi) if args.mode == "common"
                      else noise.InterferometerPhases.differential(phi))
            res = noise.interferometer_phase_gate(a, a, phases)
            rows.append([float(phi), res.fidelity, res.probability])
    else:
        header = ["path_mismatch_mm", "phase_rad", "fidelity", "coincidence_prob"]
        rows = []
        for mm in grid:
            dphi = noise.path_mismatch_phase(species, mm * 1e-3)
            res = noise.interferometer_phase_gate(a, a, noise.InterferometerPhases.differential(dphi))
            rows.append([float(mm), dphi, res.fidelity, res.probability])
    ctx.emit(f"noise_{args.param}.csv", header, rows, params)
    worst = min(row[header.index("fidelity")] for row in rows)
    print(f"{args.param}: {len(rows)} points, minimum fidelity {worst:.9g}")
    return EXIT_OK


def _merge_chunk(count, rng, n, p_s, cost):
    lengths, _ = cluster.merge_round_samples(n, p_s, count, rng, cost)
    lengths = lengths.astype(float)
    return count, float(lengths.sum()), float((lengths ** 2).sum())


def cmd_grow_cluster(ctx: Context) -> int:
    args = ctx.args
    trials = ctx.trials(args.trials)
    overrides = {"strategy": args.strategy} if args.strategy else {}
    cost = ctx.config.growth_policy(p_s=args.p_s[0], **overrides).failure_cost_per_chain
    header = ["n", "p_s", "n_c", "analytic_exact", "analytic_approx", "empirical_mean",
              "empirical_stderr", "trials", "seed", "non_growing"]
    rows = []
    print(f"{'n':>5} {'p_s':>6} {'n_c':>8} {'exact':>12} {'2n-n_c':>10} {'empirical':>12} {'stderr':>9}")
    for n in args.n:
        for p_s in args.p_s:
            fn = partial(_merge_chunk, n=n, p_s=p_s, cost=cost)
            stream = montecarlo.stream_id(f"grow-cluster:{n}:{p_s!r}")
            parts = montecarlo.run_chunked(fn, trials, ctx.seed, stream, ctx.workers)
            count = sum(p[0] for p in parts)
            total = sum(p[1] for p in parts)
            total_sq = sum(p[2] for p in parts)
            mean = total / count
            var = max(total_sq / count - mean ** 2, 0.0) * count / max(count - 1, 1)
            stderr = math.sqrt(var / count)
            analytic = cluster.expected_merged_length(n, p_s, cost)
            non_growing = n <= analytic.n_c
            rows.append([n, p_s, analytic.n_c, analytic.exact, analytic.approx, mean, stderr,
                         trials, ctx.seed, non_growing])
            flag = "  non-growing" if non_growing else ""
            print(f"{n:>5} {p_s:>6.3g} {analytic.n_c:>8.4g} {analytic.exact:>12.6f} "
                  f"{analytic.approx:>10.4f} {mean:>12.6f} {stderr:>9.2g}{flag}")
    rule = montecarlo.PARTITION_RULE.format(chunk_size=montecarlo.CHUNK_SIZE)
    ctx.emit("growth.csv", header, rows,
             {"n": args.n, "p_s": args.p_s, "trials": trials, "failure_cost_per_chain": cost},
             rule)
    return EXIT_OK


def _scaling_point(item, rng):
    target, policy, trials = item
    return cluster.grow_chain_monte_carlo(target, policy, rng, trials)


def cmd_scaling_report(ctx: Context) -> int:
    args = ctx.args
    overrides = {}
    if args.strategy:
        overrides["strategy"] = args.strategy
    if args.seed_length:
        overrides["seed_length"] = args.seed_length
    items = [(t, ctx.config.growth_policy(p_s=p, **overrides), args.trials)
             for t in args.target for p in args.p_s]
    stream = montecarlo.stream_id("scaling-report")
    results = montecarlo.map_seeded(_scaling_point, items, ctx.seed, stream, ctx.workers)
    header = ["target_length", "p_s", "mean_operations", "stderr", "mean_attempts",
              "strategy", "seed_length", "non_growing", "trials", "seed"]
    rows = []
    for stats in results:
        pol = stats.policy
        rows.append([stats.target_length, pol.p_s, stats.mean_qubit_operations,
                     stats.stderr_qubit_operations, stats.mean_attempts, pol.strategy.value,
                     pol.seed_length, stats.non_growing, stats.trials, ctx.seed])
        note = "non-growing regime" if stats.non_growing else \
            f"{stats.mean_qubit_operations:.1f} +- {stats.stderr_qubit_operations:.1f} ops"
        print(f"target {stats.target_length:>6} p_s {pol.p_s:<6g} {note}")
    ctx.emit("scaling.csv", header, rows,
             {"target": args.target, "p_s": args.p_s, "trials": args.trials, **overrides},
             "grid point k uses chunk stream k")
    return EXIT_OK


def cmd_validate_config(ctx: Context) -> int:
    if ctx.args.config is None:
        raise UsageError("validate-config needs --config")
    print(f"config ok, hash {ctx.config.hash()}")
    return EXIT_OK


COMMANDS = {
    "simulate-gate": cmd_simulate_gate,
    "noise-sweep": cmd_noise_sweep,
    "grow-cluster": cmd_grow_cluster,
    "scaling-report": cmd_scaling_report,
    "validate-config": cmd_validate_config,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    try:
        config = RunConfig.load(args.config) if args.config else RunConfig()
        return COMMANDS[args.command](Context(args, config))
    except ConfigError as err:
        for problem in err.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_USAGE
    except UsageError as err:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as err:  # noqa: BLE001 - CLI boundary
        log.error("%s: %s", type(err).__name__, err)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
