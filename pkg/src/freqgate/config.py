"""Run configuration: one JSON document with a section per module."""
from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .atom_photon import CADMIUM_111, AtomicSpecies
from .cluster import GrowthPolicy
from .gate import EfficiencyModel
from .noise import DEFAULT_DOPPLER_THRESHOLD, TrapParams

SECTIONS = ("species", "trap", "efficiencies", "noise", "growth")
TOP_LEVEL = SECTIONS + ("master_seed", "output_dir", "trials")
DEFAULT_TRAP = {"nu_t_hz": 1.0e6, "l_s_nm": 50.0}
DEFAULT_NOISE = {"path_mismatch_mm": 1.0, "threshold_ratio": DEFAULT_DOPPLER_THRESHOLD}


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


@dataclass
class RunConfig:
    species: dict = field(default_factory=dict)
    trap: dict = field(default_factory=dict)
    efficiencies: dict = field(default_factory=dict)
    noise: dict = field(default_factory=dict)
    growth: dict = field(default_factory=dict)
    master_seed: int = 0
    output_dir: str = "out"
    trials: int = 100_000

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> RunConfig:
        unknown = set(raw) - set(TOP_LEVEL)
        if unknown:
            raise ConfigError([f"unknown top-level keys: {sorted(unknown)}"])
        cfg = cls(**{k: v for k, v in raw.items()})
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path) -> RunConfig:
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as err:
            raise ConfigError([f"cannot read config {path}: {err}"]) from err
        if not isinstance(raw, dict):
            raise ConfigError(["config must be a JSON object"])
        return cls.from_dict(raw)

    def to_dict(self) -> dict[str, Any]:
        return {"species": self.species, "trap": self.trap, "efficiencies": self.efficiencies,
                "noise": self.noise, "growth": self.growth, "master_seed": self.master_seed,
                "output_dir": self.output_dir, "trials": self.trials}

    def hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    # -- typed views -------------------------------------------------------
    def efficiency_model(self) -> EfficiencyModel:
        eff = dict(self.efficiencies)
        if "eta_b" not in eff and "eta_b" in self.species:
            eff["eta_b"] = self.species["eta_b"]
        return EfficiencyModel.from_config(eff)

    def atomic_species(self) -> AtomicSpecies:
        merged = {**CADMIUM_111, "eta_b": self.efficiency_model().eta_b, **self.species}
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return AtomicSpecies.from_config(merged)

    def trap_params(self) -> TrapParams:
        return TrapParams.from_config({**DEFAULT_TRAP, **self.trap})

    def noise_params(self) -> dict[str, float]:
        return {k: float(v) for k, v in {**DEFAULT_NOISE, **self.noise}.items()}

    def growth_policy(self, **overrides) -> GrowthPolicy:
        merged = {"p_s": 0.5, **self.growth, **overrides}
        return GrowthPolicy(**merged)

    def validate(self) -> None:
        """Check every section against its module invariants; collect all problems."""
        problems = []
        for name in SECTIONS:
            if not isinstance(getattr(self, name), dict):
                problems.append(f"section {name!r} must be an object")
        if problems:
            raise ConfigError(problems)
        checks = [("efficiencies", self.efficiency_model), ("species", self.atomic_species),
                  ("trap", self.trap_params), ("noise", self.noise_params),
                  ("growth", self.growth_policy)]
        for name, build in checks:
            try:
                build()
            except (ValueError, TypeError, KeyError) as err:
                problems.append(f"{name}: {err}")
        if "eta_b" in self.species and "eta_b" in self.efficiencies \
                and float(self.species["eta_b"]) != float(self.efficiencies["eta_b"]):
            problems.append("eta_b differs between species and efficiencies")
        unknown_noise = set(self.noise) - set(DEFAULT_NOISE)
        if unknown_noise:
            problems.append(f"noise: unknown keys {sorted(unknown_noise)}")
        if not isinstance(self.master_seed, int) or not 0 <= self.master_seed < 2 ** 64:
            problems.append("master_seed must be an unsigned 64-bit integer")
        if not isinstance(self.trials, int) or self.trials < 1:
            problems.append("trials must be a positive integer")
        if problems:
            raise ConfigError(problems)
