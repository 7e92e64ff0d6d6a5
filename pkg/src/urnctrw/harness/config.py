"""Declarative experiment configuration.

A config is a TOML document with ``schema_version = 1``::

    schema_version = 1
    study = "ctrw_marginal"
    kind = ["ou", "jacobi", "cir"]   # one name or a list
    beta = [0.7, 0.9]                # one value or a list
    n_list = [2000]
    paths = 5000
    times = [1.0]
    seed = 12345
    output_dir = "results"
    workers = 1

    [params.cir]                     # overrides the default chain parameters
    theta = 1.0
    a = 2.0
    b = 4.0
    d = 0.5

    [options]                        # study-specific knobs
    waiting_law = "stable"

    [gates]                          # study-specific tolerances
    ks = 0.05

Unknown top-level keys are rejected so that typos do not silently fall back
to defaults.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

from ..errors import ConfigError, InvalidParameterError
from ..pearson import DEFAULT_CHAIN_PARAMS, ChainParams, DiffusionKind

__all__ = ["Study", "ExperimentConfig", "load_config", "SCHEMA_VERSION"]

SCHEMA_VERSION = 1


class Study(str, Enum):
    GENERATOR_CONVERGENCE = "generator_convergence"
    STATIONARITY = "stationarity"
    SUBORDINATOR_LAPLACE = "subordinator_laplace"
    INVERSE_SUBORDINATOR = "inverse_subordinator"
    CTRW_MARGINAL = "ctrw_marginal"
    DENSITY_CONSISTENCY = "density_consistency"


_KEYS = {"schema_version", "study", "kind", "beta", "n_list", "paths", "times", "seed",
         "output_dir", "workers", "params", "options", "gates"}


def _as_list(value, key):
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return list(value)
    if isinstance(value, (str, int, float)):
        return [value]
    raise ConfigError(f"{key} must be a value or a list", key=key)


@dataclass(frozen=True)
class ExperimentConfig:
    study: Study
    kinds: tuple
    betas: tuple
    n_list: tuple
    paths: int
    times: tuple
    seed: int
    output_dir: str = "results"
    workers: int = 1
    params: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    gates: dict = field(default_factory=dict)
    source: str | None = None

    def chain_params(self, kind) -> ChainParams:
        return self.params.get(DiffusionKind.parse(kind), DEFAULT_CHAIN_PARAMS[DiffusionKind.parse(kind)])

    def option(self, key, default):
        return self.options.get(key, default)

    def gate(self, key, default):
        return self.gates.get(key, default)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "study": self.study.value,
            "kind": [k.value for k in self.kinds],
            "beta": list(self.betas),
            "n_list": list(self.n_list),
            "paths": self.paths,
            "times": list(self.times),
            "seed": self.seed,
            "output_dir": self.output_dir,
            "workers": self.workers,
            "params": {
                k.value: {"theta": p.theta, "a": p.a, "b": p.b, "d": p.d}
                for k, p in sorted(self.params.items(), key=lambda kv: kv[0].value)
            },
            "options": copy.deepcopy(self.options),
            "gates": copy.deepcopy(self.gates),
        }

    def canonical_json(self) -> str:
        """Config without ``output_dir`` and ``workers``, which do not change results."""
        d = self.to_dict()
        d.pop("output_dir")
        d.pop("workers")
        return json.dumps(d, sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def replace(self, **changes) -> "ExperimentConfig":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(changes)
        return ExperimentConfig(**d)

    @classmethod
    def from_dict(cls, raw: dict, source: str | None = None) -> "ExperimentConfig":
        raw = dict(raw)
        unknown = sorted(set(raw) - _KEYS)
        if unknown:
            raise ConfigError(f"unknown config key {unknown[0]!r}", key=unknown[0])
        version = raw.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {version!r}", key="schema_version")
        try:
            study = Study(raw["study"])
        except KeyError:
            raise ConfigError("missing required key 'study'", key="study") from None
        except ValueError:
            raise ConfigError(f"unknown study {raw['study']!r}", key="study") from None
        try:
            kinds = tuple(DiffusionKind.parse(k) for k in _as_list(raw.get("kind", "ou"), "kind"))
        except InvalidParameterError as exc:
            raise ConfigError(str(exc), key="kind") from None
        if not kinds:
            raise ConfigError("kind must not be empty", key="kind")
        betas = tuple(float(b) for b in _as_list(raw.get("beta", 1.0), "beta"))
        for b in betas:
            if not 0.0 < b <= 1.0:
                raise ConfigError(f"beta must lie in (0, 1], got {b}", key="beta")
        n_list = tuple(_as_list(raw.get("n_list", [1000]), "n_list"))
        if not n_list or any(not isinstance(n, int) or n < 1 for n in n_list):
            raise ConfigError("n_list must be a nonempty list of positive integers", key="n_list")
        if list(n_list) != sorted(set(n_list)):
            raise ConfigError("n_list must be strictly ascending", key="n_list")
        paths = raw.get("paths", 1000)
        if not isinstance(paths, int) or paths < 1:
            raise ConfigError("paths must be a positive integer", key="paths")
        times = tuple(float(t) for t in _as_list(raw.get("times", [1.0]), "times"))
        if any(not (t >= 0 and math.isfinite(t)) for t in times):
            raise ConfigError("times must be nonnegative and finite", key="times")
        seed = raw.get("seed", 0)
        if not isinstance(seed, int) or seed < 0:
            raise ConfigError("seed must be a nonnegative integer", key="seed")
        workers = raw.get("workers", 1)
        if not isinstance(workers, int) or workers < 1:
            raise ConfigError("workers must be a positive integer", key="workers")
        params = {}
        for name, table in (raw.get("params") or {}).items():
            key = f"params.{name}"
            try:
                kind = DiffusionKind.parse(name)
                base = DEFAULT_CHAIN_PARAMS[kind]
                extra = set(table) - {"theta", "a", "b", "d"}
                if extra:
                    raise ConfigError(f"unknown key {sorted(extra)[0]!r} in [{key}]",
                                      key=f"{key}.{sorted(extra)[0]}")
                cp = ChainParams(
                    float(table.get("theta", base.theta)),
                    float(table.get("a", base.a)),
                    float(table.get("b", base.b)),
                    None if table.get("d", base.d) is None else float(table.get("d", base.d)),
                )
                params[kind] = cp.validate(kind)
            except InvalidParameterError as exc:
                raise ConfigError(str(exc), key=key) from None
        for key in ("options", "gates"):
            if not isinstance(raw.get(key, {}), dict):
                raise ConfigError(f"[{key}] must be a table", key=key)
        return cls(
            study=study,
            kinds=kinds,
            betas=betas,
            n_list=n_list,
            paths=paths,
            times=times,
            seed=seed,
            output_dir=str(raw.get("output_dir", "results")),
            workers=workers,
            params=params,
            options=dict(raw.get("options", {})),
            gates=dict(raw.get("gates", {})),
            source=source,
        )


def load_config(path) -> ExperimentConfig:
    """Parse and validate a TOML experiment config."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {str(path)!r}: {exc.strerror}", key="config") from None
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"invalid TOML in {str(path)!r}: {exc}", key="config") from None
    return ExperimentConfig.from_dict(raw, source=text)
