"""Model and run parameters, validation, and the config file format.

The config file is flat UTF-8 ``key = value`` lines with ``#`` comments.
Unknown keys are errors. Floats are written with repr so an accepted
config round-trips through the file format bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

PRESETS = ("custom", "oldroyd_b", "giesekus", "johnson_segalman")

CONFIG_KEYS = (
    "a", "beta", "delta1", "delta2", "epsilon",
    "grid_size", "t_end", "dt", "cfl", "dealias",
    "galerkin_k", "output_every", "seed", "preset", "extended_range",
)


class ConfigError(ValueError):
    """Base class for configuration rejections."""


class OutOfRange(ConfigError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class IncompatibleOptions(ConfigError):
    pass


@dataclass(frozen=True)
class ModelParams:
    """Constants of the governing equations.

    ``a`` selects the objective derivative (1 upper-convected, 0
    corotational), ``beta`` blends the two elastic energy terms,
    ``delta1``/``delta2`` are the relaxation rates, ``epsilon`` is the
    eigenvalue cutoff of the regularized scheme (0 disables it).
    Viscosity, density and the stress-diffusion coefficient are fixed to 1.
    """

    a: float = 1.0
    beta: float = 0.3
    delta1: float = 1.0
    delta2: float = 0.0
    epsilon: float = 0.0


@dataclass(frozen=True)
class RunConfig:
    grid_size: int = 64
    t_end: float = 1.0
    dt: float = 0.0
    cfl: float = 0.5
    dealias: bool = True
    galerkin_k: int = 0
    output_every: int = 1
    seed: int = 0
    preset: str = "custom"
    extended_range: bool = False


@dataclass(frozen=True)
class ValidatedConfig:
    params: ModelParams
    run: RunConfig


def _apply_preset(params: ModelParams, run: RunConfig) -> ModelParams:
    if run.preset == "custom":
        return params
    if run.preset == "oldroyd_b":
        delta1 = params.delta1 if params.delta1 > 0 else 1.0
        return replace(params, a=1.0, delta1=delta1, delta2=0.0)
    if run.preset == "giesekus":
        delta2 = params.delta2 if params.delta2 > 0 else 1.0
        return replace(params, a=1.0, delta1=0.0, delta2=delta2)
    if run.preset == "johnson_segalman":
        if not -1.0 <= params.a <= 1.0:
            raise OutOfRange("a", f"johnson_segalman needs a in [-1, 1], got {params.a}")
        return params
    raise OutOfRange("preset", f"unknown preset {run.preset!r}")


def validate(params: ModelParams, run: RunConfig) -> ValidatedConfig:
    """Check all invariants and return the normalized configuration.

    Normalization resolves presets into explicit (a, delta1, delta2)
    values, so validate is idempotent on its own output.
    """
    if run.preset not in PRESETS:
        raise OutOfRange("preset", f"must be one of {PRESETS}, got {run.preset!r}")
    params = _apply_preset(params, run)

    if not 0.0 <= params.beta <= 1.0:
        raise OutOfRange("beta", f"must lie in [0, 1], got {params.beta}")
    if params.beta in (0.0, 1.0) and not run.extended_range:
        raise IncompatibleOptions(
            f"beta = {params.beta} requires extended_range = true "
            "(the energy framework needs beta strictly inside (0, 1))"
        )
    for name in ("delta1", "delta2", "epsilon"):
        val = getattr(params, name)
        if val < 0.0:
            raise OutOfRange(name, f"must be >= 0, got {val}")

    if run.grid_size < 8 or run.grid_size % 2 != 0:
        raise OutOfRange("grid_size", f"must be an even integer >= 8, got {run.grid_size}")
    if run.dt < 0.0:
        raise OutOfRange("dt", f"must be >= 0, got {run.dt}")
    if run.dt == 0.0 and not 0.0 < run.cfl <= 1.0:
        raise OutOfRange("cfl", f"adaptive stepping needs cfl in (0, 1], got {run.cfl}")
    if run.t_end < 0.0:
        raise OutOfRange("t_end", f"must be >= 0, got {run.t_end}")
    if not 0 <= run.galerkin_k <= run.grid_size // 2:
        raise OutOfRange(
            "galerkin_k", f"must lie in [0, N/2] = [0, {run.grid_size // 2}], got {run.galerkin_k}"
        )
    if run.output_every < 1:
        raise OutOfRange("output_every", f"must be >= 1, got {run.output_every}")

    return ValidatedConfig(params=params, run=run)


# -- file format ----------------------------------------------------------

_BOOL_KEYS = {"dealias", "extended_range"}
_INT_KEYS = {"grid_size", "galerkin_k", "output_every", "seed"}
_STR_KEYS = {"preset"}


def _parse_value(key: str, raw: str):
    if key in _BOOL_KEYS:
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {raw!r}")
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {raw!r}") from None
    if key in _STR_KEYS:
        return raw
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {raw!r}") from None


def parse_config(text: str) -> ValidatedConfig:
    entries: dict[str, object] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, raw = (part.strip() for part in stripped.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = _parse_value(key, raw)

    preset = entries.get("preset", "custom")
    if preset != "custom" and "beta" not in entries:
        entries["beta"] = 0.01  # preset default, analysis-safe

    param_fields = {k: entries[k] for k in ("a", "beta", "delta1", "delta2", "epsilon") if k in entries}
    run_fields = {k: entries[k] for k in entries if k not in param_fields}
    return validate(ModelParams(**param_fields), RunConfig(**run_fields))


def load_config(path: str) -> ValidatedConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_config(cfg: ValidatedConfig) -> str:
    lines = []
    for key in CONFIG_KEYS:
        source = cfg.params if hasattr(cfg.params, key) else cfg.run
        lines.append(f"{key} = {_format_value(getattr(source, key))}")
    return "\n".join(lines) + "\n"


def save_config(cfg: ValidatedConfig, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_config(cfg))
