"""Run configuration: flat key = value files with [section] headers.

The accepted syntax is the TOML-compatible subset the toolkit documents:
one `key = value` per line, optional `[section]` headers (keys inside a
section are addressed as section.key), `#` comments, and values that are
integers, floats, booleans (true/false), double-quoted strings, or flat
lists like [30, 40, 60]. CLI flags override file values; the resolved union
is what lands in every output's metadata sidecar.

Physical parameters (detuning, kerr/u, kappa, period) have no silent
defaults; only numerical knobs do.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigInvalid

NUMERIC_DEFAULTS = {
    "dt": None,  # master-equation step; None means period/200
    "steps_per_half": 100,
    "transient_periods": 500,
    "record_periods": 2000,
    "n_initial_conditions": 16,
    "grid_points": 201,
    "overlap_radius_factor": 3.0,  # disk radius in units of grid spacing
    "smoothing_factor": 2.0,  # KDE bandwidth in units of grid spacing
    "seed": 0,
    "workers": 1,
    "expm_method": "pade",
}

REQUIRED_PHYSICAL = ("protocol.delta", "protocol.u", "protocol.kappa", "protocol.period")


def _parse_scalar(token: str, line_no: int):
    token = token.strip()
    if token.startswith('"') and token.endswith('"') and len(token) >= 2:
        return token[1:-1]
    low = token.lower()
    if low == "true":
        return True
    if low == "false":
        return False
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        raise ConfigInvalid(f"cannot parse value {token!r}", line=line_no)


def parse_config_text(text: str) -> dict:
    """Parse config text into a flat {key: (value, line)} mapping."""
    out: dict = {}
    section = ""
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            section = line[1:-1].strip()
            if not section:
                raise ConfigInvalid("empty section name", line=line_no)
            continue
        if "=" not in line:
            raise ConfigInvalid(f"expected key = value, got {raw.strip()!r}", line=line_no)
        key, _, value = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigInvalid("empty key", line=line_no)
        full_key = f"{section}.{key}" if section else key
        value = value.strip()
        if value.startswith("[") and value.endswith("]"):
            inner = value[1:-1].strip()
            parsed = (
                [] if not inner else [_parse_scalar(tok, line_no) for tok in inner.split(",")]
            )
        else:
            parsed = _parse_scalar(value, line_no)
        if full_key in out:
            raise ConfigInvalid(f"duplicate key {full_key!r}", key=full_key, line=line_no)
        out[full_key] = (parsed, line_no)
    return out


def load_config_file(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config_text(fh.read())
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config file {path}: {exc}")


@dataclass
class RunConfig:
    """Resolved configuration for one command invocation."""

    values: dict = field(default_factory=dict)  # key -> value
    lines: dict = field(default_factory=dict)  # key -> source line (file keys only)

    @classmethod
    def resolve(cls, file_entries: dict | None, overrides: dict | None) -> "RunConfig":
        """File values overridden by CLI values, on top of numeric defaults."""
        cfg = cls()
        for key, default in NUMERIC_DEFAULTS.items():
            cfg.values[f"run.{key}"] = default
        if file_entries:
            for key, (value, line) in file_entries.items():
                cfg.values[key] = value
                cfg.lines[key] = line
        if overrides:
            for key, value in overrides.items():
                if value is not None:
                    cfg.values[key] = value
        return cfg

    def get(self, key, default=None):
        return self.values.get(key, default)

    def require(self, key):
        if key not in self.values or self.values[key] is None:
            raise ConfigInvalid(
                f"required parameter {key!r} is missing (no silent defaults for physics)",
                key=key,
            )
        return self.values[key]

    def require_float(self, key) -> float:
        value = self.require(key)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigInvalid(
                f"{key!r} must be a number, got {value!r}", key=key, line=self.lines.get(key)
            )
        return float(value)

    def get_int(self, key, default=None) -> int:
        value = self.values.get(key, default)
        if value is None:
            raise ConfigInvalid(f"{key!r} is required", key=key)
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
            raise ConfigInvalid(
                f"{key!r} must be an integer, got {value!r}", key=key, line=self.lines.get(key)
            )
        return int(value)

    def protocol_params(self) -> dict:
        """The four mandatory physical parameters."""
        return dict(
            detuning=self.require_float("protocol.delta"),
            kerr=self.require_float("protocol.u"),
            kappa=self.require_float("protocol.kappa"),
            period=self.require_float("protocol.period"),
        )

    def sweep_values(self, axis_default="eps0") -> tuple:
        """Sweep axis and values from either an explicit list or start/stop/step."""
        axis = self.get("sweep.axis", axis_default)
        if axis not in ("eps0", "u"):
            raise ConfigInvalid(
                f"sweep.axis must be 'eps0' or 'u', got {axis!r}", key="sweep.axis"
            )
        explicit = self.get(f"sweep.{axis}_values")
        if explicit is not None:
            values = np.asarray(explicit, dtype=float)
        else:
            try:
                start = self.require_float(f"sweep.{axis}_start")
                stop = self.require_float(f"sweep.{axis}_stop")
                step = self.require_float(f"sweep.{axis}_step")
            except ConfigInvalid:
                raise ConfigInvalid(
                    f"sweep needs either sweep.{axis}_values or "
                    f"sweep.{axis}_start/_stop/_step",
                    key=f"sweep.{axis}_values",
                )
            if step <= 0 or stop < start:
                raise ConfigInvalid(
                    "sweep range must have positive step and stop >= start",
                    key=f"sweep.{axis}_step",
                )
            count = int(np.floor((stop - start) / step + 1e-9)) + 1
            values = start + step * np.arange(count)
        if values.size == 0:
            raise ConfigInvalid("sweep range is empty", key=f"sweep.{axis}_values")
        if np.any(np.diff(values) <= 0):
            raise ConfigInvalid(
                "sweep values must be strictly increasing", key=f"sweep.{axis}_values"
            )
        return axis, values

    def cutoffs(self) -> list:
        value = self.get("run.cutoffs", self.get("run.cutoff"))
        if value is None:
            raise ConfigInvalid("run.cutoff (or run.cutoffs list) is required", key="run.cutoff")
        if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
            return [int(value)]
        if isinstance(value, (list, tuple)) and value and all(
            isinstance(v, (int, np.integer)) and not isinstance(v, bool) for v in value
        ):
            return [int(v) for v in value]
        raise ConfigInvalid(
            f"cutoff must be an integer or list of integers, got {value!r}", key="run.cutoff"
        )

    def echo(self) -> dict:
        """JSON-serializable copy of every resolved key (for sidecars)."""
        def clean(v):
            if isinstance(v, np.integer):
                return int(v)
            if isinstance(v, np.floating):
                return float(v)
            if isinstance(v, (list, tuple)):
                return [clean(x) for x in v]
            return v

        return {k: clean(v) for k, v in sorted(self.values.items())}
