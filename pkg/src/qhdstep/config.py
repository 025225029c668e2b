"""Run configuration: defaults, validation and parsing."""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml

from .boundary import compute_tau, inlet_gradient
from .grid import GridSpec, build_grid


PRECONDITIONERS = ("fastpoisson", "jacobi", "ilu")


class ConfigError(ValueError):
    """Malformed or out-of-range configuration."""


@dataclass
class Config:
    """All dimensionless run parameters.

    ``tau0`` defaults to ``0.5 / re``; ``dy`` defaults to ``dx``. When
    ``nx``/``ny`` are given they replace the spacings. ``h_ratio = 0`` is the
    straight channel with inflow across the whole left boundary.
    """

    re: float = 100.0
    h_ratio: float = 0.5
    length: float = 7.5
    dx: float | None = 0.025
    dy: float | None = None
    nx: int | None = None
    ny: int | None = None
    dt: float = 1e-4
    tau0: float | None = None
    gamma: float = 1.4
    Sc: float = 1.0
    Ma: float = 0.0
    Re_s: float = 2e6
    J: float = 1.0
    conv_tol: float = 1e-3
    t_max: float = 100.0
    poisson_tol: float = 1e-8
    poisson_max_iter: int = 5000
    preconditioner: str = "fastpoisson"
    check_every: int = 1
    log_every: int = 100
    snapshot_every: int = 2000
    inlet_gradient: float | None = None

    def __post_init__(self):
        if self.tau0 is None and isinstance(self.re, (int, float)) and self.re > 0:
            self.tau0 = 0.5 / self.re
        if self.dy is None and self.ny is None and self.dx is not None:
            self.dy = self.dx
        self.validate()

    def validate(self) -> None:
        def need(cond: bool, key: str, msg: str):
            if not cond:
                raise ConfigError(f"{key}: {msg} (got {getattr(self, key)!r})")

        need(self.re > 0, "re", "must be positive")
        need(0.0 <= self.h_ratio < 1.0, "h_ratio", "must lie in [0, 1)")
        need(self.length > 0, "length", "must be positive")
        need(self.dt > 0, "dt", "must be positive")
        need(self.tau0 is not None and self.tau0 >= 0, "tau0", "must be non-negative")
        need(self.conv_tol > 0, "conv_tol", "must be positive")
        need(self.t_max >= 0, "t_max", "must be non-negative")
        need(self.poisson_tol > 0, "poisson_tol", "must be positive")
        need(self.poisson_max_iter > 0, "poisson_max_iter", "must be positive")
        need(
            self.preconditioner in PRECONDITIONERS,
            "preconditioner",
            "must be one of " + ", ".join(PRECONDITIONERS),
        )
        need(self.Sc > 0, "Sc", "must be positive")
        need(self.Re_s > 0, "Re_s", "must be positive")
        need(self.gamma >= 0, "gamma", "must be non-negative")
        need(self.Ma >= 0, "Ma", "must be non-negative")
        need(self.check_every >= 1, "check_every", "must be at least 1")
        need(self.log_every >= 1, "log_every", "must be at least 1")
        need(self.snapshot_every >= 0, "snapshot_every", "must be non-negative")
        need(self.tau > 0, "tau0", "resulting tau must be positive")
        for key in ("dx", "dy"):
            v = getattr(self, key)
            need(v is None or v > 0, key, "must be positive")
        for key in ("nx", "ny"):
            v = getattr(self, key)
            need(v is None or v >= 3, key, "must be at least 3")
        need(self.dx is not None or self.nx is not None, "dx", "dx or nx is required")
        need(self.inlet_gradient is None or self.inlet_gradient < 0, "inlet_gradient", "must be negative")
        try:
            self.grid()
        except ValueError as exc:
            raise ConfigError(f"h_ratio: {exc}") from exc

    @property
    def nu(self) -> float:
        return 1.0 / self.re

    @property
    def tau(self) -> float:
        return compute_tau(self.gamma, self.Sc, self.Ma, self.Re_s, self.tau0)

    @property
    def gradient(self) -> float:
        """Inlet gradient that carries flow rate ``J`` (drives the inflow profile)."""
        return inlet_gradient(self.re, self.h_ratio, self.J, self.tau)

    @property
    def pressure_datum(self) -> float:
        """Neumann datum at the inflow; the override if set."""
        return self.gradient if self.inlet_gradient is None else self.inlet_gradient

    def grid(self) -> GridSpec:
        dx = None if self.nx is not None else self.dx
        dy = None if self.ny is not None else self.dy
        return build_grid(self.length, self.h_ratio, dx=dx, dy=dy, nx=self.nx, ny=self.ny)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    def derived(self) -> dict[str, Any]:
        g = self.grid()
        return {
            "nx": g.nx,
            "ny": g.ny,
            "dx": g.dx,
            "dy": g.dy,
            "equal_spacing": g.equal_spacing,
            "nu": self.nu,
            "tau": self.tau,
            "inlet_gradient": self.gradient,
            "pressure_datum": self.pressure_datum,
        }

    def replace(self, **changes) -> "Config":
        data = self.to_dict()
        if "re" in changes and "tau0" not in changes:
            data["tau0"] = None
        data.update(changes)
        return from_dict(data)


_FIELD_TYPES = {f.name: f.type for f in fields(Config)}


def _coerce(key: str, value: Any) -> Any:
    kind = _FIELD_TYPES[key]
    if value is None:
        if "None" not in kind:
            raise ConfigError(f"{key}: may not be null")
        return None
    try:
        if kind.startswith("int"):
            if isinstance(value, float) and not value.is_integer():
                raise ValueError
            return int(value)
        if kind.startswith("float"):
            if isinstance(value, bool):
                raise ValueError
            return float(value)
        if kind == "str":
            return str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: cannot interpret {value!r} as {kind}") from None
    return value


def from_dict(data: dict[str, Any]) -> Config:
    unknown = sorted(set(data) - set(_FIELD_TYPES))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    kwargs = {k: _coerce(k, v) for k, v in data.items()}
    if "t_max" in kwargs and kwargs["t_max"] is not None and math.isinf(kwargs["t_max"]):
        kwargs["t_max"] = math.inf
    return Config(**kwargs)


# compact flow style ``{re:100}``: YAML needs a space after the key colon
_COMPACT_KEY = re.compile(r"(?<=[{,])(\s*[A-Za-z_][A-Za-z0-9_]*):(?=[^\s])")


def parse_config(text: str) -> Config:
    """Parse a YAML/JSON key-value document into a fully defaulted :class:`Config`.

    The compact form ``{re:100, tau0:0.05}`` is accepted as well.
    """
    try:
        data = yaml.safe_load(_COMPACT_KEY.sub(r"\1: ", text))
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config document: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("config document must be a mapping of keys to values")
    return from_dict(data)


def load_config(path: str | Path) -> Config:
    return parse_config(Path(path).read_text(encoding="utf-8"))
