"""Line-oriented run configuration.

Grammar::

    file    := line*
    line    := blank | comment | section | entry
    comment := ("#" | ";") text
    section := "[" name "]"
    entry   := key "=" value [ " #" text ]

Keys are only valid inside their section; unknown sections or keys,
duplicates, malformed values and out-of-range values are reported as
``path:line: message``. Lists are comma-separated; explicit positions are
``x y`` pairs separated by ``;``. See the README for every key.

A resolved configuration serializes back to this grammar
(:meth:`RunConfig.to_text`), which is what the CLI writes into the header of
its CSV output, so a run can be repeated from its output alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import geometry
from .experiment import LEAKAGE_MODES, NoiseModel
from .model import VModelParams


class ConfigError(ValueError):
    def __init__(self, path: str, line: int | None, message: str):
        self.path, self.line, self.message = path, line, message
        where = f"{path}:{line}" if line is not None else path
        super().__init__(f"{where}: {message}")


# value parsers; raise ValueError with a readable message


def _float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise ValueError(f"expected a finite number, got {text!r}")
    return value


def _int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"expected an integer, got {text!r}") from None


def _bool(text: str) -> bool:
    low = text.lower()
    if low in ("true", "yes", "on", "1"):
        return True
    if low in ("false", "no", "off", "0"):
        return False
    raise ValueError(f"expected true or false, got {text!r}")


def _str(text: str) -> str:
    return text


def _int_list(text: str) -> tuple[int, ...]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("expected a comma-separated list of integers")
    return tuple(_int(p) for p in parts)


def _pattern_list(text: str) -> tuple[str, ...]:
    parts = tuple(p.strip() for p in text.split(",") if p.strip())
    if not parts:
        raise ValueError("expected a comma-separated list of detection patterns")
    for p in parts:
        if set(p) - {"0", "1"}:
            raise ValueError(f"detection patterns are strings of 0 and 1, got {p!r}")
    return parts


def _positions(text: str) -> tuple[tuple[float, float], ...]:
    out = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        xy = chunk.split()
        if len(xy) != 2:
            raise ValueError(f"expected 'x y' pairs separated by ';', got {chunk!r}")
        out.append((_float(xy[0]), _float(xy[1])))
    if not out:
        raise ValueError("positions list is empty")
    return tuple(out)


# range checks; return an error message or None


def _positive(x):
    return None if x > 0 else "must be positive"


def _nonneg(x):
    return None if x >= 0 else "must be non-negative"


def _probability(x):
    return None if 0.0 <= x <= 1.0 else "must be a probability in [0, 1]"


def _at_least_one(x):
    return None if x >= 1 else "must be >= 1"


def _one_of(*choices):
    def check(x):
        return None if x in choices else f"must be one of {', '.join(map(str, choices))}"

    return check


def _gamma(x):
    return None if 0.0 <= x < 180.0 else "must lie in [0, 180) degrees"


@dataclass(frozen=True)
class Field:
    parse: Callable[[str], Any]
    default: Any
    check: Callable[[Any], str | None] | None = None


GEOMETRY_KINDS = ("equilateral", "isosceles", "square", "honeycomb", "explicit")

SCHEMA: dict[str, dict[str, Field]] = {
    "geometry": {
        "kind": Field(_str, "equilateral", _one_of(*GEOMETRY_KINDS)),
        "side": Field(_float, 11.0, _positive),
        "gamma_deg": Field(_float, 120.0, _gamma),
        "r": Field(_float, 11.0, _positive),
        "positions": Field(_positions, None),
        "r_ref": Field(_float, 11.0, _positive),
    },
    "model": {
        "t_a": Field(_float, 1.5, _nonneg),
        "t_b": Field(_float, 0.55, _nonneg),
        "w": Field(_float, 2.7, _nonneg),
        "mu": Field(_float, -16.0),
        "field_sign": Field(_int, 1, _one_of(1, -1)),
        "vdw": Field(_float, 0.0),
    },
    "initial": {
        "excited": Field(_int_list, (1,)),
    },
    "time": {
        "start": Field(_float, 0.0, _nonneg),
        "stop": Field(_float, 2.0, _nonneg),
        "points": Field(_int, 201, _at_least_one),
    },
    "noise": {
        "vacancy_p": Field(_float, 0.17, _probability),
        "sigma_pos": Field(_float, geometry.DEFAULT_JITTER_SIGMA, _nonneg),
        "eps_rydberg_as_ground": Field(_float, 0.05, _probability),
        "eps_ground_as_rydberg": Field(_float, 0.05, _probability),
        "prep_leakage": Field(_float, 0.05, _probability),
        "leakage_mode": Field(_str, "failed_pulse", _one_of(*LEAKAGE_MODES)),
        "n_samples": Field(_int, 500, _at_least_one),
        "two_excitation_scale": Field(_float, 1.0, _nonneg),
        "sample_readout": Field(_bool, True),
    },
    "run": {
        "seed": Field(_int, 0, _nonneg),
        "workers": Field(_int, 1, _at_least_one),
    },
    "output": {
        "report": Field(_pattern_list, None),
    },
    "scan": {
        "gamma_start": Field(_float, 0.0, _gamma),
        "gamma_stop": Field(_float, 90.0, _gamma),
        "gamma_step": Field(_float, 1.0, _positive),
        "tau": Field(_float, 0.4, _nonneg),
        "r": Field(_float, 11.0, _positive),
        "excited": Field(_int, 2, _one_of(1, 2, 3)),
    },
    "anyon": {
        "threshold": Field(_float, 1e-10, _positive),
        "samples": Field(_int, 100, _nonneg),
        "seed": Field(_int, 0, _nonneg),
        "phi": Field(_float, math.pi / 6),
        "t": Field(_float, 0.872, _nonneg),
        "delta": Field(_float, (0.55 - 0.872) / 0.872),
    },
}

OPTIONAL_SECTIONS = ("noise",)


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple) and value and isinstance(value[0], tuple):
        return "; ".join(f"{x!r} {y!r}" for x, y in value)
    if isinstance(value, tuple):
        return ", ".join(str(v) for v in value)
    return str(value)


@dataclass
class RunConfig:
    """Resolved configuration: every key of every section, defaults filled in.
    ``sections_present`` records which optional sections were given."""

    values: dict[str, dict[str, Any]]
    sections_present: frozenset = frozenset()
    path: str = "<config>"
    lines: dict[tuple[str, str], int] = field(default_factory=dict)

    def __getitem__(self, section: str) -> dict[str, Any]:
        return self.values[section]

    @property
    def monte_carlo(self) -> bool:
        return "noise" in self.sections_present

    def error(self, section: str, key: str, message: str) -> ConfigError:
        return ConfigError(self.path, self.lines.get((section, key)), f"[{section}] {key} {message}")

    def layout(self) -> geometry.SiteLayout:
        g = self.values["geometry"]
        kind = g["kind"]
        if kind == "equilateral":
            return geometry.equilateral(g["side"])
        if kind == "isosceles":
            return geometry.isosceles(g["gamma_deg"], g["r"])
        if kind == "square":
            return geometry.square(g["side"])
        if kind == "honeycomb":
            return geometry.honeycomb(g["side"])
        if g["positions"] is None:
            raise self.error("geometry", "positions", "is required when kind = explicit")
        try:
            return geometry.explicit(g["positions"], g["r_ref"])
        except ValueError as exc:
            raise self.error("geometry", "positions", str(exc)) from None

    def params(self) -> VModelParams:
        m = self.values["model"]
        return VModelParams(m["t_a"], m["t_b"], m["w"], m["mu"], m["field_sign"])

    def require_nonzero_mu(self) -> None:
        if self.values["model"]["mu"] == 0:
            raise self.error("model", "mu", "must be nonzero for perturbative couplings")

    def excited(self, n_sites: int) -> tuple[int, ...]:
        """0-based indices of the initially excited sites."""
        sites = self.values["initial"]["excited"]
        for s in sites:
            if not 1 <= s <= n_sites:
                raise self.error("initial", "excited", f"site {s} out of range 1..{n_sites}")
        if len(set(sites)) != len(sites):
            raise self.error("initial", "excited", "lists a site twice")
        return tuple(s - 1 for s in sites)

    def times(self) -> np.ndarray:
        t = self.values["time"]
        if t["stop"] < t["start"]:
            raise self.error("time", "stop", "must not be smaller than start")
        return np.linspace(t["start"], t["stop"], t["points"])

    def noise(self) -> NoiseModel:
        seed = self.values["run"]["seed"]
        if not self.monte_carlo:
            return NoiseModel.ideal(seed=seed)
        return NoiseModel(seed=seed, **self.values["noise"])

    def report_patterns(self, n_sites: int) -> tuple[str, ...]:
        report = self.values["output"]["report"]
        if report is None:
            return tuple("".join("1" if j == i else "0" for j in range(n_sites)) for i in range(n_sites))
        for p in report:
            if len(p) != n_sites:
                raise self.error("output", "report", f"pattern {p!r} does not have {n_sites} sites")
        return report

    def with_overrides(self, seed: int | None = None, samples: int | None = None) -> "RunConfig":
        values = {s: dict(v) for s, v in self.values.items()}
        present = set(self.sections_present)
        if seed is not None:
            if seed < 0:
                raise ConfigError("--seed", None, "must be non-negative")
            values["run"]["seed"] = seed
            values["anyon"]["seed"] = seed
        if samples is not None:
            if samples < 1:
                raise ConfigError("--samples", None, "must be >= 1")
            values["noise"]["n_samples"] = samples
            values["anyon"]["samples"] = samples
        return RunConfig(values, frozenset(present), self.path, dict(self.lines))

    def to_text(self) -> str:
        out = []
        for section, fields in SCHEMA.items():
            if section in OPTIONAL_SECTIONS and section not in self.sections_present:
                continue
            out.append(f"[{section}]")
            for key in fields:
                value = self.values[section][key]
                if value is not None:
                    out.append(f"{key} = {_format(value)}")
        return "\n".join(out) + "\n"


def _strip_comment(text: str) -> str:
    for marker in (" #", "\t#", " ;", "\t;"):
        pos = text.find(marker)
        if pos >= 0:
            text = text[:pos]
    return text.strip()


def parse_config_text(text: str, path: str = "<config>") -> RunConfig:
    values = {s: {k: f.default for k, f in fields.items()} for s, fields in SCHEMA.items()}
    present = set()
    lines: dict[tuple[str, str], int] = {}
    section = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#;":
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(path, lineno, f"malformed section header {line!r}")
            section = line[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(path, lineno, f"unknown section [{section}]; expected one of {', '.join(SCHEMA)}")
            if section in present:
                raise ConfigError(path, lineno, f"section [{section}] appears twice")
            present.add(section)
            continue
        if "=" not in line:
            raise ConfigError(path, lineno, f"expected 'key = value', got {line!r}")
        if section is None:
            raise ConfigError(path, lineno, "entry before the first [section] header")
        key, value = (part.strip() for part in line.split("=", 1))
        value = _strip_comment(value)
        spec = SCHEMA[section].get(key)
        if spec is None:
            raise ConfigError(path, lineno, f"unknown key {key!r} in [{section}]; expected one of {', '.join(SCHEMA[section])}")
        if (section, key) in lines:
            raise ConfigError(path, lineno, f"duplicate key {key!r} in [{section}]")
        try:
            parsed = spec.parse(value)
        except ValueError as exc:
            raise ConfigError(path, lineno, f"[{section}] {key}: {exc}") from None
        problem = spec.check(parsed) if spec.check else None
        if problem:
            raise ConfigError(path, lineno, f"[{section}] {key} = {value} {problem}")
        values[section][key] = parsed
        lines[(section, key)] = lineno
    return RunConfig(values, frozenset(present), path, lines)


def load_config(path: str) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(path, None, f"cannot read config: {exc.strerror or exc}") from None
    return parse_config_text(text, path)


def config_from_header(csv_text: str, path: str = "<header>") -> RunConfig:
    """Rebuild the configuration from the ``# `` header lines of a CSV
    written by the CLI."""
    body = [line[2:] for line in csv_text.splitlines() if line.startswith("# ")]
    return parse_config_text("\n".join(body), path)
