"""Run configuration: flat ``key = value`` text with dotted sections.

Every key has a type and a default; unknown keys and malformed values are
rejected. A resolved configuration serializes to a canonical text whose
SHA-256 is the provenance hash echoed into every output file, and that text
parses back to an equal configuration.
"""
import hashlib
import math
from dataclasses import dataclass

from .constants import C
from .errors import ConfigError

COMMANDS = ("reflectance", "force", "equilibrium", "potential", "trajectory", "validate", "sweep")
SURFACES = ("pmc", "pec", "windowed", "gradient", "composite")
MATERIAL_KINDS = ("lorentz", "drude", "constant")

FLOAT = "float"
OPT_FLOAT = "float?"
INT = "int"
STR = "str"
BOOL = "bool"
FLOAT_LIST = "float[]"

# key -> (type, default)
SCHEMA = {
    "command": (STR, "force"),
    "material": (STR, "sic"),
    "material.kind": (STR, "lorentz"),
    "material.eps_inf": (OPT_FLOAT, None),
    "material.omega_L": (OPT_FLOAT, None),
    "material.omega_T": (OPT_FLOAT, None),
    "material.omega_P": (OPT_FLOAT, None),
    "material.gamma": (OPT_FLOAT, None),
    "material.eps": (OPT_FLOAT, None),
    "material.density": (OPT_FLOAT, None),
    "radius": (FLOAT, 50e-9),
    "surface": (STR, "pmc"),
    "surface.omega_min": (OPT_FLOAT, None),
    "surface.omega_max": (OPT_FLOAT, None),
    "surface.kpar_min": (OPT_FLOAT, None),
    "surface.kpar_max": (OPT_FLOAT, None),
    "surface.method": (STR, "imaginary"),
    "surface.eps1": (FLOAT, 100.0),
    "surface.b": (FLOAT, 1000e-9),
    "surface.L": (FLOAT, 120e-9),
    "surface.mu1": (FLOAT, 1.0),
    "surface.pmc_duality": (BOOL, False),
    "surface.convention": (STR, "physical"),
    "thermal.t_em": (OPT_FLOAT, None),
    "thermal.t_np": (OPT_FLOAT, None),
    "thermal.t_s": (FLOAT, 0.0),
    "grid.z_min": (FLOAT, 2e-7),
    "grid.z_max": (FLOAT, 2e-6),
    "grid.points": (INT, 200),
    "grid.omega_min": (FLOAT, 1e13),
    "grid.omega_max": (FLOAT, 5e15),
    "grid.omega_points": (INT, 200),
    "grid.kpar_min": (FLOAT, 0.0),
    "grid.kpar_max": (FLOAT, 5e15 / C),
    "grid.kpar_points": (INT, 200),
    "equilibrium.z_lo": (FLOAT, 5e-8),
    "equilibrium.z_hi": (FLOAT, 5e-6),
    "trajectory.z_init": (FLOAT, 0.57e-6),
    "trajectory.v_init": (FLOAT, 0.0),
    "trajectory.t_end": (FLOAT, 5e-3),
    "trajectory.dt": (FLOAT, 1e-7),
    "sweep.temperatures": (FLOAT_LIST, (0.0,)),
    "sweep.omega_max": (FLOAT_LIST, ()),
    "output": (STR, "-"),
}

# keys excluded from the echoed configuration and its hash
LOCAL_KEYS = ("output",)

_CHOICES = {
    "command": COMMANDS,
    "surface": SURFACES,
    "material.kind": MATERIAL_KINDS,
    "surface.method": ("imaginary", "real"),
    "surface.convention": ("physical", "k0_scaled"),
}


def _parse_float(key, text):
    try:
        v = float(text)
    except ValueError:
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None
    if not math.isfinite(v):
        raise ConfigError(f"{key}: value must be finite, got {text!r}")
    return v


def parse_value(key, text):
    """Convert the text form of ``key`` to its typed value."""
    if key not in SCHEMA:
        raise ConfigError(f"unknown config key {key!r}")
    kind = SCHEMA[key][0]
    text = text.strip()
    if kind == FLOAT:
        return _parse_float(key, text)
    if kind == OPT_FLOAT:
        return None if text.lower() == "none" else _parse_float(key, text)
    if kind == INT:
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {text!r}") from None
    if kind == BOOL:
        low = text.lower()
        if low in ("true", "1", "yes"):
            return True
        if low in ("false", "0", "no"):
            return False
        raise ConfigError(f"{key}: expected true/false, got {text!r}")
    if kind == FLOAT_LIST:
        if text == "":
            return ()
        return tuple(_parse_float(key, t) for t in text.split(","))
    if key in _CHOICES:
        text = text.lower()
        if text not in _CHOICES[key]:
            raise ConfigError(f"{key}: expected one of {list(_CHOICES[key])}, got {text!r}")
    return text


def format_value(key, value):
    """Canonical text of a typed value (round-trip floats)."""
    kind = SCHEMA[key][0]
    if value is None:
        return "none"
    if kind in (FLOAT, OPT_FLOAT):
        return repr(float(value))
    if kind == BOOL:
        return "true" if value else "false"
    if kind == FLOAT_LIST:
        return ",".join(repr(float(v)) for v in value)
    return str(value)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration; ``values`` maps every schema key to its value."""

    values: tuple

    @classmethod
    def from_dict(cls, overrides=None):
        vals = {k: d for k, (_, d) in SCHEMA.items()}
        for k, v in (overrides or {}).items():
            if k not in SCHEMA:
                raise ConfigError(f"unknown config key {k!r}")
            vals[k] = parse_value(k, v) if isinstance(v, str) else v
        return cls(tuple(sorted(vals.items())))

    def as_dict(self):
        return dict(self.values)

    def __getitem__(self, key):
        return self.as_dict()[key]

    def replace(self, **updates):
        d = self.as_dict()
        for k, v in updates.items():
            d[k.replace("__", ".")] = v
        return RunConfig.from_dict(d)

    def canonical_text(self):
        """Sorted ``key = value`` lines; the output destination is not part of provenance."""
        return "".join(f"{k} = {format_value(k, v)}\n" for k, v in self.values if k not in LOCAL_KEYS)

    def equivalent(self, other):
        """Equal up to keys that only choose where results are written."""
        return self.canonical_text() == other.canonical_text()

    def sha256(self):
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()

    def header_lines(self, prefix="# "):
        lines = [f"{prefix}pmclev config_sha256 = {self.sha256()}"]
        lines += [prefix + line for line in self.canonical_text().splitlines()]
        return lines


def parse_text(text):
    """Parse ``key = value`` lines into raw string pairs.

    Blank lines and lines starting with ``#`` are ignored. Duplicate keys
    are an error.
    """
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {n}: expected 'key = value', got {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"line {n}: unknown config key {key!r}")
        if key in out:
            raise ConfigError(f"line {n}: duplicate key {key!r}")
        out[key] = val
    return out


def load(path=None, overrides=None):
    """Build a :class:`RunConfig` from an optional file plus overrides (overrides win)."""
    raw = {}
    if path is not None:
        try:
            with open(path) as fh:
                raw = parse_text(fh.read())
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path!r}: {exc}") from None
    raw.update(overrides or {})
    return RunConfig.from_dict(raw)


def parse_header(lines, prefix="# "):
    """Recover the configuration echoed in an output header."""
    body = []
    for line in lines:
        if not line.startswith(prefix):
            break
        line = line[len(prefix):]
        if line.startswith("pmclev config_sha256"):
            continue
        body.append(line)
    return RunConfig.from_dict(parse_text("\n".join(body)))
