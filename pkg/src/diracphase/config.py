"""Flat ``key = value`` configuration with dotted namespaces and ``#`` comments."""

from __future__ import annotations

import math
from dataclasses import dataclass

DEFAULT_A0 = {1: 0.5, 2: 0.25, 3: 0.125}
DEFAULT_A1 = {1: -0.4j, 3: -0.15j}


class ConfigError(ValueError):
    pass


def _float_list(s):
    return tuple(float(x) for x in s.split(",") if x.strip())


def _int_list(s):
    return tuple(int(x) for x in s.split(",") if x.strip())


def _complex(s):
    """``"re,im"`` or a Python complex literal."""
    if isinstance(s, complex):
        return s
    s = str(s).strip()
    if "," in s:
        re, im = s.split(",")
        return complex(float(re), float(im))
    return complex(s.replace(" ", ""))


# key -> (parser, default)
SCHEMA = {
    "experiment": (str, "unitarity"),
    "seed": (int, 0),
    "grid.nmax": (int, 24),
    "grid.L": (float, 2 * math.pi),
    "grid.boundary": (str, "antiperiodic"),
    "model.mass": (float, 1.0),
    "pot.lambda": (float, 0.1),
    "pot.T": (float, 1.0),
    "evolve.tol": (float, 1e-10),
    "evolve.steps": (int, 64),
    "evolve.t_end": (float, math.nan),
    "quad.rtol": (float, 1e-8),
    "eq4.random": (int, 5),
    "eq4.random_nmax": (int, 12),
    "curvature.pairs": (int, 100),
    "curvature.nmax": (int, 7),
    "holonomy.pairs": (int, 10),
    "holonomy.nmax": (int, 3),
    "holonomy.h": (_float_list, (0.04, 0.02, 0.01)),
    "dyson.lambdas": (_float_list, (0.02, 0.04, 0.06, 0.08, 0.1)),
    "dyson.tol": (float, 1e-12),
    "dyson.nmax": (int, 12),
    "zeta.L": (float, 2 * math.pi),
    "zeta.boundary": (str, "periodic"),
    "zeta.nmax": (int, 64),
    "zeta.mu": (float, 0.0),
    "sym.order": (int, -1),
    "sym.remainder": (str, "none"),
    "sym.remainder.amplitude": (_complex, 1.0),
    "sym.remainder.scale": (float, 1.0),
    "anomaly.mu": (float, 1.0),
    "anomaly.k": (int, 1),
    "anomaly.cutoffs": (_int_list, (64, 128, 256, 512)),
    "anomaly.depth": (int, 3),
    "split.count": (int, 50),
    "split.nmax": (int, 24),
    "dressing.recipe": (str, "all"),
    "dressing.nmax": (_int_list, (8, 16, 24, 32)),
}

# open families: pot.A0.<k>, pot.A1.<k>, sym.cplus.<j>, sym.cminus.<j>
FAMILIES = {"pot.A0": (_complex, int), "pot.A1": (_complex, int),
            "sym.cplus": (_complex, int), "sym.cminus": (_complex, int)}


@dataclass
class Config:
    values: dict

    def __getitem__(self, key):
        return self.values[key]

    def get(self, key, default=None):
        return self.values.get(key, default)

    def family(self, prefix: str) -> dict:
        out = {}
        for key, v in self.values.items():
            if key.startswith(prefix + "."):
                out[int(key[len(prefix) + 1:])] = v
        return out

    @property
    def t_end(self) -> float:
        t = self.values["evolve.t_end"]
        return self.values["pot.T"] if math.isnan(t) else t

    def echo(self) -> dict:
        """Resolved configuration with plain JSON-friendly values."""
        out = {}
        for k in sorted(self.values):
            v = self.values[k]
            if isinstance(v, tuple):
                v = list(v)
            if isinstance(v, complex):
                v = format_complex(v)
            if isinstance(v, float) and not math.isfinite(v):
                v = repr(v)
            out[k] = v
        return out


def format_complex(z: complex) -> str:
    re, im = float(z.real), float(z.imag)
    sign = "-" if math.copysign(1.0, im) < 0 else "+"
    return f"{re!r}{sign}{abs(im)!r}j"


def _parser_for(key: str, where: str = ""):
    if key in SCHEMA:
        return SCHEMA[key][0]
    prefix, _, suffix = key.rpartition(".")
    if prefix not in FAMILIES:
        raise ConfigError(f"{where}unknown configuration key {key!r}")
    parser, index = FAMILIES[prefix]
    try:
        index(suffix)
    except ValueError:
        raise ConfigError(f"{where}bad index in {key!r}") from None
    return parser


def _parse_value(key: str, raw, line: int | None = None):
    """Parse string values; other values are taken as already typed."""
    where = f"line {line}: " if line is not None else ""
    parser = _parser_for(key, where)
    if not isinstance(raw, str):
        return raw
    try:
        return parser(raw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{where}invalid value for {key!r}: {raw!r} ({exc})") from None


def parse_text(text: str) -> dict:
    """Parse config text into ``{key: value}``; errors carry line numbers."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, raw = (s.strip() for s in body.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = _parse_value(key, raw, lineno)
    return out


def resolve(overrides: dict | None = None) -> Config:
    """Defaults, with the default potential's modes, updated by ``overrides``."""
    values = {k: default for k, (_, default) in SCHEMA.items()}
    overrides = dict(overrides or {})
    if not any(k.startswith(("pot.A0.", "pot.A1.")) for k in overrides):
        values.update({f"pot.A0.{k}": complex(v) for k, v in DEFAULT_A0.items()})
        values.update({f"pot.A1.{k}": complex(v) for k, v in DEFAULT_A1.items()})
    if not any(k.startswith(("sym.cplus.", "sym.cminus.")) for k in overrides):
        values.update({"sym.cplus.0": 1 + 0j, "sym.cminus.0": 1 + 0j})
    for k, v in overrides.items():
        values[k] = _parse_value(k, v)
    if values["grid.boundary"] not in ("periodic", "antiperiodic"):
        raise ConfigError("grid.boundary must be periodic or antiperiodic")
    if values["zeta.boundary"] not in ("periodic", "antiperiodic"):
        raise ConfigError("zeta.boundary must be periodic or antiperiodic")
    return Config(values)


def load(path) -> dict:
    try:
        with open(path) as fh:
            return parse_text(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
