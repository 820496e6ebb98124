"""Scenario configuration: a flat key = value format with one nested block.

Example::

    name = case5
    w = 10
    n_bins = 1000
    p = 100
    c = 9
    methods = optimal, water_pouring, uniform, limited_rate_wp
    channel {
      type = allpass
    }

Channel types: ``allpass``; ``gaussian_mix`` (two Gaussian bumps of unit
width, centers given as fractions of the bandwidth, optionally pdf
normalized); ``inverse`` wrapping an ``inner { ... }`` spec (amplitude
``max H - H``); ``tabulated`` (CSV file with header ``f,h2`` and one row per
bin).  The amplitude response is sampled at bin centers and squared.
"""

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

from .channel import ChannelGrid

__all__ = [
    "ChannelSpec",
    "ScenarioConfig",
    "ConfigError",
    "parse_config",
    "render_config",
    "build_grid",
]

METHODS = ("optimal", "water_pouring", "uniform", "limited_rate_wp", "flat_sweep")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ChannelSpec:
    kind: str
    alpha1: float = 0.0
    f1: float = 0.0
    alpha2: float = 0.0
    f2: float = 0.0
    normalized_pdf: bool = True
    path: str = ""
    inner: "ChannelSpec" = None

    def validate(self, line=0):
        if self.kind not in ("allpass", "gaussian_mix", "inverse", "tabulated"):
            raise ConfigError(f"line {line}: unknown channel type {self.kind!r}")
        if self.kind == "gaussian_mix":
            for name in ("f1", "f2"):
                v = getattr(self, name)
                if not 0.0 <= v <= 1.0:
                    raise ConfigError(
                        f"line {line}: {name} must be a fraction in [0, 1], got {v}"
                    )
        if self.kind == "inverse":
            if self.inner is None:
                raise ConfigError(f"line {line}: inverse channel needs inner block")
            self.inner.validate(line)
        if self.kind == "tabulated" and not self.path:
            raise ConfigError(f"line {line}: tabulated channel needs path")


@dataclass(frozen=True)
class ScenarioConfig:
    w: float
    n_bins: int
    p: float
    c: float
    channel: ChannelSpec
    methods: tuple = ("optimal", "water_pouring", "uniform", "limited_rate_wp")
    name: str = "scenario"

    def validate(self):
        if not (self.w > 0 and self.p > 0 and self.c > 0):
            raise ConfigError("w, p and c must be > 0")
        if self.n_bins < 1:
            raise ConfigError(f"n_bins must be >= 1, got {self.n_bins}")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"unknown method {m!r}; choose from {METHODS}")
        self.channel.validate()
        return self


def _parse_scalar(key, raw, line):
    raw = raw.strip()
    if key in ("w", "p", "c", "alpha1", "alpha2", "f1", "f2"):
        try:
            return float(raw)
        except ValueError:
            raise ConfigError(f"line {line}: {key} expects a number, got {raw!r}")
    if key == "n_bins":
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"line {line}: n_bins expects an integer, got {raw!r}")
    if key == "normalized_pdf":
        low = raw.lower()
        if low in ("true", "yes", "1"):
            return True
        if low in ("false", "no", "0"):
            return False
        raise ConfigError(f"line {line}: normalized_pdf expects a boolean, got {raw!r}")
    if key == "methods":
        return tuple(m.strip() for m in raw.split(",") if m.strip())
    return raw


def _parse_block(lines, i, allowed_blocks):
    """Parse ``key = value`` lines until the closing brace; returns (dict, next_i)."""
    out = {}
    while i < len(lines):
        lineno, text = lines[i]
        if text == "}":
            return out, i + 1
        if text.endswith("{"):
            name = text[:-1].strip()
            if name not in allowed_blocks:
                raise ConfigError(f"line {lineno}: unexpected block {name!r}")
            sub, i = _parse_block(lines, i + 1, allowed_blocks)
            out[name] = (sub, lineno)
            continue
        if "=" not in text:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {text!r}")
        key, _, raw = text.partition("=")
        key = key.strip()
        out[key] = (_parse_scalar(key, raw, lineno), lineno)
        i += 1
    raise ConfigError(f"line {lines[-1][0]}: unterminated block")


def _channel_from_dict(d, lineno):
    kind = d.pop("type", (None, lineno))[0]
    if kind is None:
        raise ConfigError(f"line {lineno}: channel block needs type = ...")
    inner = None
    if "inner" in d:
        sub, subline = d.pop("inner")
        inner = _channel_from_dict(sub, subline)
    kwargs = {k: v for k, (v, _) in d.items()}
    unknown = set(kwargs) - {"alpha1", "f1", "alpha2", "f2", "normalized_pdf", "path"}
    if unknown:
        raise ConfigError(f"line {lineno}: unknown channel keys {sorted(unknown)}")
    spec = ChannelSpec(kind=kind, inner=inner, **kwargs)
    spec.validate(lineno)
    return spec


def parse_config(text):
    """Parse a scenario document; raises :class:`ConfigError` with line info."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append((lineno, stripped))
    if not lines:
        raise ConfigError("empty configuration")
    top, i = {}, 0
    while i < len(lines):
        lineno, text_i = lines[i]
        if text_i.endswith("{"):
            name = text_i[:-1].strip()
            if name != "channel":
                raise ConfigError(f"line {lineno}: unexpected block {name!r}")
            sub, i = _parse_block(lines, i + 1, allowed_blocks=("inner",))
            top["channel"] = (sub, lineno)
            continue
        if "=" not in text_i:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {text_i!r}")
        key, _, raw = text_i.partition("=")
        key = key.strip()
        top[key] = (_parse_scalar(key, raw, lineno), lineno)
        i += 1

    if "channel" not in top:
        raise ConfigError("missing channel { ... } block")
    chan_dict, chan_line = top.pop("channel")
    channel = _channel_from_dict(chan_dict, chan_line)

    required = {"w", "n_bins", "p", "c"}
    missing = required - set(top)
    if missing:
        raise ConfigError(f"missing required keys: {sorted(missing)}")
    kwargs = {k: v for k, (v, _) in top.items()}
    unknown = set(kwargs) - required - {"methods", "name"}
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}")
    return ScenarioConfig(channel=channel, **kwargs).validate()


def _render_channel(spec, indent):
    pad = "  " * indent
    lines = [f"{pad}type = {spec.kind}"]
    if spec.kind == "gaussian_mix":
        for k in ("alpha1", "f1", "alpha2", "f2"):
            lines.append(f"{pad}{k} = {getattr(spec, k)!r}")
        lines.append(f"{pad}normalized_pdf = {'true' if spec.normalized_pdf else 'false'}")
    if spec.kind == "tabulated":
        lines.append(f"{pad}path = {spec.path}")
    if spec.kind == "inverse":
        lines.append(f"{pad}inner {{")
        lines.append(_render_channel(spec.inner, indent + 1))
        lines.append(f"{pad}}}")
    return "\n".join(lines)


def render_config(cfg):
    """Serialize a config so that ``parse_config(render_config(cfg)) == cfg``."""
    lines = [
        f"name = {cfg.name}",
        f"w = {cfg.w!r}",
        f"n_bins = {cfg.n_bins}",
        f"p = {cfg.p!r}",
        f"c = {cfg.c!r}",
        f"methods = {', '.join(cfg.methods)}",
        "channel {",
        _render_channel(cfg.channel, 1),
        "}",
    ]
    return "\n".join(lines) + "\n"


def _amplitude(spec, f, w):
    if spec.kind == "allpass":
        return np.ones_like(f)
    if spec.kind == "gaussian_mix":
        norm = 1.0 / math.sqrt(2.0 * math.pi) if spec.normalized_pdf else 1.0
        bump1 = norm * np.exp(-0.5 * (f - spec.f1 * w) ** 2)
        bump2 = norm * np.exp(-0.5 * (f - spec.f2 * w) ** 2)
        return spec.alpha1 * bump1 + spec.alpha2 * bump2
    if spec.kind == "inverse":
        h = _amplitude(spec.inner, f, w)
        return float(h.max()) - h
    if spec.kind == "tabulated":
        with open(spec.path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if len(rows) != f.size:
            raise ConfigError(
                f"tabulated channel {spec.path!r} has {len(rows)} rows, "
                f"config expects {f.size} bins"
            )
        return np.sqrt(np.array([float(r["h2"]) for r in rows]))
    raise ConfigError(f"unknown channel type {spec.kind!r}")


def build_grid(cfg, n_bins=None):
    """Sample the configured channel into a :class:`ChannelGrid`."""
    n = n_bins if n_bins is not None else cfg.n_bins
    if n_bins is not None and cfg.channel.kind == "tabulated":
        n = cfg.n_bins  # the file fixes the sampling
    f = (np.arange(n) + 0.5) * (cfg.w / n)
    h = _amplitude(cfg.channel, f, cfg.w)
    return ChannelGrid(w=cfg.w, h2=h * h)


def with_overrides(cfg, n_bins=None):
    out = cfg
    if n_bins is not None and cfg.channel.kind != "tabulated":
        out = replace(out, n_bins=n_bins)
    return out
