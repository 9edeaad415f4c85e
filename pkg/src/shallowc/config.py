"""Harness configuration: flat ``key = value`` files plus command-line overrides."""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field, fields, replace

from .values import DEFAULT_PARAMS, ImplParams

FUEL_BASE = 64
SIZE_KEYS = ('bits_char', 'bits_short', 'bits_int', 'bits_long', 'bits_llong')
RUN_KEYS = ('tests', 'seed', 'fuel_cap', 'max_array_len', 'indent', 'step_cap', 'max_rejects')


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class HarnessConfig:
    params: ImplParams = field(default=DEFAULT_PARAMS)
    tests: int = 1000
    seed: int = 42
    fuel_cap: int = 2 ** 24
    max_array_len: int = 8
    indent: int = 4
    step_cap: int = 2 ** 20
    max_rejects: int = 1000

    def __post_init__(self):
        for f in fields(self):
            if f.name == 'params':
                continue
            v = getattr(self, f.name)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ConfigError(f'{f.name} must be an integer, got {v!r}')
            if f.name == 'seed':
                if v < 0:
                    raise ConfigError('seed must be non-negative')
            elif v <= 0:
                raise ConfigError(f'{f.name} must be positive, got {v}')

    def to_json(self) -> dict:
        d = {k: getattr(self.params, k) for k in SIZE_KEYS}
        d.update({k: getattr(self, k) for k in RUN_KEYS})
        return d


def parse_settings(text: str, allowed=SIZE_KEYS + RUN_KEYS, source='config') -> dict[str, int]:
    """Parse flat ``key = value`` lines (``#`` and ``;`` start comments)."""
    cp = configparser.ConfigParser(inline_comment_prefixes=('#', ';'))
    try:
        cp.read_string('[settings]\n' + text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f'{source}: {exc}') from None
    out = {}
    for key, raw in cp['settings'].items():
        if key not in allowed:
            raise ConfigError(f'{source}: unknown key {key!r}')
        try:
            out[key] = int(raw.replace('_', ''), 0)
        except ValueError:
            raise ConfigError(f'{source}: {key} must be an integer, got {raw!r}') from None
    return out


def build_config(settings: dict[str, int], base: HarnessConfig = HarnessConfig()) -> HarnessConfig:
    sizes = {k: v for k, v in settings.items() if k in SIZE_KEYS}
    rest = {k: v for k, v in settings.items() if k in RUN_KEYS}
    try:
        params = replace(base.params, **sizes) if sizes else base.params
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return replace(base, params=params, **rest)


def load_config(path: str, base: HarnessConfig = HarnessConfig()) -> HarnessConfig:
    with open(path, encoding='utf-8') as fh:
        return build_config(parse_settings(fh.read(), source=path), base)


def load_sizes(path: str, base: HarnessConfig = HarnessConfig()) -> HarnessConfig:
    with open(path, encoding='utf-8') as fh:
        return build_config(parse_settings(fh.read(), SIZE_KEYS, source=path), base)
