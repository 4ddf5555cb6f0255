"""Named benchmark scenarios: <n_uavs>U<n_obstacles>O at the default constants."""

from __future__ import annotations

from dataclasses import replace

from .env import ScenarioConfig

_SIZES = [(2, 1), (3, 1), (5, 1), (7, 1), (10, 1), (3, 2), (5, 2), (7, 2)]

SCENARIOS = {f"{n}U{m}O": ScenarioConfig(n_uavs=n, n_obstacles=m) for n, m in _SIZES}


def get_scenario(name: str, **overrides) -> ScenarioConfig:
    """A fresh config for a named scenario, with optional field overrides."""
    if name not in SCENARIOS:
        known = ", ".join(sorted(SCENARIOS))
        raise KeyError(f"unknown scenario {name!r}; known: {known}")
    return replace(SCENARIOS[name], **overrides)
