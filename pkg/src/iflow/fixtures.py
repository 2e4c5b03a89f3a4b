"""Bundled networks: the illustrative nine-node feeder in three configurations."""
from __future__ import annotations

from importlib import resources

from .network import Network, parse_network

NAMES = ("table1", "config1", "config2", "config3")


def fixture_text(name: str) -> str:
    if name not in NAMES:
        raise KeyError(f"unknown fixture {name!r}; choose from {NAMES}")
    return resources.files("iflow").joinpath("data", f"{name}.net").read_text(encoding="utf-8")


def load_fixture(name: str) -> Network:
    return parse_network(fixture_text(name))


def fixture_path(name: str):
    return resources.files("iflow").joinpath("data", f"{name}.net")
