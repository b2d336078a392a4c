"""String-keyed backend registries.

Model availability drifts; the interchange contract does not. Every
extractor family has a dependency-light builtin backend that runs
anywhere, plus adapters for the heavyweight models, imported lazily so
the package works without them installed.
"""

from __future__ import annotations

from typing import Callable

_REGISTRIES: dict[str, dict[str, Callable]] = {}


def register(family: str, name: str):
    def wrap(factory: Callable) -> Callable:
        _REGISTRIES.setdefault(family, {})[name] = factory
        return factory
    return wrap


def get_backend(family: str, name: str, **kwargs):
    try:
        factory = _REGISTRIES[family][name]
    except KeyError:
        known = sorted(_REGISTRIES.get(family, {}))
        raise ValueError(
            f"unknown {family} backend '{name}' (known: {known})") from None
    return factory(**kwargs)


def known_backends(family: str) -> list[str]:
    return sorted(_REGISTRIES.get(family, {}))
