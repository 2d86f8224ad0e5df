"""Orthogonal geodesic chords and brake orbits."""

import json

from . import _core

__all__ = ["ConfigError", "RunError", "axis_orbits", "commands", "run", "CONFIG_SCHEMA", "RESULTS_SCHEMA"]

CONFIG_SCHEMA = _core.config_schema
RESULTS_SCHEMA = _core.results_schema
axis_orbits = _core.axis_orbits


class RunError(RuntimeError):
    def __init__(self, document):
        self.document = document
        super().__init__(document["error"]["message"])


class ConfigError(RunError):
    @property
    def pointer(self):
        return self.document["error"].get("pointer")


def commands():
    return list(_core.commands())


def run(command, config, threads=1, seed=0):
    """Run a subcommand on a config (dict or JSON text).

    Returns (results, files) with files mapping artifact names to bytes.
    """
    text = config if isinstance(config, str) else json.dumps({"schema": CONFIG_SCHEMA, **config})
    code, results, files = _core.run(command, text, threads, seed)
    doc = json.loads(results)
    if code == 2:
        raise ConfigError(doc)
    if code:
        raise RunError(doc)
    return doc, dict(files)
