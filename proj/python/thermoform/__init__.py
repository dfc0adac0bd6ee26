"""Pressure curves, gaps and constructions for subshifts of finite type."""

import json

from ._thermoform import *  # noqa: F401,F403
from ._thermoform import Error, Sft, __version__, potential_from_json


def potential(sft, spec, depth=0):
    """Build a potential from a spec dict such as {"variant": "coordinate", "values": [0, -1]}."""
    return potential_from_json(sft, json.dumps(spec), depth)


__all__ = ["Error", "Sft", "potential", "__version__"]
