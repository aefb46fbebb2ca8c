"""Query vectors from clicked-product embeddings, plus the evaluation kit."""

import json as _json

from ._core import *  # noqa: F401,F403
from ._core import run as _run


def run(command, config=None, mode="merged", **overrides):
    """Run a pipeline subcommand with a config dict; keyword overrides win."""
    cfg = dict(config or {})
    cfg.update(overrides)
    return _run(command, _json.dumps(cfg), mode)
