"""Rate constants, certification and invariant manifolds for maps on a solid torus."""

import json

from ._nhim import (
    ConfigError,
    ManifoldError,
    RunConfig,
    __version__,
    evaluate,
    jacobian,
    load_config,
    model_names,
    parse_config,
    rate_constants,
    sweep,
    wcs_graph,
    wcu_graph,
)
from . import _nhim


def certify(config, k=None):
    """Certificate of `config` as a dict (no timestamp)."""
    return json.loads(_nhim.certify_json(config, k))


def manifold(config, target, out_dir, z=None, n=None):
    """Run one manifold target, write its CSV and return the diagnostics."""
    return json.loads(_nhim.manifold_json(config, target, z, n, out_dir))


__all__ = [
    "ConfigError",
    "ManifoldError",
    "RunConfig",
    "__version__",
    "certify",
    "evaluate",
    "jacobian",
    "load_config",
    "manifold",
    "model_names",
    "parse_config",
    "rate_constants",
    "sweep",
    "wcs_graph",
    "wcu_graph",
]
