"""Kernel backend selection.

The compiled extension is used when importable; otherwise, or when the
environment variable ``DISMANTLE_PURE_PYTHON`` is set to a non-empty value
other than ``0``, the pure-Python fallback is loaded.  Both expose the same
functions and produce identical results for identical inputs.
"""

import os

from . import _pykernels

_force_python = os.environ.get("DISMANTLE_PURE_PYTHON", "") not in ("", "0")

if _force_python:
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:  # extension not built
        _impl = _pykernels

BACKEND = _impl.BACKEND

wilson = _impl.wilson
tree_order = _impl.tree_order
partition_tree = _impl.partition_tree
trial_batch = _impl.trial_batch
components = _impl.components
prune_edges = _impl.prune_edges


def compiled():
    """The compiled module, or None if it is unavailable."""
    try:
        from . import _ckernels
    except ImportError:
        return None
    return _ckernels
