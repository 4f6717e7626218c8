"""2D periodic Navier-Stokes toolkit: critical norms, mild solvers and the
verification harness, on top of the compiled core.

Fields are complex coefficient arrays: (N, N) scalars, (2, N, N) vectors,
(4, N, N) tensors, rows indexed by y modes and columns by x modes in FFT order.
"""

import json as _json

from . import _core
from ._core import (
    FormatError,
    InputError,
    dyadic_rescale,
    heat_propagate,
    leray_project,
    nonlinear_term,
    random_divergence_free,
    read_field,
    set_thread_count,
    shear_mode,
    suite_names,
    taylor_green,
    thread_count,
    to_physical,
    to_spectral,
    write_field,
)

__version__ = _core.__version__


def _text(obj):
    return obj if isinstance(obj, str) else _json.dumps(obj)


def norm(coeffs, L, spec, carleson=None):
    """Norm of a field. spec is a name ("dbmo") or a dict such as
    {"name": "besov", "s": -1, "p": "inf", "q": "inf"}."""
    return _core.norm(coeffs, L, _json.dumps(spec), _text(carleson or {}))


def _unpack(result):
    result = dict(result)
    result["diagnostics"] = _json.loads(result["diagnostics"])
    for stage in result.get("stages", []):
        stage["diagnostics"] = _json.loads(stage["diagnostics"])
    return result


def solve_small_data(w0, L, config=None):
    """Picard solve of the mild equation for small data; config holds solver keys."""
    return _unpack(_core.solve_small_data(w0, L, _text(config or {})))


def solve_global(u0, L, config=None):
    """Split, small-data, local and energy stages up to config["horizon"]."""
    return _unpack(_core.solve_global(u0, L, _text(config or {})))


def run_suite(name, experiment=None):
    """One harness suite; returns its report with the list of checks."""
    return _json.loads(_core.run_suite(name, _text(experiment or {})))
