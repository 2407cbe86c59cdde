"""Integrator kernel selection.

The compiled Dormand-Prince kernel (``_dp45_cy``, built from Cython at
install time) is preferred; the pure-numpy twin ``_dp45_py`` is the fallback.
Set ``LAMBDA_FORGE_BACKEND=py`` or ``=cy`` to force a choice; forcing ``cy``
when the extension is missing raises at import.
"""

import os

from . import _dp45_py

_FORCED = os.environ.get("LAMBDA_FORGE_BACKEND", "").strip().lower()

_cy = None
if _FORCED != "py":
    try:
        from . import _dp45_cy as _cy
    except ImportError:
        _cy = None
        if _FORCED == "cy":
            raise ImportError(
                "LAMBDA_FORGE_BACKEND=cy but the compiled integrator is not "
                "built; run `pip install -e .` or `python setup.py build_ext "
                "--inplace`")

_impl = _cy if _cy is not None else _dp45_py


def backend_name():
    """'cy' when the compiled kernel is active, else 'py'."""
    return "cy" if _impl is _cy and _cy is not None else "py"


def dp45_evolve(L, y0, t_eval, rtol, atol, max_steps=50_000_000, herm_dim=0):
    return _impl.dp45_evolve(L, y0, t_eval, rtol, atol, max_steps, herm_dim)


def available_backends():
    return ("py", "cy") if _cy is not None else ("py",)
