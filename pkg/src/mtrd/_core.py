"""Kernel backend selection: compiled extension with pure-numpy fallback.

Set MTRD_PURE_PYTHON=1 to force the fallback (used by the benchmark and
for debugging). Results agree between backends up to last-ulp summation
order; byte-identical output is guaranteed per backend, not across them.
"""

import os

if os.environ.get("MTRD_PURE_PYTHON"):
    from . import _pykernels as _impl

    HAVE_COMPILED = False
else:
    try:
        from . import _ckernels as _impl  # type: ignore[attr-defined]

        HAVE_COMPILED = True
    except ImportError:
        from . import _pykernels as _impl

        HAVE_COMPILED = False

evaluate_candidate = _impl.evaluate_candidate


def backend_name() -> str:
    return "compiled" if HAVE_COMPILED else "python"
