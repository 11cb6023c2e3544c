"""Hot-kernel backend selection.

Prefers the compiled Cython extension; falls back to the pure-Python
implementation when it is missing or when POLICYLENS_PURE is set to a
non-empty value. Both backends expose the same functions and are
interchangeable node for node.
"""
import os

from .pure import (  # noqa: F401  (kind tags are shared constants)
    BACKEND,
    FALSE_ID,
    KIND_AND,
    KIND_FALSE,
    KIND_LIT,
    KIND_OR,
    KIND_TRUE,
    TRUE_ID,
    compile_kernel,
    condition_kernel,
    count_kernel,
    mk_gate,
    mk_lit,
)

if not os.environ.get("POLICYLENS_PURE"):
    try:
        from ._speedups import (  # noqa: F811
            BACKEND,
            compile_kernel,
            condition_kernel,
            count_kernel,
            mk_gate,
            mk_lit,
        )
    except ImportError:
        pass
