"""policylens: compile controller traces into d-DNNF circuits and answer
exact probabilistic queries about the policy's behavior."""

from ._kernel import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]
