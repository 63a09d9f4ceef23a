"""Q-learning over forensic investigation workflows."""

from ._core import *  # noqa: F401,F403
from ._core import (
    ParseError,
    RlfiError,
    ValidationError,
    WorkflowGraph,
    run_cli,
)

__version__ = "0.1.0"
