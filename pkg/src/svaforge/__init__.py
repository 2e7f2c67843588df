"""svaforge: RTL-grounded synthesis, verification, and scoring of
natural-language / SystemVerilog-assertion training pairs.

The package couples a small SVA parser and three-valued bounded trace
semantics with a Verilog-subset simulator, so assertion equivalence and
proof obligations are discharged by exhaustive enumeration up to a bound
instead of an external prover. On top sit a checkpointed synthesis
pipeline driven by pluggable LLM backends and the evaluation metrics
used to score the resulting corpora.
"""

from . import gateway, metrics, pipeline, rtl, sva, traces, verify
from .errors import SvaForgeError
from .verify import Bound, CheckReport, Outcome, equivalent, free_tautology, \
    holds_on_design

__version__ = "0.1.0"

__all__ = [
    "gateway", "metrics", "pipeline", "rtl", "sva", "traces", "verify",
    "SvaForgeError", "Bound", "CheckReport", "Outcome", "equivalent",
    "free_tautology", "holds_on_design", "__version__",
]
