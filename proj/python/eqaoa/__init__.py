"""Evolutionary QAOA for Max-Cut: statevector simulator, evolutionary and
island-model optimizers, and a local-optimizer baseline."""

from ._core import (
    DimensionError,
    GenerationError,
    Graph,
    ParameterError,
    ProtocolError,
    StateError,
    __version__,
    approximation_ratio,
    cut_value,
    cvar,
    cvar_tail_size,
    decode_packet,
    encode_packet,
    evaluate,
    evolve,
    generate_regular,
    max_count,
    max_cut,
    optimize_local,
    run_islands,
    run_qaoa,
)

__all__ = [
    "DimensionError",
    "GenerationError",
    "Graph",
    "ParameterError",
    "ProtocolError",
    "StateError",
    "__version__",
    "approximation_ratio",
    "cut_value",
    "cvar",
    "cvar_tail_size",
    "decode_packet",
    "encode_packet",
    "evaluate",
    "evolve",
    "generate_regular",
    "max_count",
    "max_cut",
    "optimize_local",
    "run_islands",
    "run_qaoa",
]
