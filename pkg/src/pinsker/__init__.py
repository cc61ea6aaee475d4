"""Optimal Pinsker-type lower bounds between divergences and the trace distance."""

from pinsker.divergences import (
    BinaryPair,
    DivergenceSpec,
    Family,
    ParameterDomainError,
    binary_divergence,
    catalog_list,
    eval_binary,
    hellinger,
    objective_xi,
    parse_spec,
    renyi,
    smoothed_max,
)

__version__ = "0.1.0"
