"""Local-density operators and Dirac measures on bipartite systems."""

from ._locrho import (
    DimensionError,
    DomainError,
    Error,
    InputError,
    canonical_form_test,
    classify,
    correlation,
    counterexample_family,
    joint_table,
    local_density_operator,
    measure_eval,
    random_channel,
    random_density,
    reconstruct,
    reflect,
    schema_version,
    verify_measure,
)

__all__ = [
    "DimensionError",
    "DomainError",
    "Error",
    "InputError",
    "canonical_form_test",
    "classify",
    "correlation",
    "counterexample_family",
    "joint_table",
    "local_density_operator",
    "measure_eval",
    "random_channel",
    "random_density",
    "reconstruct",
    "reflect",
    "schema_version",
    "verify_measure",
]
