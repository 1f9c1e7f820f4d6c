"""Nonholonomic partitioned Runge-Kutta integrators."""

from ._core import (
    ConfigError,
    Error,
    InvalidArgument,
    StepFailure,
    catalog_names,
    check_config,
    converge,
    ensemble,
    fit_slope,
    lobatto_nodes,
    lobatto_pair,
    predicted_orders,
    simulate,
)

__all__ = [
    "ConfigError",
    "Error",
    "InvalidArgument",
    "StepFailure",
    "catalog_names",
    "check_config",
    "converge",
    "ensemble",
    "fit_slope",
    "lobatto_nodes",
    "lobatto_pair",
    "predicted_orders",
    "simulate",
]
