"""Lévy density estimation from sampled increments."""

from ._core import (
    Error,
    GridCoverageError,
    IoError,
    Model,
    ParameterError,
    ParseError,
    estimate,
    fit_rate,
    g_squared_norm,
    g_star_true,
    g_true,
    mise,
    model_names,
    psi_true,
    run_campaign,
    select,
    simulate,
    tail_energy,
)

__all__ = [
    "Error",
    "GridCoverageError",
    "IoError",
    "Model",
    "ParameterError",
    "ParseError",
    "estimate",
    "fit_rate",
    "g_squared_norm",
    "g_star_true",
    "g_true",
    "mise",
    "model_names",
    "psi_true",
    "run_campaign",
    "select",
    "simulate",
    "tail_energy",
]
