"""Multiband homogenization of periodic bilayer laminates."""

import csv
import io
import json

from ._mbhom import (
    ConfigError,
    SolverError,
    band_edges,
    bloch_wavenumber,
    fit_branch_1d,
    harmonic_mean_modulus,
    midgap_frequency,
    nonlocal_roots,
    scatter_1d,
    scatter_1d_hom,
)
from . import _mbhom

VERBS = ("dispersion", "fit", "scatter1d", "scatter2d", "field", "multiband", "nonlocal")


def run(verb, config, threads=1):
    """Run a CLI verb on a config dict; returns the raw CSV or JSON text."""
    if verb not in VERBS:
        raise ConfigError(f"unknown command '{verb}'")
    return _mbhom._run(verb, json.dumps(config), threads)


def run_table(verb, config, threads=1):
    """Run a CSV verb and return its rows as dicts of strings."""
    return list(csv.DictReader(io.StringIO(run(verb, config, threads))))


def fit(config, threads=1):
    return json.loads(run("fit", config, threads))


def normalize_config(config):
    """Config with every default filled in."""
    return json.loads(_mbhom._normalize_config(json.dumps(config)))


__all__ = [
    "ConfigError", "SolverError", "VERBS", "band_edges", "bloch_wavenumber", "fit", "fit_branch_1d",
    "harmonic_mean_modulus", "midgap_frequency", "nonlocal_roots", "normalize_config", "run", "run_table",
    "scatter_1d", "scatter_1d_hom",
]
