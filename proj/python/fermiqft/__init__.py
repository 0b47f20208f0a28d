"""Fermionic interaction models on finite mode tables: assembly, bounds checks and the CLI commands."""

import json

from . import _fermiqft
from ._fermiqft import (
    ConfigError,
    Model,
    RunConfig,
    enumerate_processes,
    exponent_table,
    power_counting_exponent,
    process_count,
    reference_hermite_constant,
    young_constant,
)

__all__ = [
    "ConfigError",
    "Model",
    "RunConfig",
    "enumerate_processes",
    "exponent_table",
    "exact_identities",
    "load_config",
    "power_counting_exponent",
    "process_count",
    "reference_hermite_constant",
    "run_command",
    "run_suite",
    "to_scipy",
    "young_constant",
]


def load_config(path):
    return RunConfig.load(str(path))


def run_suite(config, model, suite):
    return [json.loads(r) for r in _fermiqft.run_suite(config, model, suite)]


def exact_identities(model, seed=20240601, tolerance=1e-12):
    return [json.loads(r) for r in model.exact_identities(seed, tolerance)]


_COMMANDS = {
    "build": _fermiqft.cmd_build,
    "verify": _fermiqft.cmd_verify,
    "groundstate": _fermiqft.cmd_groundstate,
    "masslimit": _fermiqft.cmd_masslimit,
    "fermi-demo": _fermiqft.cmd_fermi_demo,
}


def run_command(name, config, report_dir, suites=()):
    res = _COMMANDS[name](config, str(report_dir), list(suites))
    for e in res["entries"]:
        e["report"] = json.loads(e["report"])
    res["summary"] = json.loads(res["summary"])
    return res


def to_scipy(triplets):
    """(rows, cols, values, dim) from Model.hamiltonian() and friends as a scipy CSR matrix."""
    from scipy.sparse import csr_matrix

    rows, cols, values, dim = triplets
    return csr_matrix((values, (rows, cols)), shape=(dim, dim))
