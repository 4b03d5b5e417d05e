"""Flex-grid entanglement distribution planner."""

import json

from ._flexent import (
    BiphotonSpectrum,
    ConstraintError,
    DomainError,
    DwdmModel,
    Error,
    ParseError,
    ValidationError,
    WssModel,
    channel_fluxes,
    crossover_users,
    default_scenario,
    dwdm_best_loss,
    dwdm_filter_count,
    dwdm_worst_loss,
    fully_connected_capacity,
    loss_table,
    normalize_scenario,
    run,
    spectral_density,
)


class CommandError(Error):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def command(*args):
    """Run a subcommand and return its decoded JSON output."""
    code, out, err = run([str(a) for a in args])
    if code != 0:
        raise CommandError(code, err.strip())
    return json.loads(out)
