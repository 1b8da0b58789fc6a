"""
Commands module for tangency-lab.

Each command expands a scenario into independent work items and writes its
artifacts once they have run. The registry maps scenario command names to
command instances.
"""

from typing import Dict

from ..core.errors import ValidationError
from .base_command import BaseCommand, ItemOutcome, WorkItem
from .bidisk_commands import HorseshoeCommand, RHCheckCommand
from .germ_commands import GermClassifyCommand, GermSuiteCommand
from .saddle_commands import NormalFormCommand, SaddleFindCommand, SaddleResonanceCommand
from .scan_commands import (
    ScanContinueCommand,
    ScanModuliCommand,
    ScanScalingCommand,
    ScanTangencyCommand,
    ScanTypeChangeCommand,
)

COMMANDS: Dict[str, BaseCommand] = {
    command.name: command
    for command in (
        GermSuiteCommand(),
        GermClassifyCommand(),
        SaddleFindCommand(),
        SaddleResonanceCommand(),
        NormalFormCommand(),
        RHCheckCommand(),
        HorseshoeCommand(),
        ScanTangencyCommand(),
        ScanScalingCommand(),
        ScanContinueCommand(),
        ScanModuliCommand(),
        ScanTypeChangeCommand(),
    )
}


def get_command(name: str) -> BaseCommand:
    """
    Look up a command by scenario name; "germ-classify" and "germ classify" are equal.

    Raises:
        ValidationError: unknown command
    """
    key = " ".join(name.replace("_", " ").split())
    if key not in COMMANDS:
        spaced = key.replace("-", " ", 1)
        key = spaced if spaced in COMMANDS else key
    if key not in COMMANDS:
        raise ValidationError(f"unknown command: {name!r}", {"known": sorted(COMMANDS)})
    return COMMANDS[key]


__all__ = [
    "BaseCommand",
    "WorkItem",
    "ItemOutcome",
    "COMMANDS",
    "get_command",
]
