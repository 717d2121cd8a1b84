"""Locate the shipped instance files from any working directory."""

from pathlib import Path

from upgradeplan import load_instance

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


def instance(name):
    return load_instance(INSTANCES / f"{name}.json")
