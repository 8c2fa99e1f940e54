"""Domino 2-graphs: construction, verification and related combinatorics."""

from .domino import BasicData

__all__ = ["BasicData", "fixture_text"]

__version__ = "0.1.0"


def fixture_text(name: str) -> str:
    """Contents of a bundled file from the fixtures directory."""
    from importlib import resources
    return resources.files(__name__).joinpath("fixtures", name).read_text()
