"""VVUQ campaign engine with an embedded pilot-job scheduler."""

__version__ = "0.1.0"
