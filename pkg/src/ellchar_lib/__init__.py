"""mod-ell torus characters and their classes written in python."""

from importlib.metadata import version

__version__ = version(__package__)
