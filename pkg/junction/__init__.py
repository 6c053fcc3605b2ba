"""Series solutions of the two-ion liquid junction field equation and their numerical checks."""

__version__ = "0.1.0"
