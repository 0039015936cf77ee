"""fhlab: numerical lab for the fractional heat operator and its frequency functionals."""

__version__ = "1.0.0"
