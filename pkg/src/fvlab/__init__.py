"""One-dimensional finite volume laboratory for hyperbolic balance laws."""

__version__ = "0.1.0"
