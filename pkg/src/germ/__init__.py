"""A fixed-size formal memory model, a small typed imperative language with a
fuel-bounded interpreter, and a symbolic checker built on that interpreter."""

__version__ = "0.1.0"
