"""Decision procedure for until/since temporal logic over the reals."""

__version__ = "0.1.0"
