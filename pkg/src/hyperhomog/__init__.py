"""Exact verification toolkit for almost hypercomplex homogeneous spaces with
quaternionically irreducible isotropy."""

__version__ = "0.1.0"
