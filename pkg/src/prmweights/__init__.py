"""Exact evaluation and exhaustive verification of point-count bounds for
intersections of hypersurfaces over finite fields."""

__version__ = "0.1.0"
