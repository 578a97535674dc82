"""Maps on closed surfaces as flag systems, and the vertex-transitive {3,7} atlas."""

__version__ = "0.1.0"
