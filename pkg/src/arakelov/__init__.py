"""Heights, Fubini-Study distances and metric Bézout checks on projective space."""

__version__ = "0.1.0"
