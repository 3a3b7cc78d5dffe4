"""Deterministic numeric text formatting for the wire formats.

Every exported number uses 17 significant digits, enough to round-trip any
float64 exactly, so identical invocations produce byte-identical files.
"""


def fmt(v: float) -> str:
    return format(float(v), ".17g")


def jvec(xs) -> str:
    """JSON array literal of numbers."""
    return "[" + ", ".join(fmt(x) for x in xs) + "]"
