"""Exact computation of coalgebraic invariants: cotensor products, coHH,
cotraces, CoTor via the conormalized cobar construction, and the shadow
machinery tying them together."""

__version__ = "0.1.0"
