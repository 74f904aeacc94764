"""Axiom-based diagnostic datasets and fulfilment analysis for ad-hoc
retrieval rankers."""

__version__ = "0.1.0"
