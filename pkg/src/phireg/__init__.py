"""Replicator dynamics and the regret hierarchy (external, internal, swap, mosaic) in normal-form games."""

__version__ = "0.1.0"
