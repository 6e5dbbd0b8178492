"""Weyl-sum evaluation of BKS pairings on the internally fused double."""

__version__ = "0.1.0"
