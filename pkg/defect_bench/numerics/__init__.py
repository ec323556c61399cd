"""Deterministic numeric substrate: dense linear algebra and a seedable PRNG."""
