"""Foliations attached to bitangent pairs of smooth plane quartics:
intersection geometry, trace divisors, local normal forms and pre-regularity."""

__version__ = "0.1.0"
