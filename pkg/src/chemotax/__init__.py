"""Chemotaxis pattern-formation toolkit."""
