"""Exact monodromy matrices over group rings for relative homology of polygon complexes."""
