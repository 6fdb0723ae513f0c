"""Diagnostics: conserved integrals, conservation laws, charges, symmetries, stability."""
