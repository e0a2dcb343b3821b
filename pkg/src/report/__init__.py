"""Human-readable report formatting."""
