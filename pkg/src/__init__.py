"""Low-complexity KLT approximation toolkit."""
