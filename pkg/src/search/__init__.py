"""Exhaustive search for low-complexity KLT approximations."""
