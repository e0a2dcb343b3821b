"""Low-complexity integer approximations of exact transforms."""
