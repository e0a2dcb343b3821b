"""Published low-complexity transforms and their fast algorithms."""
