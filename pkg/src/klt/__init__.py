"""Exact KLT generation for first-order Markov sources."""
