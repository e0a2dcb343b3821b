"""Figures of merit for transforms under a Markov-1 model."""
