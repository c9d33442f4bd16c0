"""Tri-unitary quantum circuits: gates, channels, and exact simulators."""
