"""Quasi-hydrodynamic solver for laminar flow over a backward-facing step."""
