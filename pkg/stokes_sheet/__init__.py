"""Stokes-Sheet: periodic two-phase Stokes flow with a free graph interface."""

__version__ = "0.1.0"
