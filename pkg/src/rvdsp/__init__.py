"""Cycle-stepped RV32IM SoC simulator with memory-mapped DSP accelerators."""

__version__ = "0.1.0"
