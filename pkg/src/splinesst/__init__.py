"""Real-time spline interpolation, VM spline wavelets, streaming
synchrosqueezed CWT, and respiratory dynamics indices."""

__version__ = "0.1.0"
