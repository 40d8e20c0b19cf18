"""XXZ Quench — pairwise entanglement dynamics of the open XXZ chain with MPS/TEBD."""

__version__ = "0.1.0"
