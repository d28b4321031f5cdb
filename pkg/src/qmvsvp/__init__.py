"""Classical evaluation and optimisation of depth-1 QAOA expectations for SVP lattice Hamiltonians."""

__version__ = "0.1.0"
