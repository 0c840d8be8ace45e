"""Monte Carlo toolkit for excitation transfer across disordered
centrosymmetric networks.

The package samples mirror-symmetric random Hamiltonians, post-selects
realizations whose in/out doublet dominates the transfer, simulates the
resulting two-level dynamics, and compares the observed transfer-time and
efficiency statistics against closed-form predictions.
"""

__version__ = "0.1.0"
