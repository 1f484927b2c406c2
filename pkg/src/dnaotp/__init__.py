"""DNA-synchronized one-time-pad key distribution, desk scale.

A stochastic simulator stands in for the wet lab (synthesis, PCR,
partitioning, sequencing, attacks); the digital pipeline (clustering,
consensus, sifting, parity digitization, entropy gating, BCH
reconciliation, OTP, interception detection) is real.
"""

__version__ = "0.1.0"
