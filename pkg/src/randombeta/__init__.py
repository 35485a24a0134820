"""Random beta-transformations: exact Markov partitions, symbolic codings,
transfer operators and their equilibrium states."""

__version__ = "0.1.0"
