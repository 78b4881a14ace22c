"""Planted quantum Tanner codes and their downstream artifacts.

The package builds CSS codes from square Cayley complexes over congruence
subgroups of SL(2), plants a designated logical operator by construction,
and derives two families of desk-checkable objects from the result: hard
XOR-SAT instances and low-energy clustering / spread diagnostics.
"""

__version__ = "0.1.0"
