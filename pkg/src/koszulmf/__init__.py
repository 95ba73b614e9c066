"""Exact workbench for the Koszul matrix factorization of z1...z(n+2).

Subpackages are organized by task: linalg (exact linear algebra),
lattice (weights and gradings), weyl (the Clifford-Weyl operator
algebra and its differential), minimal (cohomology pieces and the
minimal A-infinity model), ainfty (structural checks and constructions
on finite A-infinity algebras), pants (zonotope, coamoeba and Morse
combinatorics of the pair of pants), rnc (the rational normal curve
through the Morse points), cli (command line interface).
"""

__version__ = "0.1.0"
