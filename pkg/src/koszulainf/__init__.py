"""Exact computations around the Koszul A-infinity model of a cubic-plus-diagonal singularity.

Submodules: ``exact_algebra`` (polynomials, exterior and Clifford algebras),
``linalg``, ``mf`` (the matrix factorization and its retract), ``hochschild``,
``transfer`` (tree-sum minimal model), ``polyvector`` (Schouten calculus and
normalization), ``dgla`` (MC theory and lifting obstructions), ``fukaya``
(Fukaya-table fragment) and ``toric`` (the crepant resolution fan).
"""

__version__ = "0.1.0"
