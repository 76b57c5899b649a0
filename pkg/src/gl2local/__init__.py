"""Exact mod-p local invariants for GL2 over unramified p-adic fields.

Subpackages cover: finite-field tables (ffield), exact Witt / cyclotomic
arithmetic (exactnum), Fontaine-Laffaille parameter calculus (rhobar),
strongly divisible modules (sdiv), Jacobi sums with Stickelberger
certification (jacobi), a finite-depth principal-series model (pseries),
and Brauer-character verification of K-type reductions (modrep).
"""

__version__ = "0.1.0"
