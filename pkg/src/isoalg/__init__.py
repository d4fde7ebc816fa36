"""Exact-arithmetic graph-isomorphism approximations.

Two method families, side by side: partition-refinement operators
(counting and solvability over prime fields) and degree-bounded algebraic
proof systems (Nullstellensatz, monomial, and polynomial calculus) over
isomorphism axioms, plus a generalized CFI instance generator and
brute-force orbit oracles for cross-checking.
"""

__version__ = "0.1.0"
