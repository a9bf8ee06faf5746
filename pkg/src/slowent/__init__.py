"""slowent: finite-stage symbolic dynamics toolkit.

Word collections with verified Hamming separation, conjugation-built tower
names, exact-rational rank-two cutting-and-stacking systems, and empirical
covering-number profiles against scaling families.
"""

__version__ = "0.1.0"
