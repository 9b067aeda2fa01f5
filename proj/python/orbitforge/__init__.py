"""Action-minimizing orbits of the Newtonian n-body problem.

Thin python surface over the C++ core: pointwise dynamics, discretized loop
and path actions, symmetry-constrained minimization, the Kepler averaging
machinery, and orbit-file persistence.
"""

from orbitforge._core import *  # noqa: F401,F403
from orbitforge._core import __version__  # noqa: F401
