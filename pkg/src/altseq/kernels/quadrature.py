"""Fixed Gauss-Legendre panels for the SEV information integrals.

The SEV (Weibull) per-unit information entries need integrals of
u * exp(-u) * poly(log u) over (-inf, zeta] in z = log u.  There is no
closed form for the mu-nu and nu-nu entries, so both backends integrate the
same composite Gauss-Legendre rule: full panels between consecutive
breakpoints below zeta, plus one partial panel ending exactly at zeta.

Breakpoints are spaced so that a 30-point rule resolves each panel to
machine precision: wide panels far left where the integrand is flat and
vanishing (below z = -37 it underflows to zero in double precision), unit
panels in the center, and nothing beyond z = 6 where exp(-e^z) underflows.
"""

import numpy as np
from numpy.polynomial.legendre import leggauss

BREAKS = np.array([-37.0, -20.0, -12.0, -8.0, -5.0, -3.0, -2.0, -1.0,
                   0.0, 1.0, 2.0, 3.0, 4.0, 6.0])
ORDER = 30

# nodes/weights on [-1, 1]; panels map them affinely
GL_NODES, GL_WEIGHTS = leggauss(ORDER)

# Hard cutoffs shared by both backends.  SEV_UPPER mirrors BREAKS[-1]; the
# normal entries reach their uncensored limits (1, 0, 2) to machine precision
# by zeta = 12 and underflow entirely below zeta = -38.
SEV_LOWER = BREAKS[0]
SEV_UPPER = BREAKS[-1]
NORMAL_FULL = 12.0
NORMAL_EMPTY = -38.0
