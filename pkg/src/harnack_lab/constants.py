"""Pinned numerical constants.

``Q_SO_NORMALIZATION`` relates the index formula for ``Q(R, g)`` to the so(m)
decomposition: ``Q = c * (R^2 + R^#)`` with ``R^2`` and ``R^#`` built from the
so(m) inner product ``tr(X^T Y)``.  Measured by least squares over random
curvature forms in dims 3-6 (see ``measure_q_normalization``) and asserted by
the test suite; do not edit without re-measuring.
"""

Q_SO_NORMALIZATION = 4.0

# Lambda^2-diagonal forms in dim 3: diag Q = HAMILTON_3D_FACTOR * (a^2 + bc, ...)
HAMILTON_3D_FACTOR = 2.0
