"""Affine (configuration) shape densities and inference over the real
normed division algebras.

Matrices cross the boundary as ``rows x cols x components`` nested lists,
matching the JSON file format: a real entry is ``[x]``, a complex one
``[re, im]``, a quaternion one ``[w, x, y, z]``.
"""

from ._core import (  # noqa: F401
    __version__,
    chisq_sf,
    configuration_coords,
    density_central,
    density_gaussian_isotropic,
    fit_mle,
    gen_pochhammer,
    helmert,
    hypergeometric,
    jack,
    loglik,
    lrt_equal_means,
    mv_gamma_ln,
    partitions_of,
    simulate_landmarks,
    stiefel_volume_ln,
)


def complex_matrix(rows):
    """Nested-list encoding of a complex matrix given as complex numbers."""
    return [[[z.real, z.imag] for z in row] for row in rows]


def as_complex(matrix):
    """Inverse of :func:`complex_matrix` for beta = 2 results."""
    return [[complex(c[0], c[1]) for c in row] for row in matrix]
