"""Independent oracles for the test suite.

Everything here deliberately avoids the package's grid/interpolation
machinery: analytic maps are inverted by bracketed root finding, integrals go
through adaptive quadrature, walk norms come from the spherical-average
reduction of ball-restricted averaging operators, and lattice counts are
brute-force enumerations.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg
from scipy.integrate import quad
from scipy.optimize import brentq


def radial_walk_norm(k: int, radius: int) -> float:
    """Largest eigenvalue of the generator-averaging operator of the free
    group F_k restricted to a ball, computed on the radial subspace.

    The top eigenvector of the ball restriction is radial (it is the Perron
    vector of a connected nonnegative matrix invariant under the sphere
    symmetries), so the value equals the top eigenvalue of the tridiagonal
    radial matrix.  Converges to sqrt(2k-1)/k from below as the radius grows.
    """
    off = np.empty(radius)
    off[0] = 1.0 / math.sqrt(2 * k)
    off[1:] = math.sqrt(2 * k - 1) / (2 * k)
    diag = np.zeros(radius + 1)
    vals = scipy.linalg.eigh_tridiagonal(diag, off, eigvals_only=True)
    return float(vals[-1])


def sine_lift(theta: float, a: float, x: float) -> float:
    return x + theta + (a / (2 * math.pi)) * math.sin(2 * math.pi * x)


def sine_lift_inverse(theta: float, a: float, y: float) -> float:
    """Invert the analytic perturbed-rotation lift by bracketed root finding."""
    margin = abs(a) / (2 * math.pi) + 1e-9
    return brentq(lambda x: sine_lift(theta, a, x) - y, y - theta - margin, y - theta + margin,
                  xtol=1e-14)

def sine_deriv(a: float, x: float) -> float:
    return 1.0 + a * math.cos(2 * math.pi * x)


def sine_pushforward_density(theta: float, a: float, y: float) -> float:
    """Density of the image of Lebesgue measure under the perturbed rotation."""
    x = sine_lift_inverse(theta, a, y)
    return 1.0 / sine_deriv(a, x)


def sqrt_deriv_integral(a: float) -> float:
    """int_0^1 sqrt(1 + a cos(2 pi x)) dx by adaptive quadrature."""
    val, _ = quad(lambda x: math.sqrt(1.0 + a * math.cos(2 * math.pi * x)), 0.0, 1.0, limit=200)
    return val


def lattice_ball_count(d: int, radius: int) -> int:
    """Brute-force count of lattice points with l1 norm <= radius."""
    if d == 1:
        return 2 * radius + 1
    total = 0
    for first in range(-radius, radius + 1):
        total += lattice_ball_count(d - 1, radius - abs(first))
    return total


def box_boundary_pairs(d: int, side: int) -> int:
    """Ordered exiting pairs (point, unit step) leaving the d-dimensional box."""
    count = 0
    steps = []
    for axis in range(d):
        for sign in (1, -1):
            step = [0] * d
            step[axis] = sign
            steps.append(tuple(step))
    for point in np.ndindex(*([side] * d)):
        for step in steps:
            moved = tuple(p + s for p, s in zip(point, step))
            if not all(0 <= c < side for c in moved):
                count += 1
    return count
