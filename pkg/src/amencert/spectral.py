"""Spectral gap of the Cayley graph: exact values, Rayleigh quotients, Dirichlet truncations.

Two related quantities live here and must not be conflated:

* ``lambda1`` is the bottom of the positive spectrum of the *normalized*
  graph Laplacian I - M, where M averages over the symmetric generating set.
  It is 0 exactly for the amenable built-ins (Z^d) and 1 - sqrt(2k-1)/k for
  the free group F_k with its standard generators.

* ``rayleigh_quotient`` returns the both-orientations edge-energy quotient
  (1/#S) * sum_{s,g} |f_g - f_{s^-1 g}|^2 / ||f||^2, which for unit-norm f
  equals (2/#S) * sum_s (1 - <f, s.f>).  Its infimum is 2*lambda1, so every
  finitely supported kernel yields an upper witness for lambda1.

Dirichlet truncations (zero boundary outside a ball) overestimate lambda1 and
are therefore tagged EstimateFromAbove; the certifier refuses to consume them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import CapabilityError, InputError, NumericError
from .groups import (
    FREE,
    FREE_ABELIAN,
    CayleyBall,
    GroupSpec,
    Kernel,
    Word,
    ball,
    generators,
    inv,
    mul,
)

DEFAULT_EIG_RESIDUAL = 1e-9
DEFAULT_EIG_MAXITER = 10_000
_DENSE_CUTOFF = 600


class Lambda1Kind(enum.Enum):
    EXACT_CLOSED_FORM = "exact_closed_form"
    CERTIFIED_LOWER_BOUND = "certified_lower_bound"
    ESTIMATE_FROM_ABOVE = "estimate_from_above"


@dataclass(frozen=True)
class Lambda1Value:
    """A value for the spectral gap together with its epistemic status."""

    value: float
    kind: Lambda1Kind
    source: str | None = None
    radius: int | None = None

    def __post_init__(self):
        if self.value < 0:
            raise InputError("lambda1 values are nonnegative")

    def certifiable(self) -> bool:
        """Whether a certificate may consume this value."""
        return self.kind in (Lambda1Kind.EXACT_CLOSED_FORM, Lambda1Kind.CERTIFIED_LOWER_BOUND)

    def to_dict(self) -> dict:
        out = {"value": self.value, "kind": self.kind.value}
        if self.source is not None:
            out["source"] = self.source
        if self.radius is not None:
            out["radius"] = self.radius
        return out


@dataclass(frozen=True)
class CheegerCandidate:
    """A finite set together with its boundary-to-volume ratio (upper bound on h)."""

    words: frozenset[Word]
    ratio: float


def lambda1_exact(spec: GroupSpec) -> Lambda1Value:
    """Closed-form spectral gap for the built-in families."""
    if spec.family == FREE_ABELIAN:
        return Lambda1Value(0.0, Lambda1Kind.EXACT_CLOSED_FORM, source="amenable lattice")
    if spec.family == FREE:
        k = spec.rank
        value = 1.0 - math.sqrt(2 * k - 1) / k
        return Lambda1Value(value, Lambda1Kind.EXACT_CLOSED_FORM, source="free-group random-walk norm")
    raise CapabilityError(f"no exact spectral gap for family {spec.family!r}")


def rayleigh_quotient(f: Kernel, spec: GroupSpec) -> float:
    """Edge-energy quotient of a finitely supported kernel.

    Computed by direct enumeration of the difference sum (both orientations),
    so the identity with (2/#S) sum_s (1 - <f, s.f>) is a genuine check, not
    a restatement of the implementation.
    """
    if f.group != spec:
        raise InputError("kernel group does not match the requested spec")
    if not f.values:
        raise InputError("Rayleigh quotient of the zero kernel is undefined")
    gens = generators(spec)
    num = 0.0
    for s in gens:
        s_inv = inv(s)
        seen = set()
        for g in f.support:
            seen.add(g)
            seen.add(mul(s, g))
        for g in seen:
            diff = f[g] - f[mul(s_inv, g)]
            num += diff * diff
    den = sum(v * v for v in f.values.values())
    return num / (len(gens) * den)


def _ball_adjacency(b: CayleyBall) -> sp.csr_matrix:
    """Symmetric adjacency (with multiplicity) of the ball, neighbors g -> s*g."""
    spec = b.group
    gens = generators(spec)
    rows: list[int] = []
    cols: list[int] = []
    for i, g in enumerate(b.elements):
        for s in gens:
            h = mul(s, g)
            j = b.index.get(h)
            if j is not None:
                rows.append(i)
                cols.append(j)
    data = np.ones(len(rows))
    n = len(b.elements)
    return sp.csr_matrix((data, (rows, cols)), shape=(n, n))


def lambda1_dirichlet(
    spec: GroupSpec,
    radius: int,
    residual_tol: float = DEFAULT_EIG_RESIDUAL,
    maxiter: int = DEFAULT_EIG_MAXITER,
) -> Lambda1Value:
    """Smallest eigenvalue of the ball-truncated normalized Laplacian (zero boundary).

    Equals 1 - lambda_max(A_R)/#S; nonincreasing in the radius and always
    >= the exact gap, hence an estimate from above only.
    """
    if radius < 1:
        raise InputError("Dirichlet truncation needs radius >= 1")
    b = ball(spec, radius)
    adj = _ball_adjacency(b)
    n = adj.shape[0]
    degree = spec.generator_count
    if n <= _DENSE_CUTOFF:
        dense = adj.toarray()
        eigvals, eigvecs = np.linalg.eigh(dense)
        lam_max = float(eigvals[-1])
        vec = eigvecs[:, -1]
    else:
        try:
            vals, vecs = spla.eigsh(adj, k=1, which="LA", maxiter=maxiter, tol=0)
        except spla.ArpackNoConvergence as exc:
            raise NumericError(
                f"eigensolver did not converge within {maxiter} iterations at radius {radius}"
            ) from exc
        lam_max = float(vals[0])
        vec = vecs[:, 0]
    # residual of the normalized Laplacian eigenpair
    lap_v = vec - (adj @ vec) / degree
    lam = 1.0 - lam_max / degree
    residual = float(np.linalg.norm(lap_v - lam * vec) / np.linalg.norm(vec))
    if residual > residual_tol:
        raise NumericError(
            f"eigen residual {residual:.3e} exceeds contract {residual_tol:.1e} at radius {radius}"
        )
    return Lambda1Value(max(lam, 0.0), Lambda1Kind.ESTIMATE_FROM_ABOVE, radius=radius)


def lambda1_dirichlet_series(spec: GroupSpec, radii: Iterable[int]) -> list[Lambda1Value]:
    return [lambda1_dirichlet(spec, r) for r in radii]


def cheeger_ratio(words: Iterable[Word], spec: GroupSpec) -> CheegerCandidate:
    """Boundary-to-volume ratio of a finite set.

    The boundary counts ordered exiting pairs (g, s) with g in F and s*g
    outside F, i.e. edges with multiplicity per generator.
    """
    fset = frozenset(words)
    if not fset:
        raise InputError("Cheeger ratio of the empty set is undefined")
    for w in fset:
        if w.group != spec:
            raise InputError("set contains words from a different group")
    gens = generators(spec)
    boundary = sum(1 for g in fset for s in gens if mul(s, g) not in fset)
    return CheegerCandidate(fset, boundary / len(fset))
