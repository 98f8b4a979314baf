"""Orientation-preserving circle diffeomorphisms on a uniform grid.

A diffeomorphism is represented by samples of its lift and derivative at the
N midpoints x_i = (i + 1/2)/N, with monotone piecewise-linear interpolation
in between.  The lift satisfies lift(x+1) = lift(x) + 1, so one period of
samples determines the map; inverses are computed exactly on the
piecewise-linear interpolant and all downstream quantities carry O(1/N^2)
interpolation error.

Group words act through an ActionSpec: each generator is assigned a
diffeomorphism, inverse generators get the numerical inverse, and word
evaluation composes assignments left to right (so evaluation is a left
action).  Evaluations are memoized per ActionSpec.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import InputError, NumericError
from .groups import FREE_ABELIAN, GroupSpec, Word, generators, identity as group_identity, inv, mul

DEFAULT_GRID = 4096


def midpoints(n: int) -> np.ndarray:
    """Sampling grid: midpoints of the N uniform cells of [0, 1)."""
    return (np.arange(n) + 0.5) / n


def periodic_interp(values: np.ndarray, t: np.ndarray | float) -> np.ndarray:
    """Linear interpolation of midpoint samples of a 1-periodic function.

    Exact on constants (the increment form v0 + w*(v1 - v0) leaves them
    bit-identical), which keeps spatially constant module data exact under
    arbitrary circle maps.
    """
    values = np.asarray(values)
    n = values.shape[0]
    s = np.asarray(t) * n - 0.5
    i0 = np.floor(s).astype(int)
    w = s - i0
    v0 = values[np.mod(i0, n)]
    v1 = values[np.mod(i0 + 1, n)]
    return v0 + w * (v1 - v0)


def circle_distance(u, v):
    """Arc-length distance on R/Z, always in [0, 1/2]."""
    d = np.mod(np.asarray(u) - np.asarray(v), 1.0)
    return np.minimum(d, 1.0 - d)


class CircleDiffeo:
    """Sampled orientation-preserving diffeomorphism of the circle."""

    __slots__ = ("lift", "deriv", "provenance", "params")

    def __init__(self, lift, deriv, provenance: str = "user_sampled", params: dict | None = None):
        lift = np.asarray(lift, dtype=float)
        deriv = np.asarray(deriv, dtype=float)
        if lift.ndim != 1 or lift.shape != deriv.shape:
            raise InputError("lift and deriv must be equal-length 1-d arrays")
        n = lift.shape[0]
        if n < 8:
            raise InputError("grid too coarse (need at least 8 points)")
        strict = provenance != "user_sampled"
        self._validate(lift, deriv, strict)
        self.lift = lift
        self.deriv = deriv
        self.provenance = provenance
        self.params = dict(params or {})

    @staticmethod
    def _validate(lift, deriv, strict):
        n = lift.shape[0]
        if np.any(deriv <= 0):
            raise InputError("derivative must be strictly positive")
        wrapped = np.append(lift, lift[0] + 1.0)
        if np.any(np.diff(wrapped) <= 0):
            raise InputError("lift samples must be strictly increasing with degree 1")
        # slope vs derivative consistency; loose guard, O(1/N^2) behavior is
        # asserted by the test suite on the built-in families
        slopes = np.diff(wrapped) * n
        mids = 0.5 * (deriv + np.roll(deriv, -1))
        defect = float(np.max(np.abs(slopes - mids)))
        tol = 1e-2 * (1.0 + float(np.max(deriv)))
        if defect > tol:
            msg = f"lift/derivative inconsistency {defect:.3e} exceeds guard {tol:.1e}"
            if strict:
                raise InputError(msg)
            warnings.warn(msg, stacklevel=3)

    @property
    def n(self) -> int:
        return self.lift.shape[0]

    def lift_at(self, t):
        """Lift evaluated at arbitrary reals (degree-1 extension is exact)."""
        x = midpoints(self.n)
        frac = periodic_interp(self.lift - x, t)
        return np.asarray(t) + frac

    def __call__(self, t):
        """Circle map: lift reduced mod 1."""
        return np.mod(self.lift_at(t), 1.0)

    def deriv_at(self, t):
        return periodic_interp(self.deriv, t)

    def lift_solve(self, y):
        """Exact inverse of the piecewise-linear lift at arbitrary reals."""
        y = np.asarray(y, dtype=float)
        n = self.n
        xs = np.append(midpoints(n), 0.5 / n + 1.0)
        ls = np.append(self.lift, self.lift[0] + 1.0)
        m = np.floor(y - ls[0])
        yp = y - m
        # clamp float edge cases into the covered period
        yp = np.clip(yp, ls[0], np.nextafter(ls[-1], -np.inf))
        j = np.clip(np.searchsorted(ls, yp, side="right") - 1, 0, n - 1)
        x = xs[j] + (yp - ls[j]) / (ls[j + 1] - ls[j]) * (xs[j + 1] - xs[j])
        return x + m

    def consistency_defect(self) -> float:
        """Max gap between lift slopes and averaged derivative samples."""
        wrapped = np.append(self.lift, self.lift[0] + 1.0)
        slopes = np.diff(wrapped) * self.n
        mids = 0.5 * (self.deriv + np.roll(self.deriv, -1))
        return float(np.max(np.abs(slopes - mids)))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"CircleDiffeo({self.provenance}, n={self.n})"


def identity_diffeo(n: int = DEFAULT_GRID) -> CircleDiffeo:
    x = midpoints(n)
    return CircleDiffeo(x, np.ones(n), "rotation", {"theta": 0.0})


def make_rotation(theta: float, n: int = DEFAULT_GRID) -> CircleDiffeo:
    """Rigid rotation x -> x + theta."""
    x = midpoints(n)
    return CircleDiffeo(x + theta, np.ones(n), "rotation", {"theta": float(theta)})


def make_sine_perturbed(theta: float, a: float, n: int = DEFAULT_GRID) -> CircleDiffeo:
    """Perturbed rotation x -> x + theta + (a/2pi) sin(2pi x); needs |a| < 1."""
    if abs(a) >= 1:
        raise InputError(f"|a| must be < 1 for a diffeomorphism, got {a}")
    x = midpoints(n)
    lift = x + theta + (a / (2 * math.pi)) * np.sin(2 * math.pi * x)
    deriv = 1.0 + a * np.cos(2 * math.pi * x)
    return CircleDiffeo(lift, deriv, "sine_perturbed", {"theta": float(theta), "a": float(a)})


def _combine_provenance(*sources: CircleDiffeo) -> str:
    kinds = {d.provenance for d in sources}
    if kinds <= {"rotation"}:
        return "rotation"
    if "user_sampled" in kinds:
        return "user_sampled"
    return "composite"


def compose(f: CircleDiffeo, g: CircleDiffeo) -> CircleDiffeo:
    """Composition f o g with chain-rule derivative."""
    if f.n != g.n:
        raise InputError("cannot compose diffeomorphisms on different grids")
    lift = f.lift_at(g.lift)
    deriv = f.deriv_at(g.lift) * g.deriv
    prov = _combine_provenance(f, g)
    params = {"theta": f.params["theta"] + g.params["theta"]} if prov == "rotation" else {}
    return CircleDiffeo(lift, deriv, prov, params)


def invert(f: CircleDiffeo) -> CircleDiffeo:
    """Numerical inverse: exact on the piecewise-linear lift."""
    n = f.n
    y = midpoints(n)
    x_star = f.lift_solve(y)
    dvals = f.deriv_at(x_star)
    if np.any(dvals <= 0) or not np.all(np.isfinite(x_star)):
        raise NumericError("inverse failed: non-monotone or non-finite data")
    prov = f.provenance if f.provenance == "rotation" else _combine_provenance(f)
    params = {"theta": -f.params["theta"]} if prov == "rotation" else {}
    return CircleDiffeo(x_star, 1.0 / dvals, prov, params)


def c1_distance(f: CircleDiffeo, g: CircleDiffeo) -> float:
    """C^1 metric: sup displacement on the circle plus sup derivative gap."""
    if f.n != g.n:
        raise InputError("cannot compare diffeomorphisms on different grids")
    disp = float(np.max(circle_distance(f.lift, g.lift)))
    dgap = float(np.max(np.abs(f.deriv - g.deriv)))
    return disp + dgap


def c1_distance_at(x: float, f: CircleDiffeo, g: CircleDiffeo) -> float:
    """The same two terms restricted to a single point."""
    if f.n != g.n:
        raise InputError("cannot compare diffeomorphisms on different grids")
    disp = float(circle_distance(f.lift_at(x), g.lift_at(x)))
    dgap = float(abs(f.deriv_at(x) - g.deriv_at(x)))
    return disp + dgap


def diffeo_tolerance(n: int) -> float:
    """Identity/commutation tolerance for grid size n."""
    return 10.0 / n


class ActionSpec:
    """Assignment of circle diffeomorphisms to the generators of a group.

    Built from diffeos for the positive generators; inverse generators get the
    numerical inverse.  For free-abelian groups the generator maps must
    commute within the grid tolerance (error for built-in families, warning
    for user-sampled data).
    """

    def __init__(self, group: GroupSpec, positive_maps, name: str = "action", validate: bool = True):
        positive_maps = list(positive_maps)
        if len(positive_maps) != group.rank:
            raise InputError(f"expected {group.rank} generator maps, got {len(positive_maps)}")
        sizes = {d.n for d in positive_maps}
        if len(sizes) != 1:
            raise InputError("all generator maps must share one grid size")
        self.group = group
        self.n = sizes.pop()
        self.name = name
        self.assignment: dict[int, CircleDiffeo] = {}
        for i, d in enumerate(positive_maps, start=1):
            self.assignment[i] = d
            self.assignment[-i] = invert(d)
        self._cache: dict[Word, CircleDiffeo] = {group_identity(group): identity_diffeo(self.n)}
        if validate:
            self._validate()

    def _validate(self):
        tol = diffeo_tolerance(self.n)
        strict = all(d.provenance != "user_sampled" for d in self.assignment.values())
        ident = identity_diffeo(self.n)
        for i in range(1, self.group.rank + 1):
            d = c1_distance(compose(self.assignment[i], self.assignment[-i]), ident)
            self._report(d, tol, f"generator {self.group.symbol(i)}: inverse defect", strict)
        if self.group.family == FREE_ABELIAN:
            for i in range(1, self.group.rank + 1):
                for j in range(i + 1, self.group.rank + 1):
                    fi, fj = self.assignment[i], self.assignment[j]
                    d = c1_distance(compose(fi, fj), compose(fj, fi))
                    self._report(
                        d, tol,
                        f"generators {self.group.symbol(i)},{self.group.symbol(j)}: commutator defect",
                        strict,
                    )

    @staticmethod
    def _report(defect, tol, what, strict):
        if defect > tol:
            msg = f"{what} {defect:.3e} exceeds tolerance {tol:.1e}"
            if strict:
                raise InputError(msg)
            warnings.warn(msg, stacklevel=3)

    def generator_map(self, letter: int) -> CircleDiffeo:
        d = self.assignment.get(letter)
        if d is None:
            raise InputError(f"no diffeomorphism assigned to letter {letter}")
        return d


def act(action: ActionSpec, g: Word) -> CircleDiffeo:
    """Evaluate a reduced word as a diffeomorphism (memoized per action)."""
    if g.group != action.group:
        raise InputError("word group does not match the action")
    cached = action._cache.get(g)
    if cached is not None:
        return cached
    prefix = Word(g.group, g.letters[:-1])
    result = compose(act(action, prefix), action.generator_map(g.letters[-1]))
    action._cache[g] = result
    return result


def translate_points(action: ActionSpec, g: Word) -> np.ndarray:
    """Grid images under the inverse map: Phi_{g^-1}(x_i) reduced mod 1.

    These are exactly the lift samples of act(action, g^-1), so translating a
    grid function by g costs one interpolation pass.
    """
    phi_inv = act(action, inv(g))
    return np.mod(phi_inv.lift, 1.0)


def translate_function(action: ActionSpec, g: Word, values: np.ndarray) -> np.ndarray:
    """The induced translation (g*f)(x) = f(Phi_{g^-1} x) on grid functions."""
    return periodic_interp(np.asarray(values, dtype=float), translate_points(action, g))


# ---------------------------------------------------------------------------
# built-in action families


def rotation_action(group: GroupSpec, thetas, n: int = DEFAULT_GRID, name: str = "rotations") -> ActionSpec:
    return ActionSpec(group, [make_rotation(t, n) for t in thetas], name=name)


def sine_action(group: GroupSpec, thetas, a: float, n: int = DEFAULT_GRID, name: str = "sine") -> ActionSpec:
    return ActionSpec(group, [make_sine_perturbed(t, a, n) for t in thetas], name=name)


def conjugated_rotation_action(
    group: GroupSpec, thetas, a: float, n: int = DEFAULT_GRID, name: str = "conjugated_rotations"
) -> ActionSpec:
    """Rotations conjugated by one fixed sine map: q o R_theta o q^-1.

    The generator maps commute exactly (in exact arithmetic), so this yields
    free-abelian actions with genuinely non-invariant Lebesgue measure.
    """
    q = make_sine_perturbed(0.0, a, n)
    q_inv = invert(q)
    maps = [compose(q, compose(make_rotation(t, n), q_inv)) for t in thetas]
    return ActionSpec(group, maps, name=name)


def diffeo_from_config(cfg: Mapping, n: int) -> CircleDiffeo:
    """Build a diffeomorphism from its JSON description."""
    kind = cfg.get("kind")
    if kind == "rotation":
        return make_rotation(float(cfg["theta"]), n)
    if kind == "sine":
        return make_sine_perturbed(float(cfg["theta"]), float(cfg["a"]), n)
    if kind == "samples":
        lift = np.asarray(cfg["lift"], dtype=float)
        deriv = np.asarray(cfg["deriv"], dtype=float)
        if lift.shape[0] != n:
            raise InputError(f"sampled diffeo has {lift.shape[0]} points, config grid is {n}")
        return CircleDiffeo(lift, deriv, "user_sampled")
    raise InputError(f"unknown diffeo kind {kind!r}")
