"""Finitely supported module vectors, the isometric and unitary representations,
amenability witnesses, derivative envelopes, and coboundary cocycles.

A module vector assigns a grid function to finitely many group elements.  The
isometric representation moves the group index by left translation and
precomposes the grid functions with the inverse circle map; the unitary
representation additionally weights by the square root of the derivative
cocycle.  Witness verification, the box/ball witnesses, truncated envelopes
of the derivative cocycle, and coboundary cocycle growth all live here.

Envelope truncations are always labeled by their ball radius: the upper
envelope is nondecreasing and the lower envelope nonincreasing in the radius,
so finite-radius results are evidence, never certificates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .circle import ActionSpec, act, periodic_interp, translate_points
from .errors import CapabilityError, InputError
from .groups import (
    FREE_ABELIAN,
    GroupSpec,
    Word,
    ball,
    generators,
    identity,
    inv,
    lattice_word,
    mul,
)
from .measures import GridMeasure, RhoCache, integrate, radon_nikodym

WITNESS_NORM_TOL = 1e-6


class ModuleVector:
    """Finitely supported map from group elements to grid functions."""

    __slots__ = ("group", "n", "entries")

    def __init__(self, group: GroupSpec, n: int, entries: Mapping[Word, np.ndarray]):
        store: dict[Word, np.ndarray] = {}
        for w, v in entries.items():
            if w.group != group:
                raise InputError("module entry indexed by a word from a different group")
            arr = np.asarray(v, dtype=float)
            if arr.shape != (n,):
                raise InputError(f"entry for {str(w) or 'e'!r} has shape {arr.shape}, expected ({n},)")
            store[w] = arr
        self.group = group
        self.n = n
        self.entries = store

    @property
    def support(self):
        return self.entries.keys()

    def entry(self, w: Word) -> np.ndarray:
        v = self.entries.get(w)
        return v if v is not None else np.zeros(self.n)

    def scaled_pointwise(self, weight: np.ndarray) -> "ModuleVector":
        """Multiply every entry by one grid function."""
        return ModuleVector(self.group, self.n, {w: v * weight for w, v in self.entries.items()})

    def __sub__(self, other: "ModuleVector") -> "ModuleVector":
        return _combine(self, other, -1.0)

    def __add__(self, other: "ModuleVector") -> "ModuleVector":
        return _combine(self, other, 1.0)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"ModuleVector({len(self.entries)} words, n={self.n})"


def _combine(a: ModuleVector, b: ModuleVector, sign: float) -> ModuleVector:
    if a.group != b.group or a.n != b.n:
        raise InputError("module vectors live on different groups or grids")
    out = {w: v.copy() for w, v in a.entries.items()}
    for w, v in b.entries.items():
        if w in out:
            out[w] = out[w] + sign * v
        else:
            out[w] = sign * v
    return ModuleVector(a.group, a.n, out)


def module_inner(xi: ModuleVector, eta: ModuleVector) -> np.ndarray:
    """Pointwise inner product: sum over the group of products of entries."""
    if xi.group != eta.group or xi.n != eta.n:
        raise InputError("module vectors live on different groups or grids")
    out = np.zeros(xi.n)
    small, big = (xi, eta) if len(xi.entries) <= len(eta.entries) else (eta, xi)
    for w, v in small.entries.items():
        other = big.entries.get(w)
        if other is not None:
            out += v * other
    return out


def scalar_inner(xi: ModuleVector, eta: ModuleVector, nu: GridMeasure) -> float:
    """Hilbert-space inner product: the pointwise one integrated against nu."""
    return integrate(module_inner(xi, eta), nu)


def apply_L(action: ActionSpec, g: Word, xi: ModuleVector) -> ModuleVector:
    """Isometric representation: translate the support by g and precompose
    every entry with the inverse circle map."""
    if xi.group != action.group or xi.n != action.n:
        raise InputError("module vector does not match the action")
    pts = translate_points(action, g)
    return ModuleVector(
        xi.group, xi.n, {mul(g, w): periodic_interp(v, pts) for w, v in xi.entries.items()}
    )


def apply_pi(action: ActionSpec, nu: GridMeasure, g: Word, xi: ModuleVector) -> ModuleVector:
    """Unitary representation: the isometric one weighted by sqrt(rho_g)."""
    weight = np.sqrt(radon_nikodym(action, nu, g))
    return apply_L(action, g, xi).scaled_pointwise(weight)


@dataclass(frozen=True)
class WitnessReport:
    """Outcome of checking the three witness conditions."""

    nonneg_ok: bool
    unit_norm_ok: bool
    norm_defect: float
    overlap_defect: float
    epsilon: float
    overlap_ok: bool

    @property
    def satisfied(self) -> bool:
        return self.nonneg_ok and self.unit_norm_ok and self.overlap_ok

    def to_dict(self) -> dict:
        return {
            "nonneg_ok": self.nonneg_ok,
            "unit_norm_ok": self.unit_norm_ok,
            "norm_defect": self.norm_defect,
            "overlap_defect": self.overlap_defect,
            "epsilon": self.epsilon,
            "overlap_ok": self.overlap_ok,
            "satisfied": self.satisfied,
        }


def generator_overlaps(action: ActionSpec, xi: ModuleVector) -> np.ndarray:
    """Average over the generators of the pointwise overlap with the translate."""
    gens = generators(action.group)
    avg = np.zeros(xi.n)
    for s in gens:
        avg += module_inner(xi, apply_L(action, s, xi))
    return avg / len(gens)


def witness_defect(action: ActionSpec, xi: ModuleVector) -> float:
    """Sup over the circle of 1 minus the average generator overlap."""
    return float(np.max(1.0 - generator_overlaps(action, xi)))


def verify_witness(xi: ModuleVector, action: ActionSpec, epsilon: float) -> WitnessReport:
    """Report-only check of the witness conditions at tolerance epsilon."""
    nonneg = all(float(np.min(v)) >= 0.0 for v in xi.entries.values())
    norm = module_inner(xi, xi)
    norm_defect = float(np.max(np.abs(norm - 1.0)))
    defect = witness_defect(action, xi)
    return WitnessReport(
        nonneg_ok=nonneg,
        unit_norm_ok=norm_defect <= WITNESS_NORM_TOL,
        norm_defect=norm_defect,
        overlap_defect=defect,
        epsilon=float(epsilon),
        overlap_ok=defect <= epsilon,
    )


def constant_witness(group: GroupSpec, n: int, words: Sequence[Word]) -> ModuleVector:
    """Unit witness with constant entries supported on the given words."""
    if not words:
        raise InputError("witness support must be nonempty")
    value = 1.0 / np.sqrt(len(words))
    return ModuleVector(group, n, {w: np.full(n, value) for w in words})


def build_folner_witness(spec: GroupSpec, box_side: int, n: int) -> ModuleVector:
    """Box witness for a lattice group: defect exactly 1/box_side under any action.

    The circle factor is constant, so the action cancels in the overlap and
    the defect is pure counting: each generator overlap is 1 - 1/box_side.
    """
    if spec.family != FREE_ABELIAN:
        raise CapabilityError("box witnesses exist only for free-abelian groups")
    if box_side < 1:
        raise InputError("box side must be >= 1")
    d = spec.rank
    words = []
    idx = np.ndindex(*([box_side] * d))
    for exps in idx:
        words.append(lattice_word(spec, exps))
    return constant_witness(spec, n, words)


def build_ball_witness(spec: GroupSpec, radius: int, n: int) -> ModuleVector:
    """Unit witness with constant entries on a Cayley ball (any group family)."""
    return constant_witness(spec, n, ball(spec, radius).elements)


def random_witness(group: GroupSpec, n: int, rng: np.random.Generator,
                   support: Sequence[Word] | None = None, max_radius: int = 2) -> ModuleVector:
    """Random witness satisfying the nonnegativity and unit-norm conditions.

    Entries are positive low-frequency trigonometric profiles, normalized
    pointwise so the module norm is the constant 1.
    """
    if support is None:
        elems = ball(group, max_radius).elements
        size = int(rng.integers(1, min(len(elems), 8) + 1))
        picks = rng.choice(len(elems), size=size, replace=False)
        support = [elems[int(i)] for i in sorted(picks)]
    if not support:
        raise InputError("witness support must be nonempty")
    x = (np.arange(n) + 0.5) / n
    profiles = []
    for _ in support:
        c = rng.uniform(0.5, 1.5)
        a1, b1, a2 = rng.uniform(-0.2, 0.2, size=3)
        f = c + a1 * np.cos(2 * np.pi * x) + b1 * np.sin(2 * np.pi * x) + a2 * np.cos(4 * np.pi * x)
        profiles.append(np.maximum(f, 1e-3))
    total = np.sqrt(sum(f * f for f in profiles))
    return ModuleVector(group, n, {w: f / total for w, f in zip(support, profiles)})


def support_overlap_radius(xi: ModuleVector) -> int:
    """Smallest R with zero overlap between xi and its g-translate for |g| >= R."""
    words = list(xi.support)
    diam = 0
    for u in words:
        for w in words:
            diam = max(diam, mul(u, inv(w)).length)
    return diam + 1


# ---------------------------------------------------------------------------
# truncated envelopes of the derivative cocycle


def envelope_over_words(action: ActionSpec, nu: GridMeasure, words: Iterable[Word],
                        mode: str, cache: RhoCache | None = None) -> np.ndarray:
    """Pointwise max ("sup") or min ("inf") of rho_g over an explicit word list."""
    if mode not in ("sup", "inf"):
        raise InputError(f"mode must be 'sup' or 'inf', got {mode!r}")
    cache = cache or RhoCache(action, nu)
    out = None
    for w in words:
        rho = cache.get(w)
        if out is None:
            out = rho.copy()
        elif mode == "sup":
            np.maximum(out, rho, out=out)
        else:
            np.minimum(out, rho, out=out)
    if out is None:
        raise InputError("word list must be nonempty")
    return out


def truncated_rho_bounds(action: ActionSpec, nu: GridMeasure, radius: int,
                         cache: RhoCache | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Upper and lower envelopes of rho_g over the ball of the given radius.

    The identity contributes rho_e = 1, so the envelopes always straddle 1;
    they are monotone in the radius (upper nondecreasing, lower nonincreasing).
    """
    if radius < 0:
        raise InputError("radius must be nonnegative")
    words = ball(action.group, radius).elements
    cache = cache or RhoCache(action, nu)
    upper = envelope_over_words(action, nu, words, "sup", cache)
    lower = envelope_over_words(action, nu, words, "inf", cache)
    return upper, lower


def envelope_shift_defect(action: ActionSpec, nu: GridMeasure, g: Word, radius: int,
                          mode: str = "sup") -> float:
    """Defect of the envelope shift identity, truncated to matching index sets.

    In exact arithmetic rho_g(x) * env_{B_R}(Phi_{g^-1} x) equals the envelope
    over the shifted ball g*B_R at x (a direct consequence of the derivative
    cocycle law), so the returned defect measures interpolation error only.
    """
    cache = RhoCache(action, nu)
    words = ball(action.group, radius).elements
    env = envelope_over_words(action, nu, words, mode, cache)
    rho_g = cache.get(g)
    lhs = rho_g * periodic_interp(env, translate_points(action, g))
    rhs = envelope_over_words(action, nu, [mul(g, w) for w in words], mode, cache)
    return float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# coboundary cocycles built from witness families


class CocycleFamily:
    """Indexed family of verified witnesses with their support-overlap radii.

    Levels are sorted by increasing overlap radius.  Construction validates
    the nonnegativity and unit-norm conditions of every level and computes
    the true overlap radius from the supports; an unvalidated family cannot
    be used by the cocycle operations.
    """

    def __init__(self, witnesses: Sequence[ModuleVector], validate: bool = True):
        if not witnesses:
            raise InputError("a cocycle family needs at least one level")
        group = witnesses[0].group
        n = witnesses[0].n
        levels = []
        for i, xi in enumerate(witnesses):
            if xi.group != group or xi.n != n:
                raise InputError("family levels live on different groups or grids")
            if validate:
                nonneg = all(float(np.min(v)) >= 0.0 for v in xi.entries.values())
                norm_defect = float(np.max(np.abs(module_inner(xi, xi) - 1.0)))
                if not nonneg or norm_defect > WITNESS_NORM_TOL:
                    raise InputError(
                        f"level {i}: witness conditions fail "
                        f"(nonneg={nonneg}, norm defect={norm_defect:.2e})"
                    )
            levels.append((xi, support_overlap_radius(xi)))
        levels.sort(key=lambda pair: pair[1])
        self.group = group
        self.n = n
        self.levels = levels
        self.validated = bool(validate)
        self._defect_cache: dict[int, list[float]] = {}

    def __len__(self) -> int:
        return len(self.levels)

    @property
    def radii(self) -> list[int]:
        return [r for _, r in self.levels]

    def growth_count(self, word_length: int) -> int:
        """Number of levels whose overlap radius the word length has passed."""
        return sum(1 for _, r in self.levels if word_length >= r)

    def require_validated(self):
        if not self.validated:
            raise InputError("cocycle family was built without validation")

    def level_defects(self, action: ActionSpec) -> list[float]:
        """Per-level sup defect max_s sup_x (1 - <xi, L_s xi>(x)), memoized."""
        key = id(action)
        cached = self._defect_cache.get(key)
        if cached is not None:
            return cached
        gens = generators(self.group)
        out = []
        for xi, _ in self.levels:
            worst = 0.0
            for s in gens:
                overlap = module_inner(xi, apply_L(action, s, xi))
                worst = max(worst, float(np.max(1.0 - overlap)))
            out.append(max(worst, 0.0))
        self._defect_cache[key] = out
        return out


def coboundary(family: CocycleFamily, action: ActionSpec, g: Word) -> list[ModuleVector]:
    """Per-level coboundary: the g-translate of the level witness minus itself."""
    family.require_validated()
    return [apply_L(action, g, xi) - xi for xi, _ in family.levels]


def _sup_module_norm(v: ModuleVector) -> float:
    return float(np.sqrt(max(np.max(module_inner(v, v)), 0.0)))


def cocycle_defect(family: CocycleFamily, action: ActionSpec, g: Word, h: Word) -> float:
    """Max level defect of the cocycle law b_{gh} = T_g b_h + b_g (sup module norm)."""
    family.require_validated()
    gh = mul(g, h)
    worst = 0.0
    for (xi, _), b_h in zip(family.levels, coboundary(family, action, h)):
        b_g = apply_L(action, g, xi) - xi
        b_gh = apply_L(action, gh, xi) - xi
        delta = b_gh - (apply_L(action, g, b_h) + b_g)
        worst = max(worst, _sup_module_norm(delta))
    return worst


@dataclass(frozen=True)
class GrowthBounds:
    """Pointwise squared length of the stacked coboundary with its growth bounds."""

    lower: float
    upper: float
    pointwise: np.ndarray = field(repr=False)

    def holds(self, slack: float = 1e-9) -> bool:
        return (
            float(np.min(self.pointwise)) >= self.lower - slack
            and float(np.max(self.pointwise)) <= self.upper + slack
        )


def cocycle_bounds(family: CocycleFamily, action: ActionSpec, g: Word) -> GrowthBounds:
    """Growth sandwich for the stacked coboundary at one group element.

    Lower bound: twice the number of levels the word length has saturated
    (those levels contribute exactly 2 pointwise).  Upper bound: K |g|^2 with
    K the sum of twice the measured per-level defects, via the triangle
    inequality over a generator decomposition of g.
    """
    family.require_validated()
    pointwise = np.zeros(family.n)
    for b in coboundary(family, action, g):
        pointwise += module_inner(b, b)
    lower = 2.0 * family.growth_count(g.length)
    k_const = 2.0 * sum(family.level_defects(action))
    upper = k_const * g.length**2
    return GrowthBounds(lower=lower, upper=upper, pointwise=pointwise)


def weight_cocycle(family: CocycleFamily, action: ActionSpec, nu: GridMeasure,
                   radius: int, mode: str, g: Word) -> float:
    """Squared norm of the envelope-weighted coboundary.

    Integrates env_R * <b_g, b_g> against nu, where env_R is the truncated
    lower ("inf") or upper ("sup") envelope of the derivative cocycle.
    """
    upper_env, lower_env = truncated_rho_bounds(action, nu, radius)
    env = upper_env if mode == "sup" else lower_env
    bounds = cocycle_bounds(family, action, g)
    return integrate(env * bounds.pointwise, nu)


def weighted_cocycle_defect(family: CocycleFamily, action: ActionSpec, nu: GridMeasure,
                            radius: int, mode: str, g: Word, h: Word) -> float:
    """Cocycle-law defect for the envelope-weighted coboundary.

    The g-side terms are weighted by the envelope over the shifted ball
    g*B_R, which makes the law exact in exact arithmetic (the same shift
    identity as envelope_shift_defect); the result is interpolation error.
    """
    family.require_validated()
    cache = RhoCache(action, nu)
    words = ball(action.group, radius).elements
    env = envelope_over_words(action, nu, words, mode, cache)
    env_shift = envelope_over_words(action, nu, [mul(g, w) for w in words], mode, cache)
    w_base = np.sqrt(env)
    w_shift = np.sqrt(env_shift)
    rho_g_sqrt = np.sqrt(cache.get(g))
    gh = mul(g, h)
    worst = 0.0
    for xi, _ in family.levels:
        b_h = apply_L(action, h, xi) - xi
        b_g = apply_L(action, g, xi) - xi
        b_gh = apply_L(action, gh, xi) - xi
        u_g_b_h = apply_L(action, g, b_h.scaled_pointwise(w_base)).scaled_pointwise(rho_g_sqrt)
        delta = (u_g_b_h + b_g.scaled_pointwise(w_shift)) - b_gh.scaled_pointwise(w_shift)
        worst = max(worst, _sup_module_norm(delta))
    return worst


# ---------------------------------------------------------------------------
# built-in family fixtures


def lattice_interval_family(spec: GroupSpec, levels: int, n: int) -> CocycleFamily:
    """Levels are box witnesses of side m^2 on a lattice group: the level-m
    defect is exactly 1/m^2 under any action, matching the quadratic schedule
    the growth constant expects."""
    witnesses = [build_folner_witness(spec, m * m, n) for m in range(1, levels + 1)]
    return CocycleFamily(witnesses)


def ball_witness_family(spec: GroupSpec, radii: Sequence[int], n: int) -> CocycleFamily:
    """Levels are constant ball witnesses; valid on any group, with whatever
    overlap defects the geometry dictates (they do not vanish on free groups)."""
    witnesses = [build_ball_witness(spec, r, n) for r in radii]
    return CocycleFamily(witnesses)
