"""Orbits, stabilizers, orbit types, and fixed-point subspaces.

The stabilizer of a vector is computed at a relative tolerance and then
sanity-checked for closure under the group product: a near-stabilizer set
that is not a subgroup means the input sits ambiguously between symmetry
classes, and we raise instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FaithfulnessError, GroupMismatchError, ToleranceInconsistencyError
from .groups import FiniteGroup, Subgroup, conjugacy_class_of_subgroup, whole_group
from .reps import Representation, is_faithful

STAB_TOL = 1e-9
ORBIT_ROUND_DIGITS = 12


@dataclass(frozen=True)
class SymmetryProfile:
    """Everything the toolkit knows about one vector's symmetry."""

    rep: Representation
    x: np.ndarray
    orbit: np.ndarray           # (k, dim), distinct images, deterministic order
    stabilizer: Subgroup
    orbit_type: tuple[Subgroup, ...]   # conjugacy class of the stabilizer


@dataclass(frozen=True)
class FixedSubspace:
    """Orthonormal basis and projector for {x : rho(h) x = x for all h in H}."""

    rep: Representation
    subgroup: Subgroup
    basis: np.ndarray       # (dim, d) orthonormal columns
    projector: np.ndarray   # (dim, dim) = basis @ basis.T

    @property
    def dim(self) -> int:
        return self.basis.shape[1]


def stabilizer(rep: Representation, x, tol: float = STAB_TOL) -> Subgroup:
    """All g with ||rho(g) x - x|| <= tol * max(1, ||x||), verified closed."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (rep.dim,):
        raise ValueError(f"vector has shape {x.shape}, representation dim is {rep.dim}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    scale = tol * max(1.0, float(np.linalg.norm(x)))
    residuals = np.linalg.norm(rep.matrices @ x - x, axis=1)
    members = np.flatnonzero(residuals <= scale)
    member_set = set(int(i) for i in members)
    for a in member_set:
        if rep.group.inv(a) not in member_set:
            raise ToleranceInconsistencyError(
                f"near-stabilizer of {x.tolist()} not closed under inverse at tol {tol}"
            )
        for b in member_set:
            if rep.group.mult(a, b) not in member_set:
                raise ToleranceInconsistencyError(
                    f"near-stabilizer of {x.tolist()} not closed under product at tol {tol}"
                )
    return Subgroup(rep.group, members)


def orbit(rep: Representation, x, tol: float = STAB_TOL) -> np.ndarray:
    """Distinct images rho(g) x, deduplicated on rounded coordinates."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (rep.dim,):
        raise ValueError(f"vector has shape {x.shape}, representation dim is {rep.dim}")
    images = rep.matrices @ x
    seen = {}
    for g in range(rep.group.order):
        key = tuple(np.round(images[g], ORBIT_ROUND_DIGITS))
        if key not in seen:
            seen[key] = images[g]
    return np.array(list(seen.values()))


def symmetry_profile(rep: Representation, x, tol: float = STAB_TOL) -> SymmetryProfile:
    stab = stabilizer(rep, x, tol)
    return SymmetryProfile(
        rep=rep,
        x=np.asarray(x, dtype=np.float64),
        orbit=orbit(rep, x, tol),
        stabilizer=stab,
        orbit_type=tuple(conjugacy_class_of_subgroup(rep.group, stab)),
    )


def fixed_subspace(rep: Representation, sub: Subgroup) -> FixedSubspace:
    """Null space of the stacked (rho(h) - I) rows over subgroup generators.

    Generators suffice: a vector fixed by every generator is fixed by the
    subgroup they generate.
    """
    if sub.parent is not rep.group:
        raise GroupMismatchError("subgroup belongs to a different group")
    gens = sub.generating_set()
    n = rep.dim
    if not gens:
        basis = np.eye(n)
    else:
        stacked = np.vstack([rep.matrices[g] - np.eye(n) for g in gens])
        u, s, vh = np.linalg.svd(stacked)
        smax = s[0] if len(s) else 0.0
        if smax == 0.0:
            basis = np.eye(n)
        else:
            rank = int(np.sum(s > 1e-10 * smax))
            basis = vh[rank:].T
    projector = basis @ basis.T
    return FixedSubspace(rep=rep, subgroup=sub, basis=basis, projector=projector)


def membership_in_type(rep: Representation, x, conj_class, tol: float = STAB_TOL) -> bool:
    """True iff the stabilizer of x contains some subgroup in the class."""
    stab = stabilizer(rep, x, tol)
    return any(k.issubset(stab) for k in conj_class)


def stabilizer_fraction(
    rep: Representation,
    num_samples: int,
    seed: int,
    adversarial: bool = False,
    tol: float = STAB_TOL,
) -> float:
    """Fraction of Gaussian samples with a non-trivial stabilizer.

    With adversarial=True every sample is first projected onto the subspace
    fixed by the whole group, yielding a counter-distribution for which the
    fraction is 1 instead of 0 (the zero vector counts: it is fixed by
    everything).
    """
    if num_samples < 1:
        raise ValueError("num_samples must be >= 1")
    if not is_faithful(rep):
        raise FaithfulnessError("stabilizer_fraction requires a faithful representation")
    rng = np.random.default_rng(seed)
    samples = rng.standard_normal((num_samples, rep.dim))
    if adversarial:
        proj = fixed_subspace(rep, whole_group(rep.group)).projector
        samples = samples @ proj.T
    hits = np.zeros(num_samples, dtype=bool)
    scales = tol * np.maximum(1.0, np.linalg.norm(samples, axis=1))
    for g in range(1, rep.group.order):
        residuals = np.linalg.norm(samples @ rep.matrices[g].T - samples, axis=1)
        hits |= residuals <= scales
    return float(np.mean(hits))
