"""Linear representations of finite groups and the actions they induce.

All representations are dense float64 matrix tables, one matrix per group
element.  The toolkit restricts itself to orthogonal representations, which
makes `rho(g)^T == rho(g^-1)` and keeps the two equivalent forms of the
solver's coset constraint interchangeable.
"""

from __future__ import annotations

import csv

import numpy as np

from .errors import GroupMismatchError, RepresentationError, SizeCapError
from .groups import FiniteGroup

REGULAR_CAP = 256
HOM_TOL = 1e-10
ORTHO_TOL = 1e-10
EXHAUSTIVE_ORDER = 48


class Representation:
    """Per-element matrix table rho: G -> GL(R^dim).

    Validated at construction: homomorphism (exhaustive for |G| <= 48,
    sampled above), identity at index 0, orthogonality when flagged.
    """

    def __init__(self, group: FiniteGroup, matrices, kind: str, orthogonal: bool):
        mats = np.asarray(matrices, dtype=np.float64)
        if mats.shape[0] != group.order or mats.ndim != 3 or mats.shape[1] != mats.shape[2]:
            raise RepresentationError(f"need {group.order} square matrices, got {mats.shape}")
        self.group = group
        self.dim = int(mats.shape[1])
        self.matrices = mats
        self.matrices.setflags(write=False)
        self.kind = kind
        self.orthogonal = bool(orthogonal)
        self._validate()

    def _validate(self):
        n = self.group.order
        eye = np.eye(self.dim)
        ident_err = np.abs(self.matrices[0] - eye).max()
        if self.kind in ("permutation", "regular"):
            if ident_err != 0.0:
                raise RepresentationError("identity matrix must be exact for permutation kinds")
        elif ident_err > 1e-12:
            raise RepresentationError(f"rho(e) deviates from I by {ident_err:.2e}")

        if n <= EXHAUSTIVE_ORDER:
            pairs = [(i, j) for i in range(n) for j in range(n)]
        else:
            rng = np.random.default_rng(0)
            pairs = list(zip(rng.integers(0, n, 2000), rng.integers(0, n, 2000)))
        for i, j in pairs:
            k = self.group.mult(int(i), int(j))
            err = np.linalg.norm(self.matrices[k] - self.matrices[i] @ self.matrices[j])
            if err > HOM_TOL:
                raise RepresentationError(
                    f"homomorphism failure at pair ({i},{j}): residual {err:.2e}"
                )

        if self.orthogonal:
            for i in range(n):
                err = np.linalg.norm(self.matrices[i].T @ self.matrices[i] - eye)
                if err > ORTHO_TOL:
                    raise RepresentationError(f"matrix {i} is not orthogonal: residual {err:.2e}")

    def act(self, g: int, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.dim,):
            raise ValueError(f"vector has shape {x.shape}, representation dim is {self.dim}")
        return self.matrices[g] @ x

    def __repr__(self) -> str:
        return f"Representation({self.group.name}, dim={self.dim}, kind={self.kind})"


def _perm_matrix(perm, dim: int) -> np.ndarray:
    m = np.zeros((dim, dim))
    m[list(perm), range(dim)] = 1.0
    return m


def permutation_rep(group: FiniteGroup) -> Representation:
    """Natural permutation matrices of the group's canonical perm encoding."""
    d = group.degree
    mats = np.stack([_perm_matrix(e.perm, d) for e in group.elements])
    return Representation(group, mats, "permutation", orthogonal=True)


def regular_rep(group: FiniteGroup) -> Representation:
    """Left-multiplication action on the element basis; always faithful."""
    n = group.order
    if n > REGULAR_CAP:
        raise SizeCapError(f"regular representation capped at order {REGULAR_CAP}, got {n}")
    mats = np.stack([_perm_matrix(group.mult_table[g], n) for g in range(n)])
    return Representation(group, mats, "regular", orthogonal=True)


def direct_sum(reps) -> Representation:
    """Block-diagonal sum of representations of one group."""
    reps = list(reps)
    if not reps:
        raise ValueError("direct_sum of zero representations")
    group = reps[0].group
    for r in reps[1:]:
        if r.group is not group:
            raise GroupMismatchError("direct_sum requires a common group")
    if len(reps) == 1:
        return reps[0]
    dim = sum(r.dim for r in reps)
    mats = np.zeros((group.order, dim, dim))
    off = 0
    for r in reps:
        mats[:, off : off + r.dim, off : off + r.dim] = r.matrices
        off += r.dim
    return Representation(group, mats, "direct_sum", orthogonal=all(r.orthogonal for r in reps))


def custom_rep(group: FiniteGroup, matrices) -> Representation:
    """User-supplied matrix table; must pass homomorphism + orthogonality."""
    return Representation(group, matrices, "custom", orthogonal=True)


def trivial_rep(group: FiniteGroup, dim: int = 1) -> Representation:
    """All-identity table (not orthogonal-flagged as faithful; used in tests)."""
    mats = np.stack([np.eye(dim)] * group.order)
    return Representation(group, mats, "custom", orthogonal=True)


def is_faithful(rep: Representation, tol: float = 1e-10) -> bool:
    """True iff only the identity element is represented by (nearly) I."""
    eye = np.eye(rep.dim)
    for g in range(1, rep.group.order):
        if np.linalg.norm(rep.matrices[g] - eye) <= tol:
            return False
    return True


def act(rep: Representation, g: int, x) -> np.ndarray:
    return rep.act(g, x)


def load_custom_rep(group: FiniteGroup, path) -> Representation:
    """Read a custom representation from CSV.

    Header: element,m00,m01,...  Each row holds one element index followed by
    its dim x dim matrix flattened row-major.  Every element must appear
    exactly once.
    """
    rows = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "element":
            raise RepresentationError("custom rep CSV must start with an 'element' header column")
        for row in reader:
            if not row:
                continue
            g = int(row[0])
            rows[g] = np.array([float(v) for v in row[1:]])
    if sorted(rows) != list(range(group.order)):
        raise RepresentationError(
            f"CSV must cover element indices 0..{group.order - 1} exactly once"
        )
    flat_len = len(rows[0])
    dim = int(round(flat_len**0.5))
    if dim * dim != flat_len:
        raise RepresentationError(f"row length {flat_len} is not a square")
    mats = np.stack([rows[g].reshape(dim, dim) for g in range(group.order)])
    return custom_rep(group, mats)
