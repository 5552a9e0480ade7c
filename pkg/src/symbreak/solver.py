"""Assembly and null-space solving of (relaxed-)equivariant weight constraints.

A weight matrix W (m x n) is admissible when, for the chosen blocks,

    (W - rho_out(g)^T W rho_in(g)) P = 0,

with P the projector onto the fixed subspace of the constraint subgroup K
(P = I and g ranging over group generators in the classical standard mode;
one block per non-identity left coset of K with its lexicographically
smallest representative in relaxed mode; the identity coset is trivially
satisfied by g = e and contributes no block, leaving |G|/|K| - 1 of them).
Blocks are vectorized column-major via vec(A W B) = (B^T kron A) vec(W),
stacked dense, and solved with one SVD.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import DataFormatError, GroupMismatchError, RankInstabilityError
from .groups import FiniteGroup, Subgroup, left_cosets, subgroup_generate
from .reps import Representation, permutation_rep, regular_rep
from .symmetry import fixed_subspace

NULL_THRESHOLD = 1e-10
RESIDUAL_TOL = 1e-8
_INSTABILITY_WINDOW = (1e-2, 1e2)   # relative to threshold * sigma_max


@dataclass(frozen=True)
class ConstraintBlock:
    """Provenance for one stacked block: which element, which projector."""

    rep_element: int
    projector_kind: str     # "identity" or "fixed_subspace"


@dataclass
class ConstraintSystem:
    rep_in: Representation
    rep_out: Representation
    mode: str                       # "standard" | "relaxed"
    subgroup_k: Subgroup | None
    projector: np.ndarray           # shared P (n x n)
    rows: np.ndarray                # (num_blocks * m*n, m*n)
    blocks: tuple[ConstraintBlock, ...]

    @property
    def vec_dim(self) -> int:
        return self.rep_out.dim * self.rep_in.dim

    def residual(self, w: np.ndarray) -> float:
        """Max Frobenius residual of (W - rho'(g)^T W rho(g)) P over blocks."""
        worst = 0.0
        for blk in self.blocks:
            g = blk.rep_element
            lhs = (w - self.rep_out.matrices[g].T @ w @ self.rep_in.matrices[g]) @ self.projector
            worst = max(worst, float(np.linalg.norm(lhs)))
        return worst


@dataclass
class WeightBasis:
    """Orthonormal (Frobenius) basis of the admissible weight space."""

    matrices: np.ndarray            # (r, m, n)
    mode: str
    system: ConstraintSystem
    null_threshold: float
    max_residual: float
    singular_values: np.ndarray = field(repr=False, default=None)

    @property
    def rank(self) -> int:
        return self.matrices.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrices.shape[1], self.matrices.shape[2]


def _vec(w: np.ndarray) -> np.ndarray:
    return w.reshape(-1, order="F")


def _unvec(v: np.ndarray, m: int, n: int) -> np.ndarray:
    return v.reshape(m, n, order="F")


def _block_rows(rho_in_g, rho_out_g, proj) -> np.ndarray:
    m = rho_out_g.shape[0]
    return np.kron(proj.T, np.eye(m)) - np.kron((rho_in_g @ proj).T, rho_out_g.T)


def _check_same_group(rep_in: Representation, rep_out: Representation):
    if rep_in.group is not rep_out.group:
        raise GroupMismatchError("input and output representations use different groups")


def build_standard(rep_in: Representation, rep_out: Representation) -> ConstraintSystem:
    """Classical equivariance W rho(g) = rho'(g) W, one block per generator."""
    _check_same_group(rep_in, rep_out)
    eye = np.eye(rep_in.dim)
    blocks = []
    rows = []
    for g in rep_in.group.generators:
        rows.append(_block_rows(rep_in.matrices[g], rep_out.matrices[g], eye))
        blocks.append(ConstraintBlock(rep_element=int(g), projector_kind="identity"))
    stacked = np.vstack(rows) if rows else np.zeros((0, rep_out.dim * rep_in.dim))
    return ConstraintSystem(
        rep_in=rep_in,
        rep_out=rep_out,
        mode="standard",
        subgroup_k=None,
        projector=eye,
        rows=stacked,
        blocks=tuple(blocks),
    )


def build_relaxed(rep_in: Representation, rep_out: Representation, k: Subgroup) -> ConstraintSystem:
    """One block per non-identity left coset of K, projected onto X_K."""
    _check_same_group(rep_in, rep_out)
    if k.parent is not rep_in.group:
        raise GroupMismatchError("constraint subgroup belongs to a different group")
    proj = fixed_subspace(rep_in, k).projector
    decomp = left_cosets(rep_in.group, k)
    blocks = []
    rows = []
    for rep_idx in decomp.representatives[1:]:
        rows.append(_block_rows(rep_in.matrices[rep_idx], rep_out.matrices[rep_idx], proj))
        blocks.append(ConstraintBlock(rep_element=int(rep_idx), projector_kind="fixed_subspace"))
    stacked = np.vstack(rows) if rows else np.zeros((0, rep_out.dim * rep_in.dim))
    return ConstraintSystem(
        rep_in=rep_in,
        rep_out=rep_out,
        mode="relaxed",
        subgroup_k=k,
        projector=proj,
        rows=stacked,
        blocks=tuple(blocks),
    )


def _canonical_units(m: int, n: int) -> np.ndarray:
    return np.eye(m * n).reshape(m * n, n, m).transpose(0, 2, 1)


def solve_basis(system: ConstraintSystem, null_threshold: float = NULL_THRESHOLD) -> WeightBasis:
    """Orthonormal null-space basis of the stacked constraint matrix."""
    m, n = system.rep_out.dim, system.rep_in.dim
    mn = m * n
    if system.rows.shape[0] == 0 or not system.rows.any():
        mats = _canonical_units(m, n)
        return WeightBasis(
            matrices=mats,
            mode=system.mode,
            system=system,
            null_threshold=null_threshold,
            max_residual=0.0,
            singular_values=np.zeros(0),
        )
    _, svals, vh = np.linalg.svd(system.rows, full_matrices=True)
    smax = svals[0]
    cut = null_threshold * smax
    lo, hi = _INSTABILITY_WINDOW[0] * cut, _INSTABILITY_WINDOW[1] * cut
    if np.any((svals > lo) & (svals < hi)):
        raise RankInstabilityError(
            f"singular values {svals[(svals > lo) & (svals < hi)]} fall inside the "
            f"instability window around threshold {cut:.3e}"
        )
    rank = int(np.sum(svals > cut))
    null_vecs = vh[rank:]
    mats = np.stack([_unvec(v, m, n) for v in null_vecs]) if len(null_vecs) else np.zeros((0, m, n))
    worst = max((system.residual(w) for w in mats), default=0.0)
    if worst > RESIDUAL_TOL:
        raise RankInstabilityError(f"solved basis violates its constraints: residual {worst:.3e}")
    return WeightBasis(
        matrices=mats,
        mode=system.mode,
        system=system,
        null_threshold=null_threshold,
        max_residual=worst,
        singular_values=svals,
    )


def assemble_weight(basis: WeightBasis, coeffs) -> np.ndarray:
    coeffs = np.asarray(coeffs, dtype=np.float64)
    if coeffs.shape != (basis.rank,):
        raise ValueError(f"need {basis.rank} coefficients, got shape {coeffs.shape}")
    m, n = basis.shape
    if basis.rank == 0:
        return np.zeros((m, n))
    return np.tensordot(coeffs, basis.matrices, axes=1)


def span_projector(basis: WeightBasis) -> np.ndarray:
    """Projector onto the solved subspace, in vectorized (mn x mn) form."""
    m, n = basis.shape
    if basis.rank == 0:
        return np.zeros((m * n, m * n))
    vecs = np.stack([_vec(w) for w in basis.matrices])
    return vecs.T @ vecs


def certify_basis(basis, conj_class, num_inputs: int, seed: int, tol: float = 1e-7):
    """Direct relaxed-equivariance check of random basis elements.

    Samples inputs from the union of fixed subspaces of the class members
    (Gaussian through each projector, pushed along orbits by random group
    elements), draws fresh random coefficients per input, and runs the
    exhaustive witness search of `verify.check_relaxed` on the induced
    linear map.  Returns a merged CheckReport.
    """
    from .verify import CheckReport, check_relaxed

    if basis.mode != "relaxed":
        raise ValueError("certify_basis needs a relaxed-mode basis")
    rep_in = basis.system.rep_in
    rep_out = basis.system.rep_out
    rng = np.random.default_rng(seed)
    projectors = [fixed_subspace(rep_in, k).projector for k in conj_class]

    trials = 0
    max_violation = 0.0
    witnesses = []
    passed = True
    for t in range(num_inputs):
        proj = projectors[t % len(projectors)]
        x = proj @ rng.standard_normal(rep_in.dim)
        x = rep_in.matrices[int(rng.integers(rep_in.group.order))] @ x
        w = assemble_weight(basis, rng.standard_normal(basis.rank))
        sub = check_relaxed(lambda v, w=w: w @ v, rep_in, rep_out, [x], tol=tol)
        trials += sub.trials
        max_violation = max(max_violation, sub.max_violation)
        passed = passed and sub.passed
        if not sub.passed:
            witnesses.extend(sub.witnesses)
        elif len(witnesses) < 3:
            witnesses.extend(sub.witnesses[:1])
    return CheckReport(
        check_name="basis_certificate",
        passed=passed,
        trials=trials,
        max_violation=max_violation,
        witnesses=witnesses,
        config={
            "tol": tol,
            "seed": seed,
            "num_inputs": num_inputs,
            "class_orders": [k.order for k in conj_class],
            "mode": basis.mode,
            "rank": basis.rank,
        },
    )


# ---------------------------------------------------------------------------
# export / reload


def _format_float(v: float) -> str:
    return f"{v:.17g}"


def export_basis(basis: WeightBasis, outdir, group_spec: dict, rep_kinds: tuple[str, str]):
    """Write one CSV per basis matrix plus a JSON manifest."""
    os.makedirs(outdir, exist_ok=True)
    files = []
    for i, w in enumerate(basis.matrices):
        fname = f"basis_{i:03d}.csv"
        files.append(fname)
        with open(os.path.join(outdir, fname), "w") as fh:
            for row in w:
                fh.write(",".join(_format_float(v) for v in row) + "\n")
    group = basis.system.rep_in.group
    k = basis.system.subgroup_k
    manifest = {
        "mode": basis.mode,
        "rank": basis.rank,
        "dims": list(basis.shape),
        "null_threshold": basis.null_threshold,
        "max_residual": basis.max_residual,
        "group": group_spec,
        "rep_in": rep_kinds[0],
        "rep_out": rep_kinds[1],
        "k_generators": None
        if k is None
        else [list(group.elements[g].perm) for g in k.generating_set()],
        "coset_representatives": [
            list(group.elements[b.rep_element].perm) for b in basis.system.blocks
        ],
        "basis_files": files,
    }
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def _rep_from_kind(group: FiniteGroup, kind: str) -> Representation:
    if kind == "permutation":
        return permutation_rep(group)
    if kind == "regular":
        return regular_rep(group)
    raise DataFormatError(f"cannot rebuild representation of kind {kind!r} from a manifest")


def load_basis(indir, group: FiniteGroup | None = None) -> WeightBasis:
    """Rebuild a WeightBasis from an export directory and re-verify residuals.

    Pass `group` to share one FiniteGroup instance across several reloads
    (layers of one network); otherwise the manifest's descriptor is rebuilt.
    """
    from .groups import construct_group

    path = os.path.join(indir, "manifest.json")
    try:
        with open(path) as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataFormatError(f"unreadable manifest at {path}: {exc}") from exc

    if group is None:
        group = construct_group(manifest["group"])
    rep_in = _rep_from_kind(group, manifest["rep_in"])
    rep_out = _rep_from_kind(group, manifest["rep_out"])
    if manifest["mode"] == "standard":
        system = build_standard(rep_in, rep_out)
    else:
        gens = [group.index_of(tuple(p)) for p in manifest["k_generators"]]
        system = build_relaxed(rep_in, rep_out, subgroup_generate(group, gens))

    m, n = manifest["dims"]
    mats = []
    for fname in manifest["basis_files"]:
        try:
            rows = []
            with open(os.path.join(indir, fname)) as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        rows.append([float(v) for v in line.split(",")])
            w = np.array(rows)
        except (OSError, ValueError) as exc:
            raise DataFormatError(f"corrupted basis CSV {fname}: {exc}") from exc
        if w.shape != (m, n):
            raise DataFormatError(f"basis CSV {fname} has shape {w.shape}, expected {(m, n)}")
        mats.append(w)
    mats = np.stack(mats) if mats else np.zeros((0, m, n))

    worst = max((system.residual(w) for w in mats), default=0.0)
    if worst > RESIDUAL_TOL:
        raise DataFormatError(
            f"reloaded basis violates its constraint system: residual {worst:.3e}"
        )
    return WeightBasis(
        matrices=mats,
        mode=manifest["mode"],
        system=system,
        null_threshold=manifest["null_threshold"],
        max_residual=worst,
        singular_values=None,
    )
