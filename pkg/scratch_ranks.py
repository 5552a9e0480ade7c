"""Dev scratch: compute solved ranks + independent oracle, check monotonicity."""
import numpy as np
import scipy.linalg

from symbreak.fixtures import FixtureSet, sub_from_perms, D4_R90, D4_R180, D4_DIAG, D4_EDGE
from symbreak.groups import left_cosets, trivial_subgroup, whole_group
from symbreak.solver import build_relaxed, build_standard, solve_basis, span_projector
from symbreak.symmetry import fixed_subspace


def oracle_standard_rank(rep_in, rep_out):
    """Row-major vec, per-ELEMENT constraints rho'(g) W - W rho(g) = 0, scipy null space."""
    m, n = rep_out.dim, rep_in.dim
    rows = []
    for g in range(rep_in.group.order):
        A, B = rep_out.matrices[g], rep_in.matrices[g]
        block = np.zeros((m * n, m * n))
        for i in range(m):
            for j in range(n):
                E = np.zeros((m, n)); E[i, j] = 1.0
                block[:, i * n + j] = (A @ E - E @ B).reshape(-1)   # row-major
        rows.append(block)
    ns = scipy.linalg.null_space(np.vstack(rows))
    return ns.shape[1], ns


def oracle_relaxed_rank(rep_in, rep_out, k):
    """Same idea for the coset constraints (W - rho'(g)^T W rho(g)) P = 0."""
    m, n = rep_out.dim, rep_in.dim
    P = fixed_subspace(rep_in, k).projector
    reps = left_cosets(rep_in.group, k).representatives[1:]
    rows = []
    for g in reps:
        A, B = rep_out.matrices[g], rep_in.matrices[g]
        block = np.zeros((m * n, m * n))
        for i in range(m):
            for j in range(n):
                E = np.zeros((m, n)); E[i, j] = 1.0
                block[:, i * n + j] = ((E - A.T @ E @ B) @ P).reshape(-1)
        rows.append(block)
    if not rows:
        return m * n, None
    ns = scipy.linalg.null_space(np.vstack(rows))
    return ns.shape[1], ns


fx = FixtureSet()

print("== standard ranks (impl vs oracle)")
for name, rep in [("z2", fx.z2_rep), ("s3", fx.s3_rep), ("d4", fx.d4_rep), ("z4", fx.z4_rep)]:
    b = solve_basis(build_standard(rep, rep))
    r_o, _ = oracle_standard_rank(rep, rep)
    print(f"{name}: impl={b.rank} oracle={r_o}")

print("== relaxed ranks d4")
subs = {
    "trivial": trivial_subgroup(fx.d4),
    "center<r2>": fx.d4_center,
    "diag<d0>": fx.d4_diag,
    "edge<h>": fx.d4_edge,
    "rot<r>": fx.d4_rot,
    "kdiag": fx.d4_kdiag,
    "kedge": fx.d4_kedge,
    "whole": whole_group(fx.d4),
}
ranks = {}
for name, sub in subs.items():
    b = solve_basis(build_relaxed(fx.d4_rep, fx.d4_rep, sub))
    r_o, _ = oracle_relaxed_rank(fx.d4_rep, fx.d4_rep, sub)
    ranks[name] = b.rank
    print(f"{name} (|K|={sub.order}): impl={b.rank} oracle={r_o} blocks={len(b.system.blocks)}")

print("== relaxed ranks s3")
s3_subs = {
    "trivial": trivial_subgroup(fx.s3),
    "swap": fx.s3_swap,
    "alt": fx.s3_alt,
    "whole": whole_group(fx.s3),
}
for name, sub in s3_subs.items():
    b = solve_basis(build_relaxed(fx.s3_rep, fx.s3_rep, sub))
    r_o, _ = oracle_relaxed_rank(fx.s3_rep, fx.s3_rep, sub)
    print(f"{name} (|K|={sub.order}): impl={b.rank} oracle={r_o} blocks={len(b.system.blocks)}")

print("== relaxed ranks z4")
z4_subs = {
    "trivial": trivial_subgroup(fx.z4),
    "half": sub_from_perms(fx.z4, [(2, 3, 0, 1)]),
    "whole": whole_group(fx.z4),
}
for name, sub in z4_subs.items():
    b = solve_basis(build_relaxed(fx.z4_rep, fx.z4_rep, sub))
    r_o, _ = oracle_relaxed_rank(fx.z4_rep, fx.z4_rep, sub)
    print(f"{name} (|K|={sub.order}): impl={b.rank} oracle={r_o}")

print("== monotonicity chains")
chains = [
    ("d4", fx.d4_rep, [trivial_subgroup(fx.d4), fx.d4_center, fx.d4_rot, whole_group(fx.d4)]),
    ("d4b", fx.d4_rep, [trivial_subgroup(fx.d4), fx.d4_diag, fx.d4_kdiag, whole_group(fx.d4)]),
    ("d4c", fx.d4_rep, [trivial_subgroup(fx.d4), fx.d4_edge, fx.d4_kedge, whole_group(fx.d4)]),
    ("s3", fx.s3_rep, [trivial_subgroup(fx.s3), fx.s3_swap, whole_group(fx.s3)]),
    ("s3b", fx.s3_rep, [trivial_subgroup(fx.s3), fx.s3_alt, whole_group(fx.s3)]),
    ("z4", fx.z4_rep, [trivial_subgroup(fx.z4), sub_from_perms(fx.z4, [(2, 3, 0, 1)]),
                       whole_group(fx.z4)]),
]
for name, rep, chain in chains:
    rs = [solve_basis(build_relaxed(rep, rep, k)).rank for k in chain]
    mono = all(a <= b for a, b in zip(rs, rs[1:]))
    print(f"{name}: ranks={rs} monotone={mono}")

print("== relaxed trivial-K equals standard subspace")
for name, rep, group in [("z2", fx.z2_rep, fx.z2), ("s3", fx.s3_rep, fx.s3), ("d4", fx.d4_rep, fx.d4)]:
    std = solve_basis(build_standard(rep, rep))
    rel = solve_basis(build_relaxed(rep, rep, trivial_subgroup(group)))
    d = np.linalg.norm(span_projector(std) - span_projector(rel))
    print(f"{name}: |proj diff|={d:.2e} r_std={std.rank} r_rel={rel.rank}")
