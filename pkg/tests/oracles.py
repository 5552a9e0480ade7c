"""Independent brute-force oracles used to cross-check the solver and
gradients.  Deliberately different from the implementation: row-major
vectorization, per-ELEMENT constraint stacking (never generators), matrices
built by applying the operator to unit matrices, and scipy's null_space.
"""

import numpy as np
import scipy.linalg

from symbreak.groups import left_cosets
from symbreak.network import Network, loss_mse
from symbreak.symmetry import fixed_subspace


def _operator_matrix(apply_fn, m, n):
    """Matrix of W |-> apply_fn(W) in the row-major flattening, one unit
    matrix at a time."""
    cols = []
    for i in range(m):
        for j in range(n):
            unit = np.zeros((m, n))
            unit[i, j] = 1.0
            cols.append(apply_fn(unit).reshape(-1))
    return np.array(cols).T


def oracle_standard_nullspace(rep_in, rep_out):
    """Null space of rho'(g) W - W rho(g) = 0 stacked over ALL elements."""
    m, n = rep_out.dim, rep_in.dim
    rows = [
        _operator_matrix(
            lambda w, g=g: rep_out.matrices[g] @ w - w @ rep_in.matrices[g], m, n
        )
        for g in range(rep_in.group.order)
    ]
    ns = scipy.linalg.null_space(np.vstack(rows))
    mats = [v.reshape(m, n) for v in ns.T]
    return ns.shape[1], mats


def oracle_relaxed_nullspace(rep_in, rep_out, k):
    """Null space of (W - rho'(g)^T W rho(g)) P over non-identity coset reps."""
    m, n = rep_out.dim, rep_in.dim
    proj = fixed_subspace(rep_in, k).projector
    reps = left_cosets(rep_in.group, k).representatives[1:]
    if not reps:
        units = []
        for i in range(m):
            for j in range(n):
                u = np.zeros((m, n))
                u[i, j] = 1.0
                units.append(u)
        return m * n, units
    rows = [
        _operator_matrix(
            lambda w, g=g: (w - rep_out.matrices[g].T @ w @ rep_in.matrices[g]) @ proj, m, n
        )
        for g in reps
    ]
    ns = scipy.linalg.null_space(np.vstack(rows))
    mats = [v.reshape(m, n) for v in ns.T]
    return ns.shape[1], mats


def matrix_span_projector(mats):
    """Projector onto span of matrices, in a shared (row-major) flattening,
    so bases from different vectorization conventions can be compared."""
    if len(mats) == 0:
        return None
    vecs = np.stack([np.asarray(w).reshape(-1) for w in mats])
    q, _ = np.linalg.qr(vecs.T)
    q = q[:, : np.linalg.matrix_rank(vecs)]
    return q @ q.T


def finite_difference_grads(net: Network, xs, ys, h=1e-6):
    """Central-difference gradients over every trainable parameter."""
    grads = []
    for layer in net.layers:
        cg = np.zeros_like(layer.coeffs)
        for i in range(len(layer.coeffs)):
            orig = layer.coeffs[i]
            layer.coeffs[i] = orig + h
            up = loss_mse(net, xs, ys)
            layer.coeffs[i] = orig - h
            down = loss_mse(net, xs, ys)
            layer.coeffs[i] = orig
            cg[i] = (up - down) / (2 * h)
        bg = None
        if layer.bias_coords is not None:
            bg = np.zeros_like(layer.bias_coords)
            for i in range(len(layer.bias_coords)):
                orig = layer.bias_coords[i]
                layer.bias_coords[i] = orig + h
                up = loss_mse(net, xs, ys)
                layer.bias_coords[i] = orig - h
                down = loss_mse(net, xs, ys)
                layer.bias_coords[i] = orig
                bg[i] = (up - down) / (2 * h)
        grads.append((cg, bg))
    return grads
