"""Multilayer perceptrons built from solved weight bases.

Trainable parameters are the basis coefficients (and optionally bias
coordinates inside the output-side fixed subspace), never raw matrix
entries, so every network stays inside its certified constraint subspace by
construction.  Gradients are exact reverse-mode over those parameters and
training is plain full-batch gradient descent for bit-reproducibility.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError, DivergenceError, GroupMismatchError
from .groups import whole_group
from .solver import WeightBasis, assemble_weight, export_basis, load_basis
from .symmetry import FixedSubspace, fixed_subspace

_BIAS_FIX_TOL = 1e-9


def _relu(z):
    return np.maximum(z, 0.0)


def _relu_grad(z):
    return (z > 0).astype(np.float64)   # subgradient 0 at z == 0


ACTIVATIONS = {
    "relu": (_relu, _relu_grad),
    "identity": (lambda z: z, lambda z: np.ones_like(z)),
    "tanh": (np.tanh, lambda z: 1.0 - np.tanh(z) ** 2),
}


@dataclass
class TrainConfig:
    learning_rate: float
    steps: int
    seed: int
    loss: str = "mse"

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.loss != "mse":
            raise ValueError(f"unsupported loss {self.loss!r}")


@dataclass
class LayerSpec:
    """One linear layer: W = sum coeffs[i] * basis[i], optional constrained bias."""

    basis: WeightBasis
    coeffs: np.ndarray
    activation: str = "identity"
    bias_subspace: FixedSubspace = None
    bias_coords: np.ndarray = None

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=np.float64)
        if self.coeffs.shape != (self.basis.rank,):
            raise ValueError(f"need {self.basis.rank} coefficients, got {self.coeffs.shape}")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if (self.bias_subspace is None) != (self.bias_coords is None):
            raise ValueError("bias_subspace and bias_coords must be supplied together")
        if self.bias_coords is not None:
            self.bias_coords = np.asarray(self.bias_coords, dtype=np.float64)
            if self.bias_coords.shape != (self.bias_subspace.dim,):
                raise ValueError("bias coordinate length does not match its subspace")
            rep_out = self.basis.system.rep_out
            b = self.bias
            for h in self.bias_subspace.subgroup.member_indices:
                if np.linalg.norm(rep_out.matrices[h] @ b - b) > _BIAS_FIX_TOL * max(
                    1.0, float(np.linalg.norm(b))
                ):
                    raise ValueError("bias leaves the constraint-subgroup fixed subspace")

    @property
    def weight(self) -> np.ndarray:
        return assemble_weight(self.basis, self.coeffs)

    @property
    def bias(self) -> np.ndarray:
        if self.bias_coords is None:
            return np.zeros(self.basis.shape[0])
        return self.bias_subspace.basis @ self.bias_coords

    @property
    def dim_in(self) -> int:
        return self.basis.shape[1]

    @property
    def dim_out(self) -> int:
        return self.basis.shape[0]

    def copy(self) -> "LayerSpec":
        return LayerSpec(
            basis=self.basis,
            coeffs=self.coeffs.copy(),
            activation=self.activation,
            bias_subspace=self.bias_subspace,
            bias_coords=None if self.bias_coords is None else self.bias_coords.copy(),
        )


def make_layer(basis: WeightBasis, coeffs=None, activation: str = "identity",
               with_bias: bool = False) -> LayerSpec:
    """Layer with zero-initialized parameters; bias lives in the fixed
    subspace of the output representation under the layer's constraint
    subgroup (the whole group for standard-mode bases)."""
    coeffs = np.zeros(basis.rank) if coeffs is None else coeffs
    bias_sub = None
    bias_coords = None
    if with_bias:
        k = basis.system.subgroup_k
        if k is None:
            k = whole_group(basis.system.rep_out.group)
        bias_sub = fixed_subspace(basis.system.rep_out, k)
        bias_coords = np.zeros(bias_sub.dim)
    return LayerSpec(basis=basis, coeffs=coeffs, activation=activation,
                     bias_subspace=bias_sub, bias_coords=bias_coords)


@dataclass
class Network:
    layers: list

    def __post_init__(self):
        if self.layers:
            group = self.layers[0].basis.system.rep_in.group
            for prev, nxt in zip(self.layers, self.layers[1:]):
                if nxt.dim_in != prev.dim_out:
                    raise ValueError(
                        f"layer dims do not chain: {prev.dim_out} -> {nxt.dim_in}"
                    )
            for layer in self.layers:
                if layer.basis.system.rep_in.group is not group:
                    raise GroupMismatchError("all layers must share one group")

    @property
    def dim_in(self):
        return self.layers[0].dim_in if self.layers else None

    @property
    def dim_out(self):
        return self.layers[-1].dim_out if self.layers else None

    def copy(self) -> "Network":
        return Network([layer.copy() for layer in self.layers])


def forward(net: Network, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if net.layers and x.shape != (net.dim_in,):
        raise ValueError(f"input has shape {x.shape}, network expects ({net.dim_in},)")
    out = x
    for layer in net.layers:
        act, _ = ACTIVATIONS[layer.activation]
        out = act(layer.weight @ out + layer.bias)
    return out


def _forward_trace(net: Network, xs: np.ndarray):
    """Batched forward keeping pre-activations for the backward pass."""
    acts = [xs]
    pres = []
    for layer in net.layers:
        act, _ = ACTIVATIONS[layer.activation]
        z = acts[-1] @ layer.weight.T + layer.bias
        pres.append(z)
        acts.append(act(z))
    return pres, acts


def loss_mse(net: Network, xs, ys) -> float:
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    ys = np.atleast_2d(np.asarray(ys, dtype=np.float64))
    _, acts = _forward_trace(net, xs)
    diff = acts[-1] - ys
    return float(np.mean(np.sum(diff * diff, axis=1)))


def gradient(net: Network, xs, ys):
    """Exact reverse-mode gradients of the batch-mean squared error.

    Returns one (coeff_grad, bias_coord_grad_or_None) pair per layer.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=np.float64))
    ys = np.atleast_2d(np.asarray(ys, dtype=np.float64))
    if xs.shape[0] != ys.shape[0]:
        raise ValueError("batch sizes differ")
    pres, acts = _forward_trace(net, xs)
    batch = xs.shape[0]
    d_act = 2.0 * (acts[-1] - ys) / batch
    grads = [None] * len(net.layers)
    for l in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[l]
        _, dact = ACTIVATIONS[layer.activation]
        dz = d_act * dact(pres[l])
        dw = dz.T @ acts[l]
        coeff_grad = np.tensordot(layer.basis.matrices, dw, axes=([1, 2], [0, 1]))
        bias_grad = None
        if layer.bias_coords is not None:
            bias_grad = layer.bias_subspace.basis.T @ dz.sum(axis=0)
        grads[l] = (coeff_grad, bias_grad)
        d_act = dz @ layer.weight
    return grads


def train(net: Network, xs, ys, cfg: TrainConfig, reinit: bool = True):
    """Full-batch gradient descent; returns (trained copy, per-step loss trace).

    With reinit=True all parameters are redrawn from cfg.seed first, making
    the whole trace a deterministic function of (architecture, data, cfg).
    """
    net = net.copy()
    if reinit:
        rng = np.random.default_rng(cfg.seed)
        for layer in net.layers:
            layer.coeffs = 0.1 * rng.standard_normal(layer.basis.rank)
            if layer.bias_coords is not None:
                layer.bias_coords = 0.1 * rng.standard_normal(layer.bias_subspace.dim)
    trace = [loss_mse(net, xs, ys)]
    with np.errstate(over="ignore", invalid="ignore"):   # divergence is detected below
        for _ in range(cfg.steps):
            grads = gradient(net, xs, ys)
            for layer, (cg, bg) in zip(net.layers, grads):
                layer.coeffs = layer.coeffs - cfg.learning_rate * cg
                if bg is not None:
                    layer.bias_coords = layer.bias_coords - cfg.learning_rate * bg
            step_loss = loss_mse(net, xs, ys)
            if not np.isfinite(step_loss):
                raise DivergenceError(f"loss became non-finite after {len(trace)} steps")
            trace.append(step_loss)
    return net, np.array(trace)


def noise_inject_forward(net: Network, x, sigma: float, seed: int) -> np.ndarray:
    """Forward pass on x + sigma * Gaussian noise: the symmetry-breaking
    baseline that perturbs inputs onto regular orbits."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    x = np.asarray(x, dtype=np.float64)
    noise = np.random.default_rng(seed).standard_normal(x.shape)
    return forward(net, x + sigma * noise)


# ---------------------------------------------------------------------------
# checkpoints


def save_network(net: Network, outdir, group_spec: dict):
    """JSON manifest plus one subdirectory per layer (basis export + params CSV)."""
    os.makedirs(outdir, exist_ok=True)
    layer_entries = []
    for i, layer in enumerate(net.layers):
        sub = f"layer_{i:03d}"
        rep_kinds = (layer.basis.system.rep_in.kind, layer.basis.system.rep_out.kind)
        export_basis(layer.basis, os.path.join(outdir, sub), group_spec, rep_kinds)
        with open(os.path.join(outdir, sub, "params.csv"), "w") as fh:
            fh.write(",".join(f"{v:.17g}" for v in layer.coeffs) + "\n")
            if layer.bias_coords is not None:
                fh.write(",".join(f"{v:.17g}" for v in layer.bias_coords) + "\n")
        layer_entries.append(
            {
                "dir": sub,
                "activation": layer.activation,
                "dims": [layer.dim_out, layer.dim_in],
                "with_bias": layer.bias_coords is not None,
            }
        )
    manifest = {"group": group_spec, "layers": layer_entries}
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def load_network(indir) -> Network:
    path = os.path.join(indir, "manifest.json")
    try:
        with open(path) as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DataFormatError(f"unreadable network manifest at {path}: {exc}") from exc
    from .groups import construct_group

    group = construct_group(manifest["group"])
    layers = []
    for entry in manifest["layers"]:
        basis = load_basis(os.path.join(indir, entry["dir"]), group=group)
        params_path = os.path.join(indir, entry["dir"], "params.csv")

        def _parse_row(row: str) -> np.ndarray:
            return np.array([float(v) for v in row.split(",")]) if row else np.zeros(0)

        try:
            with open(params_path) as fh:
                rows = fh.read().splitlines()
            coeffs = _parse_row(rows[0]) if rows else np.zeros(0)
        except (OSError, ValueError) as exc:
            raise DataFormatError(f"corrupted params CSV {params_path}: {exc}") from exc
        layer = make_layer(basis, coeffs=coeffs, activation=entry["activation"],
                           with_bias=entry["with_bias"])
        if entry["with_bias"]:
            if len(rows) < 2:
                raise DataFormatError(f"{params_path} is missing the bias row")
            layer.bias_coords = _parse_row(rows[1])
        layers.append(layer)
    return Network(layers)
