import numpy as np
import pytest

from oracles import finite_difference_grads
from symbreak.errors import DataFormatError, DivergenceError
from symbreak.groups import whole_group
from symbreak.network import (
    ACTIVATIONS,
    Network,
    TrainConfig,
    forward,
    gradient,
    load_network,
    loss_mse,
    make_layer,
    noise_inject_forward,
    save_network,
    train,
)
from symbreak.solver import assemble_weight
from symbreak.symmetry import fixed_subspace, stabilizer


def coeffs_for(basis, target):
    """Frobenius projection of the target onto the (orthonormal) basis."""
    return np.array([np.sum(b * target) for b in basis.matrices])


def test_forward_zero_layers_is_identity():
    net = Network([])
    x = np.array([1.0, -2.0, 3.0])
    assert np.array_equal(forward(net, x), x)


def test_forward_zero_coeffs_is_zero(fx):
    net = Network([make_layer(fx.d4_std)])
    assert np.array_equal(forward(net, np.ones(4)), np.zeros(4))


def test_forward_z2_hand_computed(fx):
    w_target = np.array([[1.0, 2.0], [2.0, 1.0]])     # inside the solved span
    layer = make_layer(fx.z2_std, coeffs=coeffs_for(fx.z2_std, w_target))
    net = Network([layer])
    assert np.allclose(forward(net, np.array([1.0, 0.0])), np.array([1.0, 2.0]), atol=1e-12)


def test_forward_dimension_mismatch(fx):
    net = Network([make_layer(fx.z2_std)])
    with pytest.raises(ValueError):
        forward(net, np.ones(3))


def test_network_dim_chain_validated(fx):
    with pytest.raises(ValueError):
        Network([make_layer(fx.z2_std), make_layer(fx.d4_std)])


def test_gradient_closed_form_linear_layer(fx):
    rng = np.random.default_rng(0)
    layer = make_layer(fx.s3_std, coeffs=rng.standard_normal(2))
    net = Network([layer])
    xs = rng.standard_normal((6, 3))
    ys = rng.standard_normal((6, 3))
    (cg, bg), = gradient(net, xs, ys)
    assert bg is None
    w = layer.weight
    for i, b in enumerate(fx.s3_std.matrices):
        expected = np.mean([2.0 * (w @ x - y) @ (b @ x) for x, y in zip(xs, ys)])
        assert abs(cg[i] - expected) <= 1e-12


def test_gradient_zero_residual_batch(fx):
    rng = np.random.default_rng(1)
    layer = make_layer(fx.s3_std, coeffs=rng.standard_normal(2))
    net = Network([layer])
    xs = rng.standard_normal((4, 3))
    ys = xs @ layer.weight.T
    (cg, _), = gradient(net, xs, ys)
    assert np.linalg.norm(cg) <= 1e-12


@pytest.mark.parametrize("architecture", [
    ("z2", ["identity"], False),
    ("s3", ["relu"], True),
    ("d4_rel", ["tanh"], True),
    ("d4_two", ["relu", "identity"], False),
])
def test_gradient_matches_finite_differences(fx, architecture):
    name, activations, with_bias = architecture
    bases = {
        "z2": [fx.z2_std],
        "s3": [fx.s3_std],
        "d4_rel": [fx.d4_rel_kdiag],
        "d4_two": [fx.d4_std, fx.d4_rel_rot],
    }[name]
    rng = np.random.default_rng(42)
    layers = [
        make_layer(basis, coeffs=0.7 * rng.standard_normal(basis.rank),
                   activation=act, with_bias=with_bias)
        for basis, act in zip(bases, activations)
    ]
    for layer in layers:
        if layer.bias_coords is not None:
            layer.bias_coords = 0.3 * rng.standard_normal(layer.bias_subspace.dim)
    net = Network(layers)
    xs = rng.standard_normal((5, net.dim_in))
    ys = rng.standard_normal((5, net.dim_out))
    got = gradient(net, xs, ys)
    want = finite_difference_grads(net, xs, ys, h=1e-6)
    for (cg, bg), (cf, bf) in zip(got, want):
        assert np.linalg.norm(cg - cf) <= 1e-5 * max(1.0, np.linalg.norm(cf))
        if bf is not None:
            assert np.linalg.norm(bg - bf) <= 1e-5 * max(1.0, np.linalg.norm(bf))


def test_train_zero_steps_returns_initial_loss(fx):
    net = Network([make_layer(fx.z2_std)])
    cfg = TrainConfig(learning_rate=0.1, steps=0, seed=3)
    _, trace = train(net, [np.ones(2)], [np.ones(2)], cfg)
    assert trace.shape == (1,)


def test_train_exact_fit_when_target_in_span(fx):
    rng = np.random.default_rng(5)
    w_true = assemble_weight(fx.s3_std, rng.standard_normal(2))
    xs = rng.standard_normal((8, 3))
    ys = xs @ w_true.T
    cfg = TrainConfig(learning_rate=0.05, steps=800, seed=5)
    _, trace = train(Network([make_layer(fx.s3_std)]), xs, ys, cfg)
    assert trace[-1] <= 1e-8


def test_train_curie_plateau_at_projection_distance(fx):
    """An equivariant net driven to a non-fixed target stalls at the squared
    distance between the target and the fixed subspace."""
    x0 = np.ones(4)
    target = np.array([1.0, 0.0, 0.0, 0.0])
    proj = fixed_subspace(fx.d4_rep, whole_group(fx.d4)).projector
    bound = float(np.sum((target - proj @ target) ** 2))
    cfg = TrainConfig(learning_rate=0.1, steps=1500, seed=0)
    _, trace = train(Network([make_layer(fx.d4_std)]), [x0], [target], cfg)
    assert abs(trace[-1] - bound) <= 1e-3
    assert abs(bound - 0.75) <= 1e-12


def test_train_divergence_raises(fx):
    cfg = TrainConfig(learning_rate=1e4, steps=200, seed=0)
    with pytest.raises(DivergenceError):
        train(Network([make_layer(fx.z2_std)]), [np.ones(2)], [np.zeros(2)], cfg)


def test_train_deterministic_bit_identical(fx):
    xs = [np.array([1.0, 1.0, 0.0, 0.0])]
    ys = [np.array([0.0, 1.0, 0.0, 1.0])]
    cfg = TrainConfig(learning_rate=0.05, steps=50, seed=9)
    _, t1 = train(Network([make_layer(fx.d4_rel_kdiag)]), xs, ys, cfg)
    _, t2 = train(Network([make_layer(fx.d4_rel_kdiag)]), xs, ys, cfg)
    assert np.array_equal(t1, t2)


def test_train_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.0, steps=1, seed=0)
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.1, steps=-1, seed=0)
    with pytest.raises(ValueError):
        TrainConfig(learning_rate=0.1, steps=1, seed=0, loss="mae")


def test_bias_stays_in_fixed_subspace(fx):
    layer = make_layer(fx.d4_rel_kdiag, with_bias=True)
    rng = np.random.default_rng(2)
    layer.bias_coords = rng.standard_normal(layer.bias_subspace.dim)
    b = layer.bias
    for h in fx.d4_kdiag.member_indices:
        assert np.linalg.norm(fx.d4_rep.matrices[h] @ b - b) <= 1e-9


def test_standard_layer_bias_is_group_fixed(fx):
    layer = make_layer(fx.d4_std, with_bias=True)
    layer.bias_coords = np.array([1.3])    # fixed subspace of D4 is one-dimensional
    b = layer.bias
    for g in range(fx.d4.order):
        assert np.linalg.norm(fx.d4_rep.matrices[g] @ b - b) <= 1e-9


def test_layer_coeff_length_validated(fx):
    with pytest.raises(ValueError):
        make_layer(fx.z2_std, coeffs=np.zeros(5))


def test_pointwise_activations_commute_with_permutations(fx):
    rng = np.random.default_rng(8)
    for name in ["relu", "tanh"]:
        act, _ = ACTIVATIONS[name]
        for _ in range(20):
            x = rng.standard_normal(4)
            for g in range(fx.d4.order):
                lhs = fx.d4_rep.matrices[g] @ act(x)
                rhs = act(fx.d4_rep.matrices[g] @ x)
                assert np.array_equal(lhs, rhs)


def test_noise_inject_sigma_zero_equals_forward(fx):
    net = Network([make_layer(fx.z2_std, coeffs=np.array([1.0, 0.5]))])
    x = np.array([3.0, 3.0])
    assert np.array_equal(noise_inject_forward(net, x, 0.0, seed=1), forward(net, x))


def test_noise_inject_breaks_symmetry_almost_surely(fx):
    net = Network([make_layer(fx.z2_std, coeffs=np.array([1.0, 0.5]))])
    x = np.array([3.0, 3.0])
    for seed in range(10):
        out = noise_inject_forward(net, x, 0.1, seed=seed)
        assert stabilizer(fx.z2_rep, out).order == 1


def test_noise_inject_rejects_negative_sigma(fx):
    net = Network([make_layer(fx.z2_std)])
    with pytest.raises(ValueError):
        noise_inject_forward(net, np.ones(2), -1.0, seed=0)


def test_checkpoint_roundtrip(fx, tmp_path):
    rng = np.random.default_rng(4)
    layers = [
        make_layer(fx.d4_std, coeffs=rng.standard_normal(3), activation="relu",
                   with_bias=True),
        make_layer(fx.d4_rel_rot, coeffs=rng.standard_normal(15), activation="identity"),
    ]
    layers[0].bias_coords = rng.standard_normal(layers[0].bias_subspace.dim)
    net = Network(layers)
    save_network(net, tmp_path / "ckpt", {"kind": "dihedral", "n": 4})
    reloaded = load_network(tmp_path / "ckpt")
    x = rng.standard_normal(4)
    assert np.array_equal(forward(net, x), forward(reloaded, x))


def test_checkpoint_rejects_corrupted_params(fx, tmp_path):
    net = Network([make_layer(fx.z2_std, coeffs=np.array([1.0, 2.0]))])
    save_network(net, tmp_path / "ckpt", {"kind": "cyclic", "n": 2})
    (tmp_path / "ckpt" / "layer_000" / "params.csv").write_text("oops,nan?\n")
    with pytest.raises(DataFormatError):
        load_network(tmp_path / "ckpt")
