import numpy as np
import pytest
import torch
from hamcrest import assert_that, close_to

from polarkern.agent.encoding import encode_state, input_size
from polarkern.agent.network import Batch, NetworkConfig, PolicyValueNet, masked_log_softmax
from polarkern.agent.replay import ReplayBuffer, Sample
from polarkern.metrics import target_pdp
from polarkern.search.environment import env_reset, env_step


def make_batch(rng, size=5, input_dim=6, n_actions=4):
    masks = rng.random((size, n_actions)) < 0.7
    masks[:, 0] = True
    policies = np.where(masks, rng.random((size, n_actions)), 0.0)
    policies /= policies.sum(axis=1, keepdims=True)
    return Batch(
        inputs=rng.normal(size=(size, input_dim)),
        masks=masks,
        policies=policies,
        returns=rng.uniform(-1, 1, size=size),
    )


def tiny_config(**overrides):
    return NetworkConfig(input_size=6, n_actions=4, hidden=(5, 3), seed=0, **overrides)


@pytest.fixture
def tiny_net():
    return PolicyValueNet(tiny_config())


def test_masked_log_softmax():
    log_policy = masked_log_softmax(torch.tensor([[1.0, 2.0, 3.0]]), torch.tensor([[True, False, True]]))
    assert log_policy[0, 1] == float("-inf")
    expected = np.exp([1.0, 3.0]) / np.exp([1.0, 3.0]).sum()
    np.testing.assert_allclose(log_policy[0, [0, 2]].exp().numpy(), expected, rtol=1e-6)


def test_seeded_networks_are_identical():
    batch = make_batch(np.random.default_rng(0))
    assert PolicyValueNet(tiny_config()).loss(batch) == PolicyValueNet(tiny_config()).loss(batch)


def test_loss_at_matching_policy(tiny_net):
    batch = make_batch(np.random.default_rng(2))
    with torch.no_grad():
        log_policy, value = tiny_net(torch.as_tensor(batch.inputs, dtype=torch.float32), torch.as_tensor(batch.masks))
    policies = np.where(batch.masks, log_policy.exp().double().numpy(), 0.0)
    batch = batch._replace(policies=policies, returns=value.double().numpy())

    safe = np.where(policies > 0, policies, 1.0)
    entropy = -np.sum(policies * np.log(safe), axis=1)
    assert_that(tiny_net.loss(batch, l2=0.0), close_to(float(entropy.mean()), 1e-5))


def test_regularization_is_linear_in_l2(tiny_net):
    single = float(tiny_net.regularization(0.01))
    assert_that(float(tiny_net.regularization(0.02)), close_to(2 * single, 1e-6))
    batch = make_batch(np.random.default_rng(3))
    penalty = tiny_net.loss(batch, l2=0.01) - tiny_net.loss(batch, l2=0.0)
    assert_that(penalty, close_to(single, 1e-5))


def test_first_step_is_plain_gradient_descent(tiny_net):
    batch = make_batch(np.random.default_rng(4))
    before = [parameter.detach().clone() for parameter in tiny_net.parameters()]
    tiny_net.optimizer.zero_grad()
    tiny_net._loss(batch).backward()
    gradients = [parameter.grad.detach().clone() for parameter in tiny_net.parameters()]

    tiny_net.train_step(batch)
    for old, gradient, new in zip(before, gradients, tiny_net.parameters()):
        torch.testing.assert_close(new.detach(), old - tiny_net.config.learning_rate * gradient)


def test_training_reduces_loss():
    net = PolicyValueNet(NetworkConfig(input_size=6, n_actions=4, hidden=(16,), learning_rate=0.05, seed=4))
    batch = make_batch(np.random.default_rng(5), size=16)
    first = net.train_step(batch)
    for _ in range(200):
        last = net.train_step(batch)
    assert last < first


def test_illegal_targets_do_not_produce_nan(tiny_net):
    batch = make_batch(np.random.default_rng(6))
    assert np.isfinite(tiny_net.train_step(batch))
    assert all(torch.isfinite(parameter).all() for parameter in tiny_net.parameters())


def test_evaluate_masks_illegal_actions(tiny_net):
    logits, value = tiny_net.evaluate(np.ones(6), np.array([True, False, True, False]))
    assert np.isneginf(logits[[1, 3]]).all()
    assert np.isfinite(logits[[0, 2]]).all()
    assert_that(float(np.exp(logits[[0, 2]]).sum()), close_to(1.0, 1e-6))
    assert -1.0 < value < 1.0


def test_save_and_load(tiny_net, tmp_path):
    path = tmp_path / "net.pt"
    tiny_net.save(path)
    loaded = PolicyValueNet.load(path)
    assert loaded.config == tiny_net.config
    batch = make_batch(np.random.default_rng(7))
    assert loaded.loss(batch) == tiny_net.loss(batch)


def test_load_rejects_other_versions(tiny_net, tmp_path):
    path = tmp_path / "net.pt"
    torch.save({"version": 99, "config": {}, "state_dict": tiny_net.state_dict()}, path)
    with pytest.raises(AssertionError, match="Unsupported checkpoint version"):
        PolicyValueNet.load(path)


@pytest.mark.parametrize("field, value", [("hidden", ()), ("momentum", 1.0), ("learning_rate", 0.0)])
def test_invalid_network_config(field, value):
    with pytest.raises(AssertionError):
        NetworkConfig(input_size=6, n_actions=4, **{field: value})


def test_state_encoding():
    state = env_reset(4, target_pdp(4))
    state, _, _ = env_step(state, 1)
    encoding = encode_state(state, ell_max=8)

    assert encoding.grid.shape == (8, 8)
    assert encoding.grid[3].tolist() == [0, 1, 0, 0, 0, 0, 0, 0]
    assert encoding.grid.sum() == 1
    assert np.flatnonzero(encoding.row_onehot).tolist() == [3]
    assert encoding.size_scalar == 0.5

    flat = encoding.flatten()
    assert flat.shape == (input_size(8),) == (73,)
    assert flat.dtype == np.float32


def test_replay_buffer_drops_oldest():
    buffer = ReplayBuffer(capacity=3)
    buffer.extend(
        Sample(np.full(2, index, dtype=float), np.ones(2, bool), np.array([0.5, 0.5]), index)
        for index in range(5)
    )
    assert len(buffer) == 3
    batch = buffer.sample_batch(10, np.random.default_rng(0))
    assert batch.inputs.shape == (3, 2)
    assert set(batch.returns) <= {2.0, 3.0, 4.0}
