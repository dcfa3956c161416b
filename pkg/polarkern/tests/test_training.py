import json

import numpy as np
import pandas as pd
import pytest
import torch

from polarkern.agent.network import PolicyValueNet
from polarkern.agent.training import Trainer, TrainingConfig, training_loop
from polarkern.metrics import is_kernel_valid, target_pdp
from polarkern.models.binmatrix import read_kernel
from polarkern.rmld import kernel_complexity
from polarkern.search.environment import InitMode


def small_config(**overrides):
    values = dict(
        sizes={4: 1.0},
        iterations=2,
        games=3,
        batch_size=8,
        updates_per_iteration=2,
        hidden=(16,),
        n_simulations=4,
        n_candidates=2,
        seed=1,
    )
    values.update(overrides)
    return TrainingConfig(**values)


def test_training_writes_outputs(tmp_path):
    config = small_config(init="bottom", bottom_rows=(3,))
    result = Trainer(config, out_dir=tmp_path, verbose=False).run()

    log = pd.read_csv(tmp_path / "training_log.csv")
    assert log.columns.tolist() == ["iteration", "min_return", "avg_return", "max_return", "best_complexity_l4"]
    assert log["iteration"].tolist() == [0, 1]
    assert (tmp_path / "checkpoint_0000.pt").exists()

    checkpoint = PolicyValueNet.load(tmp_path / "checkpoint_0001.pt")
    assert checkpoint.config == config.network_config()

    kernel = read_kernel(tmp_path / "best_kernel_l4.txt")
    assert kernel == result.best_kernels[4]
    assert is_kernel_valid(kernel, target_pdp(4))
    assert kernel_complexity(kernel).total == result.best_complexities[4]


def test_running_minimum_never_increases():
    result = training_loop(small_config(iterations=3))
    column = result.log["best_complexity_l4"].dropna()
    assert column.is_monotonic_decreasing
    assert len(result.log) == 3


def test_training_without_updates():
    trainer = Trainer(small_config(iterations=1, updates_per_iteration=0), verbose=False)
    before = {name: value.clone() for name, value in trainer.net.state_dict().items()}
    trainer.run()
    for name, value in trainer.net.state_dict().items():
        assert torch.equal(value, before[name])
    assert len(trainer.buffer) > 0


def test_config_from_file(tmp_path):
    path = tmp_path / "training.json"
    path.write_text(json.dumps({
        "sizes": {"16": 0.5, "8": 0.5},
        "hidden": [32],
        "reward": {"gamma": 1.0},
        "init": "bottom",
        "bottom_rows": [3, 4, 5],
    }))
    config = TrainingConfig.from_file(path, games=10)

    assert config.sizes == {16: 0.5, 8: 0.5}
    assert (config.hidden, config.games, config.ell_max) == ((32,), 10, 16)
    assert config.reward_config(8).gamma == 1.0
    initialization = config.initialization(16)
    assert initialization.mode == InitMode.BOTTOM_ROWS
    assert initialization.row_counts == (3, 4, 5)
    assert config.problem(8).n_actions == 16
    assert TrainingConfig(**{**config.__dict__}).to_json() == config.to_json()


@pytest.mark.parametrize(
    "overrides",
    [
        dict(init="warm"),
        dict(init="bottom"),
        dict(sizes={12: 1.0}, init="bottom", bottom_rows=(3,)),
        dict(bottom_file="bottom.txt"),
        dict(sizes={4: 0.5, 8: 0.5}, init="bottom", bottom_file="bottom.txt"),
        dict(sizes={16: 0.5}),
        dict(reward={"alpha": 1.0}),
        dict(iterations=0),
    ],
)
def test_invalid_training_config(overrides):
    with pytest.raises(AssertionError):
        small_config(**overrides)


def test_bottom_rows_from_a_kernel_file(tmp_path):
    path = tmp_path / "bottom.txt"
    path.write_text("1010\n1100\n1111\n")
    config = small_config(sizes={4: 1.0}, init="bottom", bottom_file=str(path))
    initialization = config.initialization(4)
    assert initialization.mode == InitMode.BOTTOM_ROWS
    assert initialization.bottom_rows.to_strings() == ["1010", "1100", "1111"]
    assert initialization.row_counts == ()
    assert config.to_json()["bottom_file"] == str(path)

    state = config.problem(4).initial_state(np.random.default_rng(0))
    assert state.k == 3 and state.current_row == 0


def test_unknown_keys_in_file(tmp_path):
    path = tmp_path / "training.json"
    path.write_text('{"epochs": 3}')
    with pytest.raises(AssertionError, match="Unknown TrainingConfig keys"):
        TrainingConfig.from_file(path)


@pytest.mark.slow
def test_training_finds_minimum_complexity_kernel_of_size_4():
    result = training_loop(small_config(iterations=20, games=200, updates_per_iteration=20, n_simulations=8))
    assert result.best_complexities[4] == 32
