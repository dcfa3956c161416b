import numpy as np
import pytest
from hamcrest import assert_that, close_to

from polarkern.exceptions import IllegalActionError, InvalidInitializationError
from polarkern.kernels import sorted_arikan_bottom
from polarkern.metrics import Pdp, is_kernel_valid, target_pdp
from polarkern.models.binmatrix import BinMatrix
from polarkern.models.episode import EpisodeOutcome
from polarkern.rmld import kernel_complexity
from polarkern.search.config import RewardConfig, calc_reward
from polarkern.search.environment import (
    InitMode,
    Initialization,
    env_reset,
    env_step,
    legal_actions,
    play_episode,
    row_is_reachable,
    uniform_policy,
)


def play(state, actions):
    rewards = []
    for action in actions:
        state, reward, _ = env_step(state, action)
        rewards.append(reward)
    return state, rewards


@pytest.mark.parametrize("complexity, reward", [(1300, 3700.0), (5000, 0.0), (3150, 925.0), (900, 3700.0), (9000, 0.0)])
def test_calc_reward_for_size_16(complexity, reward):
    assert_that(calc_reward(complexity, RewardConfig.for_size(16)), close_to(reward, 1e-9))


def test_reward_config_defaults():
    config = RewardConfig.for_size(16)
    assert (config.step_penalty, config.row_reward, config.gamma) == (0.1, 10.0, 2.0)
    assert (config.c_min, config.c_max, config.r_max) == (1300.0, 5000.0, 3700.0)
    assert config.max_steps == 250
    assert RewardConfig.for_size(12).row_reward == 5.0


def test_reward_config_from_file(tmp_path):
    path = tmp_path / "reward.json"
    path.write_text('{"gamma": 1.0, "step_penalty": 0.5}')
    config = RewardConfig.from_file(path, 16)
    assert (config.gamma, config.step_penalty, config.c_min) == (1.0, 0.5, 1300.0)

    path.write_text('{"alpha": 1.0}')
    with pytest.raises(AssertionError, match="Unknown RewardConfig keys"):
        RewardConfig.from_file(path, 16)


def test_invalid_reward_config():
    with pytest.raises(AssertionError):
        RewardConfig(c_min=10.0, c_max=5.0)


def test_reset_without_initialization():
    state = env_reset(4, target_pdp(4))
    assert state.rows == (0, 0, 0, 0)
    assert (state.k, state.t, state.current_row) == (0, 0, 3)
    assert legal_actions(state) == [0, 1, 2, 3]


def test_row_acceptance_and_rejection():
    state = env_reset(4, target_pdp(4))
    config = state.config

    state, rewards = play(state, [0, 1, 2, 3])
    assert rewards[:3] == [-config.step_penalty] * 3
    assert rewards[3] == config.row_reward
    assert (state.k, state.current_row) == (1, 2)

    state, rewards = play(state, [0, 1])
    assert rewards == [-config.step_penalty, config.row_reward]
    assert state.kernel.to_strings()[2:] == ["1100", "1111"]

    # 1100 lies in the span of the rows below, so the row is cleared
    state, rewards = play(state, [0, 1])
    assert rewards == [-config.step_penalty] * 2
    assert state.rows[1] == 0 and state.k == 2


def test_completing_a_kernel_pays_the_complexity_reward():
    state = env_reset(4, target_pdp(4))
    state, rewards = play(state, [0, 1, 2, 3, 0, 2, 0, 1, 0])
    assert state.done and state.outcome == EpisodeOutcome.COMPLETE
    assert state.kernel.to_strings() == ["1000", "1100", "1010", "1111"]
    assert state.complexity == 44
    assert_that(rewards[-1], close_to(state.config.row_reward + calc_reward(44, state.config), 1e-9))
    # -c per step that completes no row, alpha per accepted row
    assert_that(sum(rewards), close_to(-0.1 * 5 + 4 * 5.0 + calc_reward(44, state.config), 1e-9))
    with pytest.raises(IllegalActionError):
        env_step(state, 2)


def test_illegal_actions():
    state = env_reset(4, target_pdp(4))
    state, _, _ = env_step(state, 1)
    assert legal_actions(state) == [0, 2, 3]
    with pytest.raises(IllegalActionError):
        env_step(state, 1)
    with pytest.raises(IllegalActionError):
        env_step(state, 4)


def test_timeout():
    config = RewardConfig.for_size(4, max_steps=2)
    state = env_reset(4, target_pdp(4), config=config)
    state, _, done = env_step(state, 0)
    assert not done
    state, _, done = env_step(state, 1)
    assert done and state.outcome == EpisodeOutcome.TIMEOUT
    assert state.complexity is None


@pytest.mark.parametrize(
    "ell, below, distance, expected",
    [
        (4, (), 4, True),
        (3, (), 4, False),
        (4, (0b1111,), 2, True),
        (4, (0b1111,), 4, False),
        (7, (0b0001111, 0b0110011), 4, True),
    ],
)
def test_row_is_reachable(ell, below, distance, expected):
    assert row_is_reachable(ell, below, distance) == expected


def test_dead_end_ends_the_episode():
    config = RewardConfig.for_size(4).without_timeout()
    state = env_reset(4, Pdp((1, 2, 4, 4)), config=config)
    assert not state.done

    state, _ = play(state, [0, 1, 2])
    assert not state.done
    state, reward, done = env_step(state, 3)
    assert done and state.outcome == EpisodeOutcome.DEAD_END
    assert state.k == 1 and reward == config.row_reward
    assert legal_actions(state) == []


def test_dead_end_at_reset():
    initialization = Initialization.bottom(BinMatrix.from_strings(["1111"]))
    state = env_reset(4, Pdp((1, 2, 4, 4)), initialization)
    assert state.done and state.outcome == EpisodeOutcome.DEAD_END

    episode = play_episode(state, uniform_policy(np.random.default_rng(0)))
    assert len(episode) == 0 and not episode.is_complete


def test_randomized_initialization():
    rng = np.random.default_rng(0)
    state = env_reset(4, target_pdp(4), Initialization.randomized(positions=[2]), rng=rng)
    assert state.rows[3] == 0b1111 and state.n_fixed == 1
    assert state.rows[2] == 0b0100
    assert state.current_row == 2

    for _ in range(20):
        state = env_reset(16, target_pdp(16), Initialization.randomized(), rng=rng)
        assert 1 <= bin(state.rows[14]).count("1") < 8

    with pytest.raises(InvalidInitializationError):
        env_reset(4, target_pdp(4), Initialization.randomized(positions=[0, 1]))


def test_bottom_rows_initialization():
    initialization = Initialization.bottom(sorted_arikan_bottom(16, 5))
    assert initialization.mode == InitMode.BOTTOM_ROWS
    state = env_reset(16, target_pdp(16), initialization)
    assert state.k == 5 and state.n_fixed == 5 and state.current_row == 10
    assert state.rows[11:] == sorted_arikan_bottom(16, 5).rows
    assert state.rows_completed_by_agent == 0


def test_bottom_rows_with_random_count():
    rng = np.random.default_rng(1)
    initialization = Initialization.bottom(sorted_arikan_bottom(16, 5), row_counts=(3, 4, 5))
    counts = {env_reset(16, target_pdp(16), initialization, rng=rng).k for _ in range(60)}
    assert counts == {3, 4, 5}


def test_bottom_rows_must_match_target_suffix():
    with pytest.raises(InvalidInitializationError):
        env_reset(4, target_pdp(4), Initialization.bottom(BinMatrix.from_strings(["1000", "1111"])))


@pytest.mark.parametrize("ell", [4, 5, 8])
def test_random_episodes_yield_valid_kernels(ell):
    rng = np.random.default_rng(ell)
    config = RewardConfig.for_size(ell).without_timeout()
    policy = uniform_policy(rng)
    for _ in range(10):
        episode = play_episode(env_reset(ell, target_pdp(ell), config=config, rng=rng), policy)
        assert episode.is_complete
        assert is_kernel_valid(episode.final_kernel, target_pdp(ell))
        assert episode.final_complexity == kernel_complexity(episode.final_kernel).total
        np.testing.assert_allclose(episode.returns()[0], episode.total_reward)
        np.testing.assert_allclose(episode.returns(), np.cumsum(episode.rewards[::-1])[::-1])
