import json
from dataclasses import dataclass, field, fields
from logging import Logger
from pathlib import Path
from time import time
from typing import Optional, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from polarkern.agent.encoding import input_size
from polarkern.agent.mcts import MctsConfig
from polarkern.agent.network import NetworkConfig, PolicyValueNet
from polarkern.agent.problem import KernelSearchProblem
from polarkern.agent.replay import ReplayBuffer
from polarkern.agent.selfplay import GameRecord, SizeDistribution, self_play_iteration
from polarkern.kernels import sorted_arikan_bottom
from polarkern.logger import logger
from polarkern.metrics import target_pdp
from polarkern.models.binmatrix import BinMatrix, read_kernel, write_kernel
from polarkern.search.config import RewardConfig, check_keys
from polarkern.search.environment import Initialization


INIT_MODES = ("none", "random", "bottom")


@dataclass(frozen=True)
class TrainingConfig:
    """
    Self-play training setup.

    `sizes` maps kernel sizes to sampling probabilities (a single entry for single-size
    training). With `init = "bottom"` every game starts from the bottom rows of the
    sorted Arikan kernel, their number drawn uniformly from `bottom_rows`; with
    `bottom_file` set they come from that kernel file instead (all of its rows unless
    `bottom_rows` is given). `reward` overrides RewardConfig fields for every size.
    """

    sizes: dict[int, float] = field(default_factory=lambda: {16: 1.0})
    iterations: int = 250
    games: int = 2000
    batch_size: int = 256
    updates_per_iteration: int = 100
    buffer_capacity: int = 100_000
    hidden: tuple[int, ...] = (256, 256)
    learning_rate: float = 1e-3
    momentum: float = 0.9
    l2: float = 1e-4
    n_simulations: int = 32
    n_candidates: int = 16
    init: str = "none"
    bottom_rows: tuple[int, ...] = ()
    bottom_file: Optional[str] = None
    reward: dict = field(default_factory=dict)
    seed: Optional[int] = 2024
    n_processes: int = 1

    def __post_init__(self):
        assert self.iterations >= 1, "`iterations` must be a positive integer"
        assert self.games >= 1, "`games` must be a positive integer"
        assert self.batch_size >= 1, "`batch_size` must be a positive integer"
        assert self.updates_per_iteration >= 0, "`updates_per_iteration` must be non-negative"
        assert self.init in INIT_MODES, f"`init` must be one of {INIT_MODES}, got {self.init!r}"
        assert self.init != "bottom" or self.bottom_rows or self.bottom_file, (
            "`init = bottom` needs `bottom_rows` or `bottom_file`"
        )
        assert self.bottom_file is None or self.init == "bottom", "`bottom_file` needs `init = bottom`"
        assert self.bottom_file is None or len(self.sizes) == 1, "`bottom_file` fixes a single kernel size"
        assert self.init != "bottom" or self.bottom_file or all(size & (size - 1) == 0 for size in self.sizes), (
            "`init = bottom` starts from sorted Arikan rows and needs power-of-two sizes"
        )
        check_keys(RewardConfig, self.reward)
        SizeDistribution.from_mapping(self.sizes)

    @classmethod
    def from_file(cls, path: Union[str, Path], **overrides) -> "TrainingConfig":
        """
        Reads a JSON object whose keys are field names of this class; `reward` is a
        nested object of RewardConfig fields.
        """

        values = json.loads(Path(path).read_text())
        values.update(overrides)
        check_keys(cls, values)
        if "sizes" in values:
            values["sizes"] = {int(size): float(weight) for size, weight in values["sizes"].items()}
        for name in ("hidden", "bottom_rows"):
            if name in values:
                values[name] = tuple(values[name])
        return cls(**values)

    @property
    def size_distribution(self) -> SizeDistribution:
        return SizeDistribution.from_mapping(self.sizes)

    @property
    def ell_max(self) -> int:
        return max(self.sizes)

    def reward_config(self, ell: int) -> RewardConfig:
        return RewardConfig.for_size(ell, **self.reward)

    def initialization(self, ell: int) -> Initialization:
        if self.init == "random":
            return Initialization.randomized()
        if self.init == "bottom" and self.bottom_file:
            return Initialization.bottom(read_kernel(self.bottom_file), row_counts=self.bottom_rows)
        if self.init == "bottom":
            return Initialization.bottom(
                sorted_arikan_bottom(ell, max(self.bottom_rows)), row_counts=self.bottom_rows
            )
        return Initialization.none()

    def problem(self, ell: int) -> KernelSearchProblem:
        return KernelSearchProblem(
            ell,
            target_pdp(ell),
            ell_max=self.ell_max,
            config=self.reward_config(ell),
            initialization=self.initialization(ell),
        )

    def network_config(self) -> NetworkConfig:
        return NetworkConfig(
            input_size=input_size(self.ell_max),
            n_actions=self.ell_max,
            hidden=self.hidden,
            learning_rate=self.learning_rate,
            momentum=self.momentum,
            l2=self.l2,
            seed=self.seed,
        )

    def mcts_config(self) -> MctsConfig:
        return MctsConfig(n_simulations=self.n_simulations, n_candidates=self.n_candidates)

    def to_json(self) -> dict:
        values = {item.name: getattr(self, item.name) for item in fields(self)}
        values["sizes"] = {str(size): weight for size, weight in self.sizes.items()}
        values["hidden"] = list(self.hidden)
        values["bottom_rows"] = list(self.bottom_rows)
        return values


@dataclass
class TrainingResult:
    best_kernels: dict[int, BinMatrix] = field(default_factory=dict)
    best_complexities: dict[int, int] = field(default_factory=dict)
    log: pd.DataFrame = field(default_factory=pd.DataFrame)

    def record(self, game: GameRecord) -> None:
        complexity = getattr(game.final_state, "complexity", None)
        if complexity is None:
            return
        if game.ell not in self.best_complexities or complexity < self.best_complexities[game.ell]:
            self.best_complexities[game.ell] = complexity
            self.best_kernels[game.ell] = game.final_state.kernel


@logger
class Trainer:
    """
    Alternates self-play iterations and network updates.

    After every iteration the per-size running minimum complexity and the
    min / avg / max episode returns are appended to the training log; with an
    `out_dir` the log, a network checkpoint and the best kernels are written there.
    """

    logger: Logger

    def __init__(
        self,
        config: TrainingConfig,
        out_dir: Optional[Union[str, Path]] = None,
        net: Optional[PolicyValueNet] = None,
        verbose: bool = True,
    ):
        self.config = config
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.net = net or PolicyValueNet(config.network_config())
        self.verbose = verbose
        self.problems = {ell: config.problem(ell) for ell in config.sizes}
        self.buffer = ReplayBuffer(config.buffer_capacity)
        self.rng = np.random.default_rng(config.seed)

    def _update(self) -> Optional[float]:
        if not len(self.buffer) or not self.config.updates_per_iteration:
            return None
        losses = [
            self.net.train_step(self.buffer.sample_batch(self.config.batch_size, self.rng))
            for _ in range(self.config.updates_per_iteration)
        ]
        return float(np.mean(losses))

    def _log_row(self, iteration: int, records: list[GameRecord], result: TrainingResult) -> dict:
        returns = np.array([record.total_reward for record in records])
        row = {
            "iteration": iteration,
            "min_return": float(returns.min()),
            "avg_return": float(returns.mean()),
            "max_return": float(returns.max()),
        }
        for ell in sorted(self.config.sizes, reverse=True):
            row[f"best_complexity_l{ell}"] = result.best_complexities.get(ell, np.nan)
        return row

    def _write_outputs(self, iteration: int, result: TrainingResult) -> None:
        if self.out_dir is None:
            return
        self.out_dir.mkdir(parents=True, exist_ok=True)
        result.log.to_csv(self.out_dir / "training_log.csv", index=False)
        self.net.save(self.out_dir / f"checkpoint_{iteration:04d}.pt")
        for ell, kernel in result.best_kernels.items():
            write_kernel(self.out_dir / f"best_kernel_l{ell}.txt", kernel)

    def run(self) -> TrainingResult:
        config = self.config
        result = TrainingResult()
        rows = []
        start_time = time()

        for iteration in tqdm(range(config.iterations), desc="Training iterations", disable=not self.verbose):
            iteration_start = time()
            records = self_play_iteration(
                self.problems,
                self.net,
                config.games,
                config.size_distribution,
                buffer=self.buffer,
                mcts_config=config.mcts_config(),
                seed=config.seed,
                iteration=iteration,
                n_processes=config.n_processes,
            )
            for record in records:
                result.record(record)
            loss = self._update()

            rows.append(self._log_row(iteration, records, result))
            result.log = pd.DataFrame(rows)
            self._write_outputs(iteration, result)

            loss_text = f"{loss:.4f}" if loss is not None else "n/a"
            self.logger.info(
                f"Iteration {iteration}: return min {rows[-1]['min_return']:.1f} / "
                f"avg {rows[-1]['avg_return']:.1f} / max {rows[-1]['max_return']:.1f}, "
                f"best complexities {result.best_complexities}, loss {loss_text} "
                f"({time() - iteration_start:,.1f} seconds)"
            )

        self.logger.info(f"Training took {time() - start_time:,.1f} seconds")
        return result


def training_loop(
    config: TrainingConfig, out_dir: Optional[Union[str, Path]] = None, verbose: bool = False
) -> TrainingResult:
    return Trainer(config, out_dir=out_dir, verbose=verbose).run()
