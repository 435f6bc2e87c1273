"""End-to-end federated rounds with parallel DP/HE protection.

One round, in protocol order: sample a client cohort, train locally,
vote on the partition (encrypted index tokens, server-side top-k), split
each update, clip-and-noise the plaintext part, encrypt the remainder,
aggregate both parts server-side, decrypt and merge client-side, and step
the global model.  Baseline protection modes degenerate the same code path
(no protection, noise everywhere, encryption everywhere, both serially, or
noise with per-round amplitude decay).

Determinism contract: every random stream is derived from
(experiment seed, purpose, round, client), aggregation folds in fixed
client-id order, and results are independent of the worker-pool size.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import seeds
from .datasets import (Dataset, load_csv_dataset, split_dirichlet, split_iid,
                       synthetic_dataset, train_test_split)
from .dp import DpParams, PrivacyBudget, protect_dp, sigma_from_budget
from .errors import DivergenceError, FedSplitError, ProtocolError
from .he import (HeCostModel, HeParams, make_backend, simulated_round_cost)
from .metrics import ExperimentReport, RoundMetrics, accuracy
from .models import ModelSpec, init_params, local_train, param_count
from .vectors import add_scaled, merge, split
from .voting import (PartitionStrategy, decode_partition, encrypt_indices,
                     new_vote_key, propose_partition, tally_votes, target_count)

__all__ = [
    "DataConfig", "RoundConfig", "RatioSchedule", "ProtectionMode",
    "ExperimentConfig", "ratio_at", "run_experiment", "RunAborted",
    "PROTECTION_KINDS",
]

PROTECTION_KINDS = ("none", "dp_only", "he_only", "serial", "parallel",
                    "varying_dp")
_DP_KINDS = ("dp_only", "serial", "parallel", "varying_dp")
_HE_KINDS = ("he_only", "serial", "parallel")


class RunAborted(FedSplitError):
    """A round failed; ``.report`` holds the partial report (complete=False)."""

    def __init__(self, message: str, report: ExperimentReport):
        super().__init__(message)
        self.report = report


@dataclass(frozen=True)
class DataConfig:
    kind: str = "synthetic"
    num_samples: int = 600
    input_dim: int = 10
    num_classes: int = 3
    separation: float = 2.0
    path: str = ""
    partition: str = "iid"
    dirichlet_alpha: float = 0.5
    test_fraction: float = 0.2

    def __post_init__(self):
        if self.kind not in ("synthetic", "csv"):
            raise ValueError(f"dataset kind must be synthetic or csv, got {self.kind!r}")
        if self.partition not in ("iid", "dirichlet"):
            raise ValueError(
                f"partition must be iid or dirichlet, got {self.partition!r}"
            )
        if self.kind == "csv" and not self.path:
            raise ValueError("csv dataset requires a path")


@dataclass(frozen=True)
class RoundConfig:
    clients_total_N: int = 5
    clients_sampled_n: int = 5
    local_epochs_K: int = 1
    learning_rate_eta: float = 0.05
    batch_size: int = 32
    rounds_T: int = 3

    def __post_init__(self):
        if not 1 <= self.clients_sampled_n <= self.clients_total_N:
            raise ValueError(
                f"need 1 <= sampled n ({self.clients_sampled_n}) <= total N "
                f"({self.clients_total_N})"
            )
        if self.local_epochs_K < 1 or self.rounds_T < 1 or self.batch_size < 1:
            raise ValueError("local_epochs_K, rounds_T, batch_size must be >= 1")
        if not self.learning_rate_eta > 0:
            raise ValueError("learning_rate_eta must be positive")

    @property
    def sampling_ratio(self) -> float:
        return self.clients_sampled_n / self.clients_total_N


@dataclass(frozen=True)
class RatioSchedule:
    """Encrypted-fraction schedule: static r0, or r0 * lambda^t per round."""

    r0: float = 0.1
    lam: float = 0.99
    mode: str = "static"

    def __post_init__(self):
        if not 0.0 <= self.r0 <= 1.0:
            raise ValueError(f"r0 must lie in [0, 1], got {self.r0}")
        if not 0.0 < self.lam <= 1.0:
            raise ValueError(f"lambda must lie in (0, 1], got {self.lam}")
        if self.mode not in ("static", "dynamic"):
            raise ValueError(f"schedule mode must be static or dynamic, got {self.mode!r}")


def ratio_at(schedule: RatioSchedule, t: int) -> float:
    """Encrypted fraction at round t (round 0 uses r0)."""
    if t < 0:
        raise ValueError(f"round index must be >= 0, got {t}")
    if schedule.mode == "static":
        return schedule.r0
    return schedule.r0 * schedule.lam ** t


@dataclass(frozen=True)
class ProtectionMode:
    kind: str = "parallel"
    amplitude_scale: float = 0.9  # varying_dp only

    def __post_init__(self):
        if self.kind not in PROTECTION_KINDS:
            raise ValueError(
                f"protection kind must be one of {PROTECTION_KINDS}, got {self.kind!r}"
            )
        if not 0.0 < self.amplitude_scale <= 1.0:
            raise ValueError(
                f"amplitude_scale must lie in (0, 1], got {self.amplitude_scale}"
            )

    @property
    def uses_dp(self) -> bool:
        return self.kind in _DP_KINDS

    @property
    def uses_he(self) -> bool:
        return self.kind in _HE_KINDS


@dataclass(frozen=True)
class ExperimentConfig:
    data: DataConfig = field(default_factory=DataConfig)
    model: ModelSpec = field(default_factory=lambda: ModelSpec(
        kind="logistic", input_dim=10, num_classes=3))
    rounds: RoundConfig = field(default_factory=RoundConfig)
    protection: ProtectionMode = field(default_factory=ProtectionMode)
    schedule: RatioSchedule = field(default_factory=RatioSchedule)
    strategy: PartitionStrategy = PartitionStrategy.MAX_NORM
    dp_epsilon: float = 1.0
    dp_delta: float = 1e-5
    dp_theta: float = 1.0
    he_backend: str = "mock"
    he_params: HeParams = field(default_factory=HeParams)
    he_cost: HeCostModel = field(default_factory=HeCostModel)
    seed: int = 0
    workers: int = 1
    include_wall_time: bool = False

    def __post_init__(self):
        object.__setattr__(self, "strategy", PartitionStrategy(self.strategy))
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    def as_flat_dict(self) -> dict:
        """Canonical flat key -> string echo, the config-file vocabulary."""
        d = self.data
        flat = {
            "dataset.kind": d.kind,
            "dataset.num_samples": str(d.num_samples),
            "dataset.input_dim": str(d.input_dim),
            "dataset.num_classes": str(d.num_classes),
            "dataset.separation": repr(d.separation),
            "dataset.path": d.path,
            "dataset.partition": d.partition,
            "dataset.dirichlet_alpha": repr(d.dirichlet_alpha),
            "dataset.test_fraction": repr(d.test_fraction),
            "model.kind": self.model.kind,
            "model.hidden_dims": ",".join(str(h) for h in self.model.hidden_dims),
            "round.clients_total_N": str(self.rounds.clients_total_N),
            "round.clients_sampled_n": str(self.rounds.clients_sampled_n),
            "round.local_epochs_K": str(self.rounds.local_epochs_K),
            "round.learning_rate_eta": repr(self.rounds.learning_rate_eta),
            "round.batch_size": str(self.rounds.batch_size),
            "round.rounds_T": str(self.rounds.rounds_T),
            "protection.kind": self.protection.kind,
            "protection.amplitude_scale": repr(self.protection.amplitude_scale),
            "schedule.mode": self.schedule.mode,
            "schedule.r0": repr(self.schedule.r0),
            "schedule.lambda": repr(self.schedule.lam),
            "voting.strategy": self.strategy.value,
            "dp.epsilon": repr(self.dp_epsilon),
            "dp.delta": repr(self.dp_delta),
            "dp.theta": repr(self.dp_theta),
            "he.backend": self.he_backend,
            "he.ring_degree": str(self.he_params.ring_degree),
            "he.scale_bits": str(self.he_params.scale_bits),
            "he.modulus_bits": str(self.he_params.modulus_bits),
            "he.max_additions": str(self.he_params.max_additions),
            "he.per_slot_seconds": repr(self.he_cost.per_slot_seconds),
            "he.per_op_seconds": repr(self.he_cost.per_op_seconds),
            "report.include_wall_time": str(self.include_wall_time).lower(),
            "seed": str(self.seed),
        }
        # workers is an execution detail: results are invariant to it, so it
        # stays out of the reported config.
        return flat


@dataclass
class _State:
    config: ExperimentConfig
    dim: int
    w: np.ndarray
    client_sets: list
    test_set: Dataset
    dp_params: DpParams | None
    backend: object | None
    keypair: object | None
    vote_key: object | None
    sigma_note: str = ""


def _build_dataset(cfg: ExperimentConfig) -> Dataset:
    d = cfg.data
    if d.kind == "synthetic":
        return synthetic_dataset(d.num_samples, d.input_dim, d.num_classes,
                                 d.separation, seeds.seed_sequence(cfg.seed, seeds.DATA))
    return load_csv_dataset(d.path, d.num_classes)


def _setup(cfg: ExperimentConfig) -> _State:
    full = _build_dataset(cfg)
    if full.input_dim != cfg.model.input_dim:
        raise ValueError(
            f"model.input_dim={cfg.model.input_dim} does not match dataset "
            f"input_dim={full.input_dim}"
        )
    if full.num_classes != cfg.model.num_classes:
        raise ValueError(
            f"model.num_classes={cfg.model.num_classes} does not match dataset "
            f"num_classes={full.num_classes}"
        )
    train, test = train_test_split(full, cfg.data.test_fraction,
                                   seeds.seed_sequence(cfg.seed, seeds.SPLIT, 0))
    if len(test) == 0:
        raise ValueError("test_fraction left an empty evaluation set")
    n_clients = cfg.rounds.clients_total_N
    shard_seed = seeds.seed_sequence(cfg.seed, seeds.SPLIT, 1)
    if cfg.data.partition == "iid":
        shards = split_iid(train, n_clients, shard_seed)
    else:
        shards = split_dirichlet(train, n_clients, cfg.data.dirichlet_alpha, shard_seed)
    client_sets = [train.subset(s) for s in shards]

    dp_params = None
    sigma_note = ""
    if cfg.protection.uses_dp:
        budget = PrivacyBudget(
            epsilon=cfg.dp_epsilon, delta=cfg.dp_delta,
            q=cfg.rounds.sampling_ratio, rounds_T=cfg.rounds.rounds_T,
            theta=cfg.dp_theta,
            min_dataset_size=min(len(c) for c in client_sets),
        )
        dp_params = DpParams(theta=cfg.dp_theta, sigma_z=sigma_from_budget(budget))
        sigma_note = (f"sigma_z={dp_params.sigma_z!r} calibrated once from "
                      f"(eps={budget.epsilon}, delta={budget.delta}, q={budget.q}, "
                      f"T={budget.rounds_T}, theta={budget.theta}, "
                      f"min|D|={budget.min_dataset_size})")

    backend = keypair = vote_key = None
    if cfg.protection.uses_he:
        backend = make_backend(cfg.he_backend, cfg.he_params)
        keypair = backend.keygen(seeds.seed_sequence(cfg.seed, seeds.HE_KEYGEN))
    if cfg.protection.kind == "parallel":
        vote_key = new_vote_key(seeds.seed_sequence(cfg.seed, seeds.VOTE_KEY))

    w = init_params(cfg.model, seeds.seed_sequence(cfg.seed, seeds.MODEL_INIT))
    return _State(config=cfg, dim=param_count(cfg.model), w=w,
                  client_sets=client_sets, test_set=test, dp_params=dp_params,
                  backend=backend, keypair=keypair, vote_key=vote_key,
                  sigma_note=sigma_note)


def _map_clients(fn, items, workers: int):
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _aggregate_encrypted(state: _State, per_client_cts: list, length: int) -> np.ndarray:
    """Fold ciphertext chunks in client order, decrypt, and divide by n."""
    if length == 0:
        return np.empty(0, dtype=np.float64)
    n_chunks = len(per_client_cts[0])
    for cts in per_client_cts:
        if len(cts) != n_chunks:
            raise ProtocolError("clients produced differing ciphertext chunk counts")
    summed = list(per_client_cts[0])
    for cts in per_client_cts[1:]:
        summed = [state.backend.hom_add(a, b) for a, b in zip(summed, cts)]
    total = state.backend.decrypt(state.keypair, summed, length)
    return total / len(per_client_cts)


def _round_sigma(state: _State, t: int) -> float:
    sigma = state.dp_params.sigma_z
    if state.config.protection.kind == "varying_dp":
        sigma *= state.config.protection.amplitude_scale ** t
    return sigma


def _run_round(state: _State, t: int) -> RoundMetrics:
    cfg = state.config
    started = time.perf_counter()
    rng_sample = seeds.rng_for(cfg.seed, seeds.SAMPLING, t)
    cohort = np.sort(rng_sample.choice(
        cfg.rounds.clients_total_N, size=cfg.rounds.clients_sampled_n,
        replace=False)).tolist()

    def train_one(client: int) -> np.ndarray:
        ds = state.client_sets[client]
        return local_train(cfg.model, state.w, ds.features, ds.labels,
                           cfg.rounds.local_epochs_K, cfg.rounds.learning_rate_eta,
                           cfg.rounds.batch_size,
                           seeds.seed_sequence(cfg.seed, seeds.TRAIN, t, client))

    updates = _map_clients(train_one, cohort, cfg.workers)
    kind = cfg.protection.kind
    n = len(cohort)
    sim_time = 0.0
    r_t = 0.0

    if kind == "none":
        global_update = np.mean(np.stack(updates), axis=0)

    elif kind in ("dp_only", "varying_dp"):
        dp = DpParams(theta=state.dp_params.theta, sigma_z=_round_sigma(state, t))

        def protect_one(item):
            client, u = item
            return protect_dp(u, dp, seeds.seed_sequence(cfg.seed, seeds.DP_NOISE, t, client))

        noised = _map_clients(protect_one, list(zip(cohort, updates)), cfg.workers)
        global_update = np.mean(np.stack(noised), axis=0)

    elif kind in ("he_only", "serial"):
        r_t = 1.0
        if kind == "serial":
            def protect_one(item):
                client, u = item
                return protect_dp(u, state.dp_params,
                                  seeds.seed_sequence(cfg.seed, seeds.DP_NOISE, t, client))
            updates = _map_clients(protect_one, list(zip(cohort, updates)), cfg.workers)

        def encrypt_one(item):
            client, u = item
            return state.backend.encrypt(
                state.keypair, u, seeds.seed_sequence(cfg.seed, seeds.HE_ENCRYPT, t, client))

        per_client = _map_clients(encrypt_one, list(zip(cohort, updates)), cfg.workers)
        global_update = _aggregate_encrypted(state, per_client, state.dim)
        if cfg.he_backend == "mock":
            sim_time = simulated_round_cost(cfg.he_cost, n, state.dim)

    elif kind == "parallel":
        r_t = ratio_at(cfg.schedule, t)
        k = target_count(r_t, state.dim)
        vk = state.vote_key.for_round(t)

        def propose_one(item):
            client, u = item
            mask = propose_partition(u, r_t, cfg.strategy,
                                     seeds.seed_sequence(cfg.seed, seeds.PROPOSE, t, client))
            return encrypt_indices(mask, vk, client_id=client)

        messages = _map_clients(propose_one, list(zip(cohort, updates)), cfg.workers)
        winners = tally_votes(messages, k)
        mask = decode_partition(winners, vk, state.dim, k)
        if mask.size != k:
            raise ProtocolError(
                f"round {t}: consensus mask has {mask.size} indices, expected {k}"
            )

        def protect_one(item):
            client, u = item
            parts = split(u, mask)
            noised_dp = protect_dp(parts.dp_part, state.dp_params,
                                   seeds.seed_sequence(cfg.seed, seeds.DP_NOISE, t, client))
            cts = state.backend.encrypt(
                state.keypair, parts.he_part,
                seeds.seed_sequence(cfg.seed, seeds.HE_ENCRYPT, t, client))
            return noised_dp, cts

        protected = _map_clients(protect_one, list(zip(cohort, updates)), cfg.workers)
        dp_mean = np.mean(np.stack([p[0] for p in protected]), axis=0)
        he_mean = _aggregate_encrypted(state, [p[1] for p in protected], k)
        global_update = merge(dp_mean, he_mean, mask)
        if cfg.he_backend == "mock" and k > 0:
            sim_time = simulated_round_cost(cfg.he_cost, n, k)

    else:  # pragma: no cover - guarded by ProtectionMode validation
        raise ProtocolError(f"unhandled protection kind {kind!r}")

    if not np.all(np.isfinite(global_update)):
        raise DivergenceError(f"round {t}: non-finite global update")
    state.w = add_scaled(state.w, global_update, 1.0)
    acc = accuracy(cfg.model, state.w, state.test_set)
    if not math.isfinite(acc):
        raise DivergenceError(f"round {t}: non-finite accuracy")
    wall = time.perf_counter() - started
    return RoundMetrics(round=t, r_t=r_t, accuracy=acc, sim_time_s=sim_time,
                        wall_time_s=wall)


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Run T rounds and return a complete report.

    Reports are bit-identical across runs with the same config and seed,
    independent of the worker count; wall-clock timing is kept out of the
    deterministic payload.  A failing round raises RunAborted carrying the
    partial report (complete=False).
    """
    time_basis = "simulated" if cfg.he_backend == "mock" else "wall"
    report = ExperimentReport(config=cfg.as_flat_dict(), seed=cfg.seed,
                              backend=cfg.he_backend, time_basis=time_basis)
    if cfg.protection.kind == "varying_dp":
        report.notes.append(
            "varying_dp baseline uses the simplified per-round amplitude "
            f"sigma_z * {cfg.protection.amplitude_scale}^t"
        )
    try:
        state = _setup(cfg)
        if state.sigma_note:
            report.notes.append(state.sigma_note)
        for t in range(cfg.rounds.rounds_T):
            report.rounds.append(_run_round(state, t))
    except (FedSplitError, ValueError) as exc:
        _finalize(report)
        raise RunAborted(f"experiment aborted: {exc}", report) from exc
    _finalize(report)
    report.complete = True
    return report


def _finalize(report: ExperimentReport) -> None:
    if report.rounds:
        report.final_accuracy = report.rounds[-1].accuracy
        report.total_sim_time_s = float(sum(r.sim_time_s for r in report.rounds))
        report.total_wall_time_s = float(sum(r.wall_time_s for r in report.rounds))
    basis_time = (report.total_sim_time_s if report.time_basis == "simulated"
                  else report.total_wall_time_s)
    if basis_time > 0 and report.rounds:
        report.efficiency_ratio = report.final_accuracy * 100.0 / basis_time * 100.0
    else:
        report.efficiency_ratio = None
