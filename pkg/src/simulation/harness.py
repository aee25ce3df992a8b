"""Orquestacion de experimentos: instancias pareadas, episodios y agregados."""

from __future__ import annotations

import dataclasses
import logging
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from src.errors import ConfigError, OracleTooLargeError, PreconditionError, TactsError
from src.simulation.baselines import (
    DocConfig,
    run_doc_episode,
    run_rcs_episode,
    run_sc_episode,
    run_tasr_episode,
)
from src.simulation.beliefs import ModalityProfile, generate_modality_belief
from src.simulation.costmodel import BprParams, FlowState
from src.simulation.network import (
    DEFAULT_MAX_PATH_EDGES,
    Commodity,
    TrafficNetwork,
    enumerate_commodities,
    load_network,
)
from src.simulation.oracle import compute_oracle
from src.simulation.tacts import EpisodeResult, TactsConfig, run_tacts_episode

logger = logging.getLogger(__name__)

CONGESTION_LEVELS = {"low": 0.25, "medium": 0.75, "high": 1.5}
FC_VALUES = (1.0, 10.0, 30.0)
ALGORITHMS = ("tacts", "doc", "tasr", "rcs", "sc", "oracle")
TASR_PRIORS = ("uniform", "true-trust")
RECORD_FLOAT_FIELDS = (
    "f_c",
    "performance_ratio",
    "realized_total_time",
    "realized_vehicle_time",
    "oracle_time",
    "regret_sum",
)


def _parse_range(value: Any) -> tuple[int, int]:
    """Acepta "lo:hi", "n" o un par de enteros."""
    if isinstance(value, str):
        lo, sep, hi = value.partition(":")
        if not sep:
            hi = lo
        try:
            return int(lo), int(hi)
        except ValueError as exc:
            raise ConfigError(f"Rango de modalidades invalido: {value!r}.") from exc
    lo, hi = value
    return int(lo), int(hi)


def _parse_algorithms(value: Any) -> tuple[str, ...]:
    """Lista separada por comas o iterable; normaliza a minusculas."""
    names = value.split(",") if isinstance(value, str) else list(value)
    return tuple(name.strip().lower() for name in names if name.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    """Parametros de un experimento; se valida al construirse."""

    network_path: str
    congestion_level: str = "medium"
    f_c: float = 10.0
    repetitions: int = 1
    algorithms: tuple[str, ...] = ALGORITHMS
    modality_count_range: tuple[int, int] = (2, 6)
    N: int = 2
    epsilon: float = 0.01
    base_seed: int = 0
    max_path_edges: int = DEFAULT_MAX_PATH_EDGES
    doc_window: int = 2
    doc_gamma: int = 1
    tasr_prior: str = "uniform"
    sc_modality: int | None = None
    lam: float = 0.15
    beta: float = 4.0
    workers: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "network_path", str(self.network_path))
        for name in ("f_c", "epsilon", "lam", "beta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "algorithms", _parse_algorithms(self.algorithms))
        object.__setattr__(
            self, "modality_count_range", _parse_range(self.modality_count_range)
        )
        if self.congestion_level not in CONGESTION_LEVELS:
            raise ConfigError(
                f"Nivel de congestion desconocido {self.congestion_level!r}; "
                f"use uno de {', '.join(CONGESTION_LEVELS)}."
            )
        if not self.f_c > 0:
            raise ConfigError("f_c debe ser positivo.")
        if self.repetitions < 1:
            raise ConfigError("repetitions debe ser al menos 1.")
        unknown = sorted(set(self.algorithms) - set(ALGORITHMS))
        if unknown or not self.algorithms:
            raise ConfigError(f"Algoritmos desconocidos: {', '.join(unknown) or '(ninguno)'}.")
        lo, hi = self.modality_count_range
        if not 1 <= lo <= hi:
            raise ConfigError("El rango de modalidades debe cumplir 1 <= lo <= hi.")
        if self.max_path_edges < 1:
            raise ConfigError("max_path_edges debe ser al menos 1.")
        if self.tasr_prior not in TASR_PRIORS:
            raise ConfigError(f"Prior TASR desconocido {self.tasr_prior!r}.")
        if self.sc_modality is not None and not 1 <= self.sc_modality <= lo:
            raise ConfigError("sc_modality debe existir en todas las instancias.")
        if self.workers < 1:
            raise ConfigError("workers debe ser al menos 1.")
        try:
            self.tacts_config()
            self.doc_config()
            self.bpr()
        except (ValueError, TactsError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> ExperimentConfig:
        """Construye la config desde claves de archivo o banderas (guiones o guiones bajos)."""
        aliases = {
            "network": "network_path",
            "congestion": "congestion_level",
            "fc": "f_c",
            "reps": "repetitions",
            "algos": "algorithms",
            "modalities": "modality_count_range",
            "seed": "base_seed",
            "doc_threshold": "doc_gamma",
        }
        names = {f.name for f in dataclasses.fields(cls)}
        kwargs: dict[str, Any] = {}
        for key, value in data.items():
            if value is None:
                continue
            name = key.replace("-", "_")
            name = aliases.get(name, name)
            if name not in names:
                raise ConfigError(f"Clave de configuracion desconocida {key!r}.")
            kwargs[name] = value
        if "network_path" not in kwargs:
            raise ConfigError("Falta la ruta de la red (network).")
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc

    @property
    def congestion_multiplier(self) -> float:
        return CONGESTION_LEVELS[self.congestion_level]

    @property
    def network_name(self) -> str:
        """Identificador de la red en los registros: nombre del archivo sin extension."""
        return Path(self.network_path).stem

    def tacts_config(self) -> TactsConfig:
        """Parametros del controlador derivados de esta config."""
        return TactsConfig(
            history_window=self.N,
            memory_decay=self.epsilon,
            rng_seed=self.base_seed,
            f_c=self.f_c,
            max_path_edges=self.max_path_edges,
        )

    def doc_config(self) -> DocConfig:
        return DocConfig(window=self.doc_window, threshold=self.doc_gamma)

    def bpr(self) -> BprParams:
        return BprParams(lam=self.lam, beta=self.beta)

    def to_dict(self) -> dict[str, Any]:
        data = dataclasses.asdict(self)
        data["algorithms"] = list(self.algorithms)
        data["modality_count_range"] = list(self.modality_count_range)
        return data


@dataclass(frozen=True)
class Instance:
    """Instancia de ruteo compartida por todos los algoritmos de una repeticion."""

    net: TrafficNetwork
    commodity: Commodity
    true_flows: FlowState
    modalities: tuple[ModalityProfile, ...]
    seed: int


@dataclass(frozen=True)
class ResultRecord:
    """Un episodio de un algoritmo; los reales quedan redondeados a 6 decimales."""

    algorithm: str
    repetition: int
    network: str
    origin: int | None
    destination: int | None
    congestion: str
    f_c: float
    modality_count: int
    performance_ratio: float | None
    realized_total_time: float | None
    realized_vehicle_time: float | None
    oracle_time: float | None
    regret_sum: float | None
    wall_clock_micros: int
    failed: bool
    seed: int
    failure_reason: str | None = None

    def __post_init__(self) -> None:
        # Asi records.csv (6 decimales) se relee sin perdida.
        for name in RECORD_FLOAT_FIELDS:
            value = getattr(self, name)
            if value is not None:
                object.__setattr__(self, name, round(float(value), 6))

    @property
    def commodity(self) -> str:
        return f"{self.origin}->{self.destination}"


@dataclass(frozen=True)
class SummaryRow:
    """Fila agregada por celda (red, congestion, f_c) y algoritmo."""

    algorithm: str
    network: str
    congestion: str
    f_c: float
    episodes: int
    failures: int
    mean_ratio: float | None
    std_ratio: float | None
    mean_vehicle_time: float | None
    mean_wall_clock_micros: float | None
    exec_time_ratio: float | None
    improvement_vs_tacts_pct: float | None

    @property
    def missing(self) -> bool:
        return self.mean_ratio is None and self.mean_wall_clock_micros is None


@lru_cache(maxsize=8)
def _network(path: str) -> TrafficNetwork:
    """Red cacheada por ruta; los workers la cargan una sola vez."""
    return load_network(path)


@lru_cache(maxsize=8)
def _commodities(net: TrafficNetwork, max_edges: int) -> tuple[Commodity, ...]:
    return tuple(enumerate_commodities(net, max_edges))


def instance_seed(cfg: ExperimentConfig, rep: int) -> np.random.SeedSequence:
    """Semilla de la instancia; depende solo de la semilla base y la repeticion."""
    return np.random.SeedSequence([cfg.base_seed, rep])


def episode_rng(cfg: ExperimentConfig, rep: int, algorithm: str) -> np.random.Generator:
    """Flujo aleatorio propio de cada algoritmo; agregar uno no altera a los demas."""
    salt = zlib.crc32(algorithm.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence([cfg.base_seed, rep, salt]))


def build_instance(
    cfg: ExperimentConfig, rep: int, net: TrafficNetwork | None = None
) -> Instance:
    """Sortea commodity, cantidad de modalidades, confiabilidades y creencias."""
    net = net if net is not None else _network(cfg.network_path)
    commodities = _commodities(net, cfg.max_path_edges)
    if not commodities:
        raise ConfigError(
            f"La red no tiene commodities con a lo sumo {cfg.max_path_edges} arcos."
        )
    sequence = instance_seed(cfg, rep)
    rng = np.random.default_rng(sequence)
    true_flows = FlowState.scaled_capacity(net, cfg.congestion_multiplier)
    commodity = commodities[int(rng.integers(len(commodities)))]
    lo, hi = cfg.modality_count_range
    count = int(rng.integers(lo, hi + 1))
    trusts = rng.uniform(0.0, 1.0, size=count)
    modalities = tuple(
        ModalityProfile(
            modality_id=index + 1,
            true_trust=float(trust),
            beliefs=generate_modality_belief(true_flows, net, float(trust), rng),
        )
        for index, trust in enumerate(trusts)
    )
    seed = int(sequence.generate_state(1)[0])
    return Instance(net, commodity, true_flows, modalities, seed)


def run_algorithm(
    algorithm: str, instance: Instance, cfg: ExperimentConfig, rng: np.random.Generator
) -> EpisodeResult:
    """Despacha un episodio segun el nombre del algoritmo."""
    args = (instance.net, instance.commodity, instance.true_flows, instance.modalities)
    tacts_cfg = cfg.tacts_config()
    p = cfg.bpr()
    if algorithm == "tacts":
        return run_tacts_episode(*args, tacts_cfg, p, rng=rng)
    if algorithm == "doc":
        return run_doc_episode(*args, cfg.doc_config(), tacts_cfg, p, rng)
    if algorithm == "tasr":
        prior = None
        if cfg.tasr_prior == "true-trust":
            prior = {m.modality_id: m.true_trust for m in instance.modalities}
        return run_tasr_episode(*args, prior, tacts_cfg, p, rng)
    if algorithm == "rcs":
        return run_rcs_episode(*args, tacts_cfg, p, rng)
    if algorithm == "sc":
        modality = cfg.sc_modality or min(m.modality_id for m in instance.modalities)
        return run_sc_episode(*args, modality, tacts_cfg, p, rng)
    raise ConfigError(f"Algoritmo desconocido {algorithm!r}.")


def _failed_record(
    cfg: ExperimentConfig, rep: int, algorithm: str, reason: str, instance: Instance | None
) -> ResultRecord:
    """Registro de un episodio que no termino; las metricas quedan en None."""
    return ResultRecord(
        algorithm=algorithm,
        repetition=rep,
        network=cfg.network_name,
        origin=instance.commodity.origin if instance else None,
        destination=instance.commodity.destination if instance else None,
        congestion=cfg.congestion_level,
        f_c=cfg.f_c,
        modality_count=len(instance.modalities) if instance else 0,
        performance_ratio=None,
        realized_total_time=None,
        realized_vehicle_time=None,
        oracle_time=None,
        regret_sum=None,
        wall_clock_micros=0,
        failed=True,
        seed=instance.seed if instance else int(instance_seed(cfg, rep).generate_state(1)[0]),
        failure_reason=reason,
    )


def run_repetition(cfg: ExperimentConfig, rep: int) -> list[ResultRecord]:
    """Una instancia, todos los algoritmos pedidos; errores quedan como registros fallidos."""
    ordered = [name for name in ALGORITHMS if name in cfg.algorithms]
    try:
        instance = build_instance(cfg, rep)
    except ConfigError:
        raise
    except TactsError as exc:
        logger.warning("instance failed rep=%d reason=%s", rep, exc)
        return [_failed_record(cfg, rep, name, str(exc), None) for name in ordered]

    tau_star: float | None = None
    oracle_vehicle_time: float | None = None
    oracle_micros = 0
    oracle_error: str | None = None
    if "oracle" in cfg.algorithms:
        started = time.perf_counter_ns()
        try:
            oracle = compute_oracle(
                instance.net,
                instance.commodity,
                instance.true_flows,
                instance.modalities,
                cfg.tacts_config(),
                cfg.bpr(),
            )
            tau_star = oracle.tau_star
            oracle_vehicle_time = oracle.vehicle_time
        except (OracleTooLargeError, TactsError) as exc:
            oracle_error = str(exc)
        oracle_micros = (time.perf_counter_ns() - started) // 1000

    records: list[ResultRecord] = []
    for name in ordered:
        if name == "oracle":
            if oracle_error is not None:
                records.append(_failed_record(cfg, rep, name, oracle_error, instance))
                continue
            records.append(
                ResultRecord(
                    algorithm=name,
                    repetition=rep,
                    network=cfg.network_name,
                    origin=instance.commodity.origin,
                    destination=instance.commodity.destination,
                    congestion=cfg.congestion_level,
                    f_c=cfg.f_c,
                    modality_count=len(instance.modalities),
                    performance_ratio=1.0,
                    realized_total_time=tau_star,
                    realized_vehicle_time=oracle_vehicle_time,
                    oracle_time=tau_star,
                    regret_sum=None,
                    wall_clock_micros=oracle_micros,
                    failed=False,
                    seed=instance.seed,
                )
            )
            continue
        rng = episode_rng(cfg, rep, name)
        started = time.perf_counter_ns()
        try:
            result = run_algorithm(name, instance, cfg, rng)
        except TactsError as exc:
            logger.warning("episode error algorithm=%s rep=%d reason=%s", name, rep, exc)
            records.append(_failed_record(cfg, rep, name, str(exc), instance))
            continue
        elapsed = (time.perf_counter_ns() - started) // 1000
        result = result.with_oracle(tau_star)
        records.append(
            ResultRecord(
                algorithm=name,
                repetition=rep,
                network=cfg.network_name,
                origin=instance.commodity.origin,
                destination=instance.commodity.destination,
                congestion=cfg.congestion_level,
                f_c=cfg.f_c,
                modality_count=len(instance.modalities),
                performance_ratio=result.performance_ratio,
                realized_total_time=result.realized_total_time,
                realized_vehicle_time=result.realized_vehicle_time,
                oracle_time=result.oracle_total_time,
                regret_sum=result.regret_sum,
                wall_clock_micros=int(elapsed),
                failed=result.failed,
                seed=instance.seed,
                failure_reason=result.failure_reason,
            )
        )
    logger.info(
        "repetition finished rep=%d commodity=%s modalities=%d",
        rep,
        instance.commodity.label,
        len(instance.modalities),
    )
    return records


def run_experiment(cfg: ExperimentConfig) -> list[ResultRecord]:
    """Corre todas las repeticiones; el orden es (repeticion, algoritmo)."""
    logger.info(
        "experiment started network=%s congestion=%s f_c=%s reps=%d workers=%d",
        cfg.network_path,
        cfg.congestion_level,
        cfg.f_c,
        cfg.repetitions,
        cfg.workers,
    )
    reps = range(cfg.repetitions)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            batches = list(pool.map(run_repetition, [cfg] * cfg.repetitions, reps))
    else:
        batches = [run_repetition(cfg, rep) for rep in reps]
    records = [record for batch in batches for record in batch]
    failures = sum(record.failed for record in records)
    logger.info("experiment finished records=%d failures=%d", len(records), failures)
    return records


def run_sweep(
    cfg: ExperimentConfig,
    congestion_levels: Iterable[str] = tuple(CONGESTION_LEVELS),
    fc_values: Iterable[float] = FC_VALUES,
) -> list[ResultRecord]:
    """Grilla completa congestion x f_c con la misma semilla base."""
    fc_values = tuple(fc_values)
    records: list[ResultRecord] = []
    for level in congestion_levels:
        for f_c in fc_values:
            cell = dataclasses.replace(cfg, congestion_level=level, f_c=float(f_c))
            records.extend(run_experiment(cell))
    return records


def _mean(values: Sequence[float]) -> float | None:
    return float(np.mean(values)) if values else None


def aggregate(records: Sequence[ResultRecord]) -> list[SummaryRow]:
    """Media y desviacion poblacional de la razon de desempeno por celda (red, congestion, f_c)."""
    if not records:
        raise PreconditionError("No hay registros para agregar.")
    cells: dict[tuple[str, str, float], dict[str, list[ResultRecord]]] = {}
    for record in records:
        cell = cells.setdefault((record.network, record.congestion, record.f_c), {})
        cell.setdefault(record.algorithm, []).append(record)

    rows: list[SummaryRow] = []
    for (network, congestion, f_c), by_algorithm in cells.items():
        stats: dict[str, tuple[float | None, float | None, float | None]] = {}
        for algorithm, group in by_algorithm.items():
            ok = [r for r in group if not r.failed]
            ratios = [r.performance_ratio for r in ok if r.performance_ratio is not None]
            stats[algorithm] = (
                _mean(ratios),
                float(np.std(ratios)) if ratios else None,
                _mean([r.wall_clock_micros for r in ok]),
            )
        tacts_ratio = stats.get("tacts", (None, None, None))[0]
        tacts_wall = stats.get("tacts", (None, None, None))[2]
        for algorithm in sorted(by_algorithm, key=ALGORITHMS.index):
            group = by_algorithm[algorithm]
            mean_ratio, std_ratio, mean_wall = stats[algorithm]
            rows.append(
                SummaryRow(
                    algorithm=algorithm,
                    network=network,
                    congestion=congestion,
                    f_c=f_c,
                    episodes=len(group),
                    failures=sum(r.failed for r in group),
                    mean_ratio=mean_ratio,
                    std_ratio=std_ratio,
                    mean_vehicle_time=_mean(
                        [
                            r.realized_vehicle_time
                            for r in group
                            if not r.failed and r.realized_vehicle_time is not None
                        ]
                    ),
                    mean_wall_clock_micros=mean_wall,
                    exec_time_ratio=(
                        mean_wall / tacts_wall
                        if mean_wall is not None and tacts_wall
                        else None
                    ),
                    improvement_vs_tacts_pct=(
                        100.0 * (mean_ratio - tacts_ratio) / tacts_ratio
                        if mean_ratio is not None and tacts_ratio
                        else None
                    ),
                )
            )
    return rows
