"""Comandos de linea para correr experimentos, validar redes y el ejemplo de dos caminos."""

from __future__ import annotations

import json
import logging
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - Python 3.10
    import tomli as tomllib
from pathlib import Path
from typing import Any, Callable

import click

from src.config import configure_logging
from src.errors import ConfigError, ParseError, TactsError, ValidationError
from src.simulation.fixtures import run_two_path_example
from src.simulation.harness import (
    ALGORITHMS,
    CONGESTION_LEVELS,
    FC_VALUES,
    ExperimentConfig,
    SummaryRow,
    aggregate,
    run_experiment,
    run_sweep,
)
from src.simulation.network import (
    DEFAULT_MAX_PATH_EDGES,
    TrafficNetwork,
    enumerate_commodities,
    load_network,
)
from src.simulation.results import emit_results

logger = logging.getLogger(__name__)

# Claves del archivo de configuracion -> nombre del parametro de click.
_FILE_KEYS = {
    "network_path": "network",
    "congestion_level": "congestion",
    "f_c": "fc",
    "repetitions": "reps",
    "algorithms": "algos",
    "base_seed": "seed",
    "modality_count_range": "modalities",
    "N": "n",
    "doc_threshold": "doc_gamma",
}


def read_config_file(path: str | Path) -> dict[str, Any]:
    """Lee un archivo JSON o TOML con las mismas claves que las banderas."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    try:
        data = tomllib.loads(text) if path.suffix == ".toml" else json.loads(text)
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"{path}: archivo de configuracion invalido ({exc}).") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: se esperaba un objeto de claves.")
    defaults: dict[str, Any] = {}
    for key, value in data.items():
        name = key.replace("-", "_")
        name = _FILE_KEYS.get(name, name)
        if name == "modalities" and not isinstance(value, str):
            value = f"{value[0]}:{value[1]}"
        elif name in {"algos", "congestion_levels", "fc_values"} and not isinstance(value, str):
            value = ",".join(str(item) for item in value)
        defaults[name] = value
    return defaults


def _load_config(ctx: click.Context, param: click.Parameter, value: str | None) -> None:
    if value is None:
        return
    try:
        defaults = read_config_file(value)
    except (ConfigError, OSError) as exc:
        raise click.BadParameter(str(exc), ctx=ctx, param=param) from exc
    ctx.default_map = {**(ctx.default_map or {}), **defaults}


def experiment_options(func: Callable) -> Callable:
    """Banderas compartidas por ``run`` y ``sweep``."""
    options = [
        click.option(
            "--config",
            type=click.Path(exists=True, dir_okay=False),
            callback=_load_config,
            is_eager=True,
            expose_value=False,
            help="Archivo JSON o TOML; las banderas tienen prioridad.",
        ),
        click.option("--network", type=click.Path(dir_okay=False), required=True),
        click.option("--reps", type=int, default=1, show_default=True),
        click.option("--algos", default=",".join(ALGORITHMS), show_default=True),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option(
            "--out",
            type=click.Path(file_okay=False),
            envvar="TACTS_RESULTS_DIR",
            default="results",
            show_default=True,
        ),
        click.option("--modalities", default="2:6", show_default=True, help="Rango lo:hi."),
        click.option("--N", "n", type=int, default=2, show_default=True),
        click.option("--epsilon", type=float, default=0.01, show_default=True),
        click.option(
            "--max-path-edges", type=int, default=DEFAULT_MAX_PATH_EDGES, show_default=True
        ),
        click.option("--doc-window", type=int, default=2, show_default=True),
        click.option("--doc-gamma", type=int, default=1, show_default=True),
        click.option(
            "--tasr-prior",
            type=click.Choice(["uniform", "true-trust"]),
            default="uniform",
            show_default=True,
        ),
        click.option("--sc-modality", type=int, default=None),
        click.option("--workers", type=int, default=1, show_default=True),
        click.option("--save/--no-save", default=False, help="Guarda el experimento en la base."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _experiment_config(options: dict[str, Any], **overrides: Any) -> ExperimentConfig:
    data = {
        "network_path": options["network"],
        "repetitions": options["reps"],
        "algorithms": options["algos"],
        "base_seed": options["seed"],
        "modality_count_range": options["modalities"],
        "N": options["n"],
        "epsilon": options["epsilon"],
        "max_path_edges": options["max_path_edges"],
        "doc_window": options["doc_window"],
        "doc_gamma": options["doc_gamma"],
        "tasr_prior": options["tasr_prior"],
        "sc_modality": options["sc_modality"],
        "workers": options["workers"],
        **overrides,
    }
    return ExperimentConfig.from_mapping(data)


def _load_network(path: str) -> TrafficNetwork:
    """Lee la red; archivo ausente o mal formado es un error de configuracion."""
    try:
        return load_network(path)
    except (FileNotFoundError, IsADirectoryError) as exc:
        raise ConfigError(f"{path}: no existe el archivo de red.") from exc
    except (ParseError, ValidationError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def _csv_list(ctx: click.Context, param: click.Parameter, value: str) -> list[str]:
    items = [item.strip() for item in value.split(",") if item.strip()]
    if not items:
        raise click.BadParameter("se requiere al menos un valor.", ctx=ctx, param=param)
    return items


def _congestion_list(ctx: click.Context, param: click.Parameter, value: str) -> list[str]:
    levels = _csv_list(ctx, param, value)
    unknown = [level for level in levels if level not in CONGESTION_LEVELS]
    if unknown:
        raise click.BadParameter(
            f"niveles desconocidos: {', '.join(unknown)}.", ctx=ctx, param=param
        )
    return levels


def _float_list(ctx: click.Context, param: click.Parameter, value: str) -> list[float]:
    try:
        return [float(item) for item in _csv_list(ctx, param, value)]
    except ValueError as exc:
        raise click.BadParameter(f"valores invalidos: {value!r}.", ctx=ctx, param=param) from exc


def _print_summary(summary: list[SummaryRow]) -> None:
    click.echo(
        f"{'algoritmo':<8} {'red':<16} {'congestion':<10} {'f_c':>6} {'razon':>9} {'desv':>9} "
        f"{'fallas':>6}"
    )
    for row in summary:
        ratio = "-" if row.mean_ratio is None else f"{row.mean_ratio:.4f}"
        std = "-" if row.std_ratio is None else f"{row.std_ratio:.4f}"
        click.echo(
            f"{row.algorithm:<8} {row.network:<16} {row.congestion:<10} {row.f_c:>6.1f} "
            f"{ratio:>9} {std:>9} {row.failures:>6}"
        )


def _finish(cfg: ExperimentConfig, records, out: str, save: bool) -> None:
    summary = aggregate(records)
    paths = emit_results(records, summary, out)
    _print_summary(summary)
    for path in paths:
        click.echo(f"escrito {path}")
    if save:
        from src import create_app
        from src.api.experiments import ExperimentService

        app = create_app()
        with app.app_context():
            experiment = ExperimentService().save_experiment(cfg, records)
        click.echo(f"experimento guardado id={experiment['id']}")


@click.group(name="tacts")
@click.option(
    "--log-level",
    envvar="LOG_LEVEL",
    default="INFO",
    show_default=True,
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
)
def cli(log_level: str) -> None:
    """Simulador de ruteo con control compartido entre modalidades."""
    configure_logging(log_level)


@cli.command("run")
@click.option(
    "--congestion",
    type=click.Choice(list(CONGESTION_LEVELS)),
    default="medium",
    show_default=True,
)
@click.option("--fc", type=float, default=10.0, show_default=True)
@experiment_options
def run_command(congestion: str, fc: float, save: bool, out: str, **options: Any) -> None:
    """Corre un experimento (una celda congestion x f_c)."""
    cfg = _experiment_config(options, congestion_level=congestion, f_c=fc)
    _load_network(cfg.network_path)
    records = run_experiment(cfg)
    _finish(cfg, records, out, save)


@cli.command("sweep")
@click.option(
    "--congestion-levels",
    default=",".join(CONGESTION_LEVELS),
    show_default=True,
    callback=_congestion_list,
)
@click.option(
    "--fc-values",
    default=",".join(str(v) for v in FC_VALUES),
    show_default=True,
    callback=_float_list,
)
@experiment_options
def sweep_command(
    congestion_levels: list[str], fc_values: list[float], save: bool, out: str, **options: Any
) -> None:
    """Corre la grilla completa de celdas congestion x f_c."""
    cfg = _experiment_config(options, congestion_level=congestion_levels[0], f_c=fc_values[0])
    _load_network(cfg.network_path)
    records = run_sweep(cfg, congestion_levels, fc_values)
    _finish(cfg, records, out, save)


@cli.command("validate")
@click.option("--network", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option(
    "--max-path-edges", type=int, default=DEFAULT_MAX_PATH_EDGES, show_default=True
)
def validate_command(network: str, max_path_edges: int) -> None:
    """Lee la red e informa nodos, arcos y commodities."""
    net = _load_network(network)
    commodities = enumerate_commodities(net, max_path_edges)
    click.echo(f"nodos={len(net.nodes)} arcos={net.edge_count} commodities={len(commodities)}")


@cli.command("example-4c")
@click.option("--json", "as_json", is_flag=True, help="Un registro JSON por paso.")
def example_command(as_json: bool) -> None:
    """Ejemplo de dos caminos con la modalidad 2 forzada en el primer paso."""
    result = run_two_path_example()
    if as_json:
        click.echo(result.to_jsonl(), nl=False)
        return
    for step in result.steps:
        strategy = ", ".join(f"{m}:{p:g}" for m, p in step.strategy_after.items())
        click.echo(
            f"k={step.step} modalidad={step.active_modality} arco={step.chosen_edge} "
            f"preferido={step.system_preferred_edge} regret={step.regret:g} "
            f"normalizado={step.normalized_regret:g} estrategia={{{strategy}}}"
        )
    click.echo(f"tiempo total realizado={result.realized_total_time:g}")


def main(argv: list[str] | None = None) -> int:
    """Ejecuta la CLI y traduce errores a codigos de salida.

    0 exito; 1 uso o configuracion (incluye red inexistente o mal formada);
    2 falla de simulacion o de escritura de resultados.
    """
    try:
        result = cli.main(args=argv, prog_name="tacts", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Abortado.", err=True)
        return 1
    except click.ClickException as exc:
        exc.show()
        return 1
    except ConfigError as exc:
        click.echo(f"Error de configuracion: {exc}", err=True)
        return 1
    except (TactsError, OSError) as exc:
        logger.debug("cli failure", exc_info=True)
        click.echo(f"Error: {exc}", err=True)
        return 2
    return result if isinstance(result, int) else 0


if __name__ == "__main__":
    sys.exit(main())
