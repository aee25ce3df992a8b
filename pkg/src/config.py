"""Configuraciones base para los distintos entornos."""

from __future__ import annotations

import logging
import os
from pathlib import Path

from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent
INSTANCE_PATH = BASE_DIR / "instance"

load_dotenv(BASE_DIR / ".env")

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


def configure_logging(level: str | int = "INFO") -> None:
    """Fija el nivel del logger raiz; se llama desde la app y desde la CLI."""
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger().setLevel(level)


class BaseConfig:
    """Config comun a cualquier entorno."""

    SECRET_KEY = os.getenv("SECRET_KEY", "change-me")
    SQLALCHEMY_DATABASE_URI = os.getenv(
        "DATABASE_URL",
        f"sqlite:///{INSTANCE_PATH / 'app.db'}",
    )
    SQLALCHEMY_TRACK_MODIFICATIONS = False
    JSON_SORT_KEYS = False
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")
    # Redes que la API puede usar por nombre de archivo.
    NETWORKS_DIR = os.getenv("TACTS_NETWORKS_DIR", str(BASE_DIR / "data"))
    # Tope de repeticiones para experimentos lanzados por HTTP (corren en el request).
    API_MAX_REPETITIONS = int(os.getenv("API_MAX_REPETITIONS", "50"))


class DevelopmentConfig(BaseConfig):
    """Config pensada para desarrollo local."""

    DEBUG = True
    LOG_LEVEL = os.getenv("LOG_LEVEL", "DEBUG")


class TestingConfig(BaseConfig):
    """Config utilizada al ejecutar tests automaticos."""

    TESTING = True
    SQLALCHEMY_DATABASE_URI = "sqlite:///:memory:"
    LOG_LEVEL = "WARNING"
    API_MAX_REPETITIONS = 3


class ProductionConfig(BaseConfig):
    """Config preparada para despliegues en produccion."""

    DEBUG = False
    TESTING = False
