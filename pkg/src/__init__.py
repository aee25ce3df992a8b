"""Configuracion general de la aplicacion Flask."""

import os

from flask import Flask
from flask_cors import CORS
from .config import DevelopmentConfig, configure_logging
from .extensions import db, migrate


def create_app(config_object: type[DevelopmentConfig] = DevelopmentConfig) -> Flask:
    """Crea y configura la aplicacion utilizando application factory."""
    app = Flask(__name__)
    app.config.from_object(config_object)
    configure_logging(app.config["LOG_LEVEL"])

    register_extensions(app)
    register_blueprints(app)
    register_commands(app)
    CORS(app)

    os.makedirs(app.instance_path, exist_ok=True)
    with app.app_context():
        # Los modelos deben estar importados antes de crear las tablas.
        from . import models  # noqa: F401

        db.create_all()

    return app


def register_extensions(app: Flask) -> None:
    """Inicializa extensiones de terceros."""
    db.init_app(app)
    migrate.init_app(app, db)


def register_blueprints(app: Flask) -> None:
    """Registra los blueprints del proyecto."""
    from .api import register_api_blueprints

    register_api_blueprints(app)


def register_commands(app: Flask) -> None:
    """Expone la CLI de simulacion como ``flask tacts``."""
    from .cli import cli

    app.cli.add_command(cli, "tacts")
