"""Registro centralizado de blueprints."""

from flask import Flask


def register_api_blueprints(app: Flask) -> None:
    """Agrega todos los blueprints disponibles a la aplicacion."""
    from .experiments import bp as experiments_bp
    from .health import bp as health_bp
    from .networks import bp as networks_bp

    app.register_blueprint(health_bp)
    app.register_blueprint(experiments_bp)
    app.register_blueprint(networks_bp)


__all__ = ["register_api_blueprints"]
