"""Endpoints de verificacion rapida de la API."""

from flask import Blueprint, current_app, jsonify
from sqlalchemy import text

from src.extensions import db

bp = Blueprint("health", __name__, url_prefix="/health")


@bp.get("/")
def healthcheck():
    """Devuelve el estado de la aplicacion y de la base de datos."""
    try:
        db.session.execute(text("SELECT 1"))
        database = "ok"
    except Exception as e:
        current_app.logger.warning("health database check failed error=%s", e)
        database = "unavailable"
    status = "ok" if database == "ok" else "degraded"
    return jsonify({"status": status, "database": database}), 200 if status == "ok" else 503
