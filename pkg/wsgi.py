"""Punto de entrada WSGI de la API de resultados (Gunicorn)."""

from src import create_app
from src.config import ProductionConfig

app = create_app(ProductionConfig)
