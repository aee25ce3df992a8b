"""Coleccion de modelos disponibles en la aplicacion."""

from .experiment import Experiment  # noqa: F401
from .experiment_record import ExperimentRecord  # noqa: F401

__all__ = ["Experiment", "ExperimentRecord"]
