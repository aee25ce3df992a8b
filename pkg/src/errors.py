"""Jerarquia de errores del motor de simulacion."""

from __future__ import annotations


class TactsError(Exception):
    """Error base de la aplicacion."""


class ParseError(TactsError, ValueError):
    """El archivo de red no respeta el formato TNTP."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"linea {line_number}: {message}"
        super().__init__(message)


class ValidationError(TactsError, ValueError):
    """Datos de entrada que violan un invariante del dominio."""


class DomainError(TactsError, ValueError):
    """Argumento fuera del dominio de una funcion numerica."""


class PreconditionError(TactsError, ValueError):
    """Se llamo a una operacion sin cumplir su precondicion."""


class ConfigError(TactsError, ValueError):
    """Configuracion de experimento invalida."""


class NoPathError(TactsError):
    """No existe un camino admisible hacia el destino."""


class InternalError(TactsError):
    """Estado inconsistente detectado en tiempo de ejecucion."""


class OracleTooLargeError(TactsError):
    """La busqueda exhaustiva del oraculo excede el limite configurado."""
