"""Permite ``python -m src`` como alternativa a ``flask tacts``."""

import sys

from src.cli import main

sys.exit(main())
