"""
Entry point para ejecutar el paquete como modulo.

Uso: python -m risk_sharing allocate --spec specs/var_mean.json
"""

import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main())
