"""
Módulo Sweep CLI para fmloc
===========================

Barridos deterministas y reanudables sobre el plano (λ, E), persistidos
celda a celda, y la suite de verificación de identidades y cotas.

Uso básico:
    from sweep_cli import SweepConfig, run_sweep, verify_suite

    config = SweepConfig.load('barrido.toml')
    resultado = run_sweep(config, threads=4)
    print(resultado.summary)

    informe = verify_suite('fast')
    print(informe.exit_code)
"""

from .config_sweep import load_config
from .sweep import (
    SCHEMA_VERSION,
    CellResult,
    ConfigError,
    SweepConfig,
    SweepOutcome,
    cell_path,
    collect_summary,
    resolve_constants,
    run_cell,
    run_sweep,
)
from .verify import DEFAULT_TOLERANCES, LEVELS, CheckResult, VerificationReport, verify_suite

__all__ = [
    'DEFAULT_TOLERANCES',
    'LEVELS',
    'SCHEMA_VERSION',
    'CellResult',
    'CheckResult',
    'ConfigError',
    'SweepConfig',
    'SweepOutcome',
    'VerificationReport',
    'cell_path',
    'collect_summary',
    'load_config',
    'resolve_constants',
    'run_cell',
    'run_sweep',
    'verify_suite',
]

__version__ = '1.0.0'
