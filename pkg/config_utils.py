"""
Configuración simplificada usando python-dotenv
"""

import os
from typing import Optional

from dotenv import load_dotenv

# Cargar variables de entorno desde .env
load_dotenv()


def _optional_float(name: str) -> Optional[float]:
    value = os.getenv(name, '').strip()
    return float(value) if value else None


def _optional_int(name: str) -> Optional[int]:
    value = os.getenv(name, '').strip()
    return int(value) if value else None


def _threads(name: str) -> int:
    value = _optional_int(name)
    if value is None:
        return os.cpu_count() or 1
    return max(1, value)


def get_ensemble_config():
    """Configuración por defecto del ensemble de operadores"""
    return {
        'dimension': int(os.getenv('FMLOC_DIMENSION', '1')),
        'hopping': os.getenv('FMLOC_HOPPING', 'nearest_neighbor'),
        't0': float(os.getenv('FMLOC_HOPPING_T0', '1.0')),
        'm': float(os.getenv('FMLOC_HOPPING_M', '1.0')),
        'range': _optional_int('FMLOC_HOPPING_RANGE'),
        'peierls_flux': _optional_float('FMLOC_PEIERLS_FLUX'),
        'disorder': os.getenv('FMLOC_DISORDER', 'uniform'),
        'low': float(os.getenv('FMLOC_DISORDER_LOW', '-1.0')),
        'high': float(os.getenv('FMLOC_DISORDER_HIGH', '1.0')),
        'scale': float(os.getenv('FMLOC_DISORDER_SCALE', '1.0')),
        'tau': float(os.getenv('FMLOC_DISORDER_TAU', '1.0')),
        'lambda': float(os.getenv('FMLOC_LAMBDA', '1.0')),
        'master_seed': int(os.getenv('FMLOC_MASTER_SEED', '20240101'))
    }


def get_solver_config():
    """Configuración del solucionador de resolventes"""
    return {
        'condition_limit': float(os.getenv('FMLOC_CONDITION_LIMIT', '1e14')),
        'residual_tolerance': float(os.getenv('FMLOC_RESIDUAL_TOLERANCE', '1e-10')),
        'dense_oracle_limit': int(os.getenv('FMLOC_DENSE_ORACLE_LIMIT', '200'))
    }


def get_moments_config():
    """Configuración del estimador de momentos fraccionarios"""
    return {
        'threads': _threads('FMLOC_THREADS'),
        'failure_fraction': float(os.getenv('FMLOC_FAILURE_FRACTION', '0.001')),
        'chunk_size': int(os.getenv('FMLOC_CHUNK_SIZE', '64'))
    }


def get_regularity_config():
    """Configuración de la estimación de constantes de regularidad"""
    return {
        'effort': int(os.getenv('FMLOC_EFFORT', '32')),
        'search_seed': int(os.getenv('FMLOC_SEARCH_SEED', '0')),
        'quad_tolerance': float(os.getenv('FMLOC_QUAD_TOLERANCE', '1e-6')),
        'refinement_steps': int(os.getenv('FMLOC_REFINEMENT_STEPS', '12')),
        'kappa_tolerance': float(os.getenv('FMLOC_KAPPA_TOLERANCE', '0.01')),
        'cache_path': os.getenv('FMLOC_CONSTANTS_CACHE', 'constants_cache.json'),
        'threads': _threads('FMLOC_THREADS')
    }


def get_criteria_config():
    """Configuración de los criterios de volumen finito"""
    return {
        'sigma_band': float(os.getenv('FMLOC_SIGMA_BAND', '3.0')),
        'eigen_limit': int(os.getenv('FMLOC_EIGEN_LIMIT', '4000'))
    }


def get_propagate_config():
    """Configuración de la propagación de cotas de decaimiento"""
    return {
        'safety': float(os.getenv('FMLOC_SAFETY', '0.99')),
        'mu_max': float(os.getenv('FMLOC_MU_MAX', '50')),
        'bisection_tolerance': float(os.getenv('FMLOC_BISECTION_TOLERANCE', '1e-9')),
        'ct_tolerance': float(os.getenv('FMLOC_CT_TOLERANCE', '1e-12')),
        'poisson_constant': float(os.getenv('FMLOC_POISSON_CONSTANT', '1.0'))
    }


def get_dynamical_config():
    """Configuración de medidas espectrales"""
    return {
        'degeneracy_tolerance': float(os.getenv('FMLOC_DEGENERACY_TOLERANCE', '1e-10')),
        'eigen_limit': int(os.getenv('FMLOC_EIGEN_LIMIT', '4000'))
    }


def get_sweep_config():
    """Configuración de barridos (λ, E)"""
    return {
        'output_dir': os.getenv('FMLOC_OUTPUT_DIR', 'sweep_output'),
        'threads': _threads('FMLOC_SWEEP_THREADS'),
        'resume': os.getenv('FMLOC_RESUME', 'true').lower() == 'true'
    }


def get_logging_config():
    """Configuración de logging"""
    return {
        'level': os.getenv('LOG_LEVEL', 'INFO'),
        'format': os.getenv('LOG_FORMAT', '%(asctime)s - %(name)s - %(levelname)s - %(message)s')
    }
