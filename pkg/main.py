"""
Laboratorio de Momentos Fraccionarios
=====================================

Punto de entrada de línea de comandos que integra los componentes:
- constants (constantes de regularidad y su caché)
- criterion (un criterio de volumen finito)
- moments (perfil de momentos y ajuste de decaimiento)
- sweep (barrido determinista y reanudable en (λ, E))
- dynamical (perfil de medidas espectrales y evolución temporal)
- verify (suite de verificación)

Códigos de salida: 0 correcto, 1 fallo de comprobación, 2 error de uso o de configuración.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from config_utils import get_logging_config

logger = logging.getLogger(__name__)

from criteria import KINDS, evaluate_criterion
from dynamical import EnergyWindow, dyn_profile
from ensemble import OperatorEnsemble, default_ensemble, load_ensemble
from lattice import box_region, norm_inf
from moments import decay_fit, moment_profile
from regularity import ConstantsCache, user_supplied_constants, write_json_atomic
from resolvent import SpectralParameter
from sweep_cli import ConfigError, SweepConfig, run_sweep, verify_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2


def _pair(text: str) -> List[float]:
    parts = [p.strip() for p in text.split(',')]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"Se esperaba 'a,b', se recibió {text!r}")
    return [float(p) for p in parts]


def _tolerance(text: str) -> tuple:
    if '=' not in text:
        raise argparse.ArgumentTypeError(f"Se esperaba clave=valor, se recibió {text!r}")
    key, value = text.split('=', 1)
    return key.strip(), float(value)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, default=None, help='Archivo TOML/JSON (ensemble o barrido)')
    common.add_argument('--output', type=str, default=None, help='Archivo o directorio de salida')
    common.add_argument('--threads', type=int, default=None, help='Hilos de trabajo')
    common.add_argument('--seed', type=int, default=None, help='Semilla maestra')
    common.add_argument('--log-level', type=str, default=None, help='Nivel de logging')

    parser = argparse.ArgumentParser(prog='fmloc', description='Laboratorio de localización por momentos fraccionarios')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('constants', parents=[common], help='Constantes de regularidad')
    p.add_argument('--s', type=float, default=None)
    p.add_argument('--effort', type=int, default=None)
    p.add_argument('--constants-cache', type=str, default=None)
    p.add_argument('--kappa-tau', type=float, default=None, help='Registra constantes del usuario junto con --c-s')
    p.add_argument('--c-s', type=float, default=None)
    p.add_argument('--d-s', type=float, default=None)

    p = sub.add_parser('criterion', parents=[common], help='Evalúa un criterio')
    p.add_argument('--kind', type=str, required=True)
    p.add_argument('--lambda', dest='lam', type=float, default=None)
    p.add_argument('--energy', type=float, default=0.0)
    p.add_argument('--eta', type=float, default=0.0)
    p.add_argument('--s', type=float, default=None)
    p.add_argument('--L', type=int, default=2)
    p.add_argument('--samples', type=int, default=1000)
    p.add_argument('--effort', type=int, default=None)
    p.add_argument('--constants-cache', type=str, default=None)
    p.add_argument('--strict', action='store_true', help='Código 1 si el criterio no se supera')

    p = sub.add_parser('moments', parents=[common], help='Perfil de momentos y ajuste')
    p.add_argument('--lambda', dest='lam', type=float, default=None)
    p.add_argument('--energy', type=float, default=0.0)
    p.add_argument('--eta', type=float, default=0.0)
    p.add_argument('--s', type=float, default=None)
    p.add_argument('--L', type=int, default=8)
    p.add_argument('--samples', type=int, default=1000)
    p.add_argument('--pool-shells', action='store_true')
    p.add_argument('--window', type=_pair, default=None)

    p = sub.add_parser('sweep', parents=[common], help='Barrido (λ, E)')
    p.add_argument('--constants-cache', type=str, default=None)
    p.add_argument('--no-resume', action='store_true')

    p = sub.add_parser('dynamical', parents=[common], help='Perfil dinámico')
    p.add_argument('--lambda', dest='lam', type=float, default=None)
    p.add_argument('--L', type=int, default=20)
    p.add_argument('--samples', type=int, default=200)
    p.add_argument('--window', type=_pair, default=None, help='Ventana de energías a,b (por defecto R)')
    p.add_argument('--t-max', type=float, default=10.0)
    p.add_argument('--t-steps', type=int, default=50)

    p = sub.add_parser('verify', parents=[common], help='Suite de verificación')
    p.add_argument('--level', choices=('fast', 'full'), default='fast')
    p.add_argument('--tolerance', type=_tolerance, action='append', default=[],
                   help='Sustituye una tolerancia (clave=valor)')
    return parser


def _ensemble(args: argparse.Namespace) -> OperatorEnsemble:
    ensemble = load_ensemble(args.config) if args.config else default_ensemble()
    if getattr(args, 'lam', None) is not None:
        ensemble = ensemble.with_lambda(args.lam)
    if args.seed is not None:
        ensemble = ensemble.with_seed(args.seed)
    return ensemble


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text + '\n', encoding='utf-8')
        logger.info(f"Salida escrita en {output}")
    else:
        print(text)


def cmd_constants(args: argparse.Namespace) -> int:
    ensemble = _ensemble(args)
    cache = ConstantsCache(args.constants_cache)
    dist = ensemble.disorder
    if args.kappa_tau is not None or args.c_s is not None:
        if args.kappa_tau is None or args.c_s is None or args.s is None:
            raise ValueError("Las constantes del usuario requieren --s, --kappa-tau y --c-s")
        supplied = user_supplied_constants(dist.tau, args.s, args.kappa_tau, args.c_s, args.d_s)
        constants = cache.put_user_supplied(dist, args.effort or 0, supplied)
    else:
        constants = cache.get_or_compute(dist, args.s, args.effort, args.seed)
    _emit(json.dumps(dict(constants.to_dict(), fingerprint=constants.fingerprint()), indent=2, sort_keys=True),
          args.output)
    return EXIT_OK


def cmd_criterion(args: argparse.Namespace) -> int:
    if args.kind not in KINDS:
        raise ValueError(f"Tipo de criterio desconocido: {args.kind} (válidos: {', '.join(KINDS)})")
    ensemble = _ensemble(args)
    constants = None
    if args.kind not in ('spectrum_prob', 'multiscale_prob'):
        constants = ConstantsCache(args.constants_cache).get_or_compute(ensemble.disorder, args.s, args.effort)
    params: Dict[str, object] = {'energy': args.energy, 'eta': args.eta, 'L': args.L, 'n': args.samples}
    if args.s is not None:
        params['s'] = args.s
    if args.threads is not None:
        params['threads'] = args.threads
    report = evaluate_criterion(args.kind, ensemble, params, constants)
    _emit(report.to_json(), args.output)
    print(f"{report.kind}: lhs={report.lhs:.6g} ± {report.uncertainty:.2g} / umbral {report.threshold:.6g} -> "
          f"{report.label}", file=sys.stderr)
    return EXIT_CHECK_FAILED if args.strict and not report.passed else EXIT_OK


def cmd_moments(args: argparse.Namespace) -> int:
    ensemble = _ensemble(args)
    s = args.s if args.s is not None else ensemble.disorder.tau / 2
    region = box_region([0] * ensemble.dim, args.L, ensemble.dim)
    origin = [0] * ensemble.dim
    targets = sorted(region, key=lambda y: (norm_inf(y), y))
    profile = moment_profile(ensemble, region, origin, targets, SpectralParameter(args.energy, args.eta), s,
                             args.samples, pool_shells=args.pool_shells, threads=args.threads)
    if args.output:
        profile.to_csv(args.output)
    else:
        print(profile.to_frame().to_csv(index=False), end='')
    fit = decay_fit(profile, tuple(args.window) if args.window else None)
    print(json.dumps(fit.to_dict(), indent=2, sort_keys=True), file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    if not args.config:
        raise ConfigError("El subcomando sweep requiere --config")
    config = SweepConfig.load(args.config, args.output)
    if args.seed is not None or args.no_resume:
        data = config.to_dict()
        if args.seed is not None:
            data['master_seed'] = args.seed
        if args.no_resume:
            data['resume'] = False
        config = SweepConfig.from_dict(data, args.output)
    outcome = run_sweep(config, args.threads, args.constants_cache)
    print(outcome.summary[['lambda', 'energy', 'lhs', 'label']].to_string(index=False))
    print(f"{outcome.computed} celdas calculadas, {outcome.skipped} reanudadas; resumen en {outcome.summary_path}",
          file=sys.stderr)
    return EXIT_OK


def cmd_dynamical(args: argparse.Namespace) -> int:
    ensemble = _ensemble(args)
    region = box_region([0] * ensemble.dim, args.L, ensemble.dim)
    origin = [0] * ensemble.dim
    targets = sorted(region, key=lambda y: (norm_inf(y), y))
    window = EnergyWindow.from_spec(args.window)
    grid = np.linspace(0.0, args.t_max, args.t_steps)
    profile = dyn_profile(ensemble, region, origin, targets, window, grid, args.samples, args.threads)
    if args.output:
        profile.to_csv(args.output)
    else:
        print(profile.to_frame().to_csv(index=False), end='')
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    report = verify_suite(args.level, dict(args.tolerance), args.seed or 0)
    if args.output:
        write_json_atomic(args.output, report.to_dict())
    else:
        print(report.to_json())
    for check in report.checks:
        print(f"{'OK  ' if check.passed else 'FALLO'} {check.name}", file=sys.stderr)
    return report.exit_code


COMMANDS = {
    'constants': cmd_constants,
    'criterion': cmd_criterion,
    'moments': cmd_moments,
    'sweep': cmd_sweep,
    'dynamical': cmd_dynamical,
    'verify': cmd_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    log_config = get_logging_config()
    logging.basicConfig(
        level=(args.log_level or log_config['level']).upper(),
        format=log_config['format'],
        handlers=[logging.StreamHandler(sys.stderr)],
    )
    try:
        return COMMANDS[args.command](args)
    except ValueError as e:
        logger.error(f"Error de uso o de configuración: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except RuntimeError as e:
        logger.error(f"Error en la ejecución de {args.command}: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CHECK_FAILED


if __name__ == "__main__":
    sys.exit(main())
