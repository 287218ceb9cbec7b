#!/usr/bin/env python3
"""
robustkit command line.

    robustkit [--tol-file F] [--log-level L] <command> ...

Commands print one JSON report to stdout; diagnostics go to stderr.
Exit codes: 0 success, 1 self-test or numerical failure, 2 parse/validation
error, 3 unsupported input.
"""

import argparse
import logging
import sys
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional

from .config import Tolerances, load_tolerances
from .errors import RobustkitError, UnsupportedInputError, ValidationError
from .logger import setup_logging
from .oracle_search import SearchConfig, estimate_O_g, max_a_for_mixer
from .ppt import Verdict, min_pt_eigenvalue, negativity, partial_transpose, separability_verdict
from .robustness import gershgorin_mixer, robustness_pure, witness_bound_a
from .selftest import SelfTest
from .statefile import StateFile, canonical_json, complex_pairs, file_digest, read_state, write_state
from .states import DensityMatrix, Ket, density_to_ket, ket_to_density, schmidt

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Report:
    command: Dict[str, Any]
    input_digest: Dict[str, str]
    result: Dict[str, Any]
    tolerances: Dict[str, Any]
    passed: bool = True

    def to_json(self) -> str:
        return canonical_json(asdict(self))


def _as_density(state_file: StateFile) -> DensityMatrix:
    state = state_file.state
    return ket_to_density(state) if isinstance(state, Ket) else state


def _as_ket(state_file: StateFile, tolerances: Tolerances, mixed_message: str) -> Ket:
    state = state_file.state
    if isinstance(state, Ket):
        return state
    try:
        return density_to_ket(state, tolerances)
    except UnsupportedInputError:
        raise UnsupportedInputError(mixed_message)


def _schmidt_dict(sd) -> Dict:
    return {
        'coeffs': [float(c) for c in sd.coeffs],
        'rank': sd.rank,
        'basis_a': complex_pairs(sd.basis_a),
        'basis_b': complex_pairs(sd.basis_b),
    }


def cmd_schmidt(args, tolerances: Tolerances) -> Dict:
    psi = _as_ket(read_state(args.input, tolerances), tolerances, "schmidt needs a pure state")
    return {'schmidt': _schmidt_dict(schmidt(psi, tolerances))}


def cmd_robustness(args, tolerances: Tolerances) -> Dict:
    state_file = read_state(args.input, tolerances)
    psi = _as_ket(state_file, tolerances, "mixed-state R_g unsupported")
    report = robustness_pure(schmidt(psi, tolerances).coeffs, tolerances)
    return {
        'robustness': {
            'R_s': report.R_s,
            'R_g': report.R_g,
            'O_s': report.O_s,
            'O_g': report.O_g,
            'schmidt_coeffs': [float(c) for c in report.schmidt_coeffs],
            'negativity': negativity(ket_to_density(psi)),
        }
    }


def cmd_mixer(args, tolerances: Tolerances) -> Dict:
    psi = _as_ket(read_state(args.input, tolerances), tolerances, "mixer construction needs a pure state")
    report = gershgorin_mixer(schmidt(psi, tolerances), tolerances)

    out = Path(args.out)
    mixer_path = write_state(out / 'mixer.json', report.mixer)
    mixture_path = write_state(out / 'mixture.json', report.mixture)
    return {
        'mixer': {
            'bound_a': report.bound_a,
            'mixer_is_ppt': report.mixer_is_ppt,
            'mixer_min_pt_eigenvalue': min_pt_eigenvalue(report.mixer.mat, report.mixer.n),
            'mixture_is_ppt': report.mixture_is_ppt,
            'mixture_verdict': report.mixture_verdict.value,
            'files': {
                'mixer': {'path': str(mixer_path), 'sha256': file_digest(mixer_path)},
                'mixture': {'path': str(mixture_path), 'sha256': file_digest(mixture_path)},
            },
        }
    }


def cmd_verify(args, tolerances: Tolerances) -> Dict:
    if not 0.0 <= args.a <= 1.0:
        raise ValidationError(f"a must be in [0, 1], got {args.a}")
    state_file = read_state(args.state, tolerances)
    rho = _as_density(state_file)
    rho_m = _as_density(read_state(args.mixer, tolerances))
    if rho.n != rho_m.n:
        raise ValidationError(f"state acts on n={rho.n}, mixer on n={rho_m.n}")

    mixture = DensityMatrix(rho.n, args.a * rho.mat + (1 - args.a) * rho_m.mat)
    verdict = separability_verdict(mixture, tolerances.ppt_tol)
    window = max_a_for_mixer(rho, rho_m, tol=tolerances.ppt_tol)

    bound = None
    try:
        sd = schmidt(density_to_ket(rho, tolerances), tolerances)
        bound = witness_bound_a(sd, rho_m, tolerances)
    except UnsupportedInputError:
        logger.info("state is mixed; witness bound not reported")

    return {
        'verify': {
            'a': args.a,
            'mixture_is_ppt': verdict is not Verdict.ENTANGLED,
            'mixture_verdict': verdict.value,
            'mixture_min_pt_eigenvalue': min_pt_eigenvalue(mixture.mat, mixture.n),
            'mixer_verdict': separability_verdict(rho_m, tolerances.ppt_tol).value,
            'witness_bound_a': bound,
            'max_ppt_a': window.a if window.feasible else None,
        }
    }


def cmd_estimate(args, tolerances: Tolerances) -> Dict:
    rho = _as_density(read_state(args.input, tolerances))
    config = SearchConfig(iterations=args.iters, seed=args.seed,
                          include_gershgorin_seed=not args.no_gershgorin_seed)
    result = estimate_O_g(rho, config, tolerances=tolerances)

    expected = None
    try:
        sd = schmidt(density_to_ket(rho, tolerances), tolerances)
        expected = robustness_pure(sd.coeffs, tolerances).O_g
    except UnsupportedInputError:
        pass

    return {
        'estimate': {
            'best_a': result.best_a,
            'R_estimate': 1.0 / result.best_a - 1.0 if result.best_a > 0 else None,
            'expected_O_g': expected,
            'ppt_relaxation': result.ppt_relaxation,
            'evaluations': result.evaluations,
            'improvements': len(result.trace) - 1,
            'best_mixer': complex_pairs(result.best_mixer.mat),
        }
    }


def _corrupted_partial_transpose(mat, n: int):
    return mat


def cmd_selftest(args, tolerances: Tolerances) -> Dict:
    hook = _corrupted_partial_transpose if args.inject_fault else partial_transpose
    suite = SelfTest(n=args.n, trials=args.trials, seed=args.seed,
                     config=SearchConfig(iterations=args.iters), tolerances=tolerances,
                     partial_transpose=hook)
    report = suite.run()
    return {'selftest': report.to_dict(), 'passed': report.passed}


COMMANDS = {
    'schmidt': cmd_schmidt,
    'robustness': cmd_robustness,
    'mixer': cmd_mixer,
    'verify': cmd_verify,
    'estimate': cmd_estimate,
    'selftest': cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='robustkit',
                                     description='Robustness of entanglement for bipartite pure states')
    parser.add_argument('--tol-file', help='JSON object of tolerance overrides')
    parser.add_argument('--log-level', help='DEBUG, INFO, WARNING or ERROR (default from ROBUSTKIT_LOG_LEVEL)')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('schmidt', help='Schmidt coefficients, bases and rank')
    p.add_argument('input', help='state file')

    p = sub.add_parser('robustness', help='R_s, R_g, O_s and O_g of a pure state')
    p.add_argument('input', help='state file')

    p = sub.add_parser('mixer', help='Gershgorin optimal mixer; writes mixer.json and mixture.json')
    p.add_argument('input', help='state file')
    p.add_argument('--out', default='out', help='output directory (default: out)')

    p = sub.add_parser('verify', help='PPT check of a·ρ + (1-a)·ρ_M')
    p.add_argument('state', help='state file')
    p.add_argument('mixer', help='mixer state file')
    p.add_argument('--a', type=float, required=True, help='mixing weight in [0, 1]')

    p = sub.add_parser('estimate', help='numeric oracle for the optimal mixing weight')
    p.add_argument('input', help='state file')
    p.add_argument('--iters', type=int, default=2000, help='hill-climbing iterations')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--no-gershgorin-seed', action='store_true', help='start from the maximally mixed state only')

    p = sub.add_parser('selftest', help='run the invariant suite')
    p.add_argument('--n', type=int, default=2, help='local dimension')
    p.add_argument('--trials', type=int, default=10)
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--iters', type=int, default=300, help='search iterations per main-theorem trial')
    p.add_argument('--inject-fault', action='store_true', help=argparse.SUPPRESS)
    return parser


def _command_echo(args) -> Dict:
    return {key: value for key, value in sorted(vars(args).items()) if key not in ('log_level',)}


def _input_digests(args) -> Dict[str, str]:
    digests = {}
    for key in ('input', 'state', 'mixer', 'tol_file'):
        path = getattr(args, key, None)
        if path and Path(path).is_file():
            digests[key] = file_digest(path)
    return digests


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)

    try:
        tolerances = load_tolerances(args.tol_file)
        logger.info(f"robustkit {args.command} started")
        result = COMMANDS[args.command](args, tolerances)
    except RobustkitError as e:
        logger.error(f"{args.command}: {e}")
        return e.exit_code

    passed = result.pop('passed', True)
    report = Report(_command_echo(args), _input_digests(args), result, tolerances.to_dict(), passed)
    sys.stdout.write(report.to_json() + '\n')
    logger.info(f"robustkit {args.command} finished")
    return 0 if passed else 1


if __name__ == '__main__':
    sys.exit(main())
