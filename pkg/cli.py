"""
Command line front end for the Leibniz algebra kernel

Exit codes: 0 pass, 1 a check failed, 2 usage error or hypothesis violation,
3 malformed input file.
"""

import argparse
import json
import logging
import os
import sys

from config.settings import get_settings
from config.suite_profiles import list_profiles
from services.algebra import (
    derived_series,
    is_lie,
    leibniz_kernel,
    left_centre,
    lower_central_series,
    validate,
)
from services.bimodule import composition_series, restrict_to
from services.checker import (
    Status,
    SuiteConfig,
    run_suite,
    verify_corollary,
    verify_lemma1,
    verify_lemma2,
    verify_restricted_schur,
    verify_theorem1,
    verify_theorem2,
)
from services.constructions import catalogue
from services.errors import HypothesisViolationError, LeibnizKernelError, ParseError
from services.excel_exporter import ExcelExporter
from services.exact_linalg import field_from_token
from services.file_formats import (
    format_algebra,
    format_bimodule,
    format_rows,
    parse_subspace,
    read_algebra,
    read_bimodule,
    write_text,
)
from services.subnormal import residual_ideal_check, subnormal_chain

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_PARSE = 3

CHECK_KINDS = ('lemma1', 'theorem1', 'schur', 'lemma2', 'corollary', 'theorem2')
COROLLARY_CHECKS = ('RL<=R', 'U^(r+s)L<=lambda^(r+s)L', 'lambda^(r+s)L<=U^s')


def configure_logging(verbose=False):
    """Log to stderr only; timestamps appear with --verbose"""
    if verbose:
        level, fmt = logging.DEBUG, '%(asctime)s %(levelname)s %(name)s: %(message)s'
    else:
        level, fmt = get_settings().log_level, '%(levelname)s %(name)s: %(message)s'
    logging.basicConfig(level=level, format=fmt, stream=sys.stderr, force=True)


def _sub(args, alg, attr='sub'):
    text = getattr(args, attr, None)
    return alg.full() if text is None else parse_subspace(text, alg)


def _dims(spaces):
    return ' '.join(str(s.dim) for s in spaces)


def _basis(space):
    return format_rows(space) if space.dim else '0'


def cmd_validate(args):
    alg = read_algebra(args.algebra, check=False)
    violations = validate(alg)
    for violation in violations:
        print(violation.describe(alg.field))
    if violations:
        print(f"INVALID: {len(violations)} violating basis triple(s)")
        return EXIT_CHECK_FAILED
    print(f"valid left Leibniz algebra: {alg}")
    return EXIT_OK


def cmd_series(args):
    alg = read_algebra(args.algebra)
    u = _sub(args, alg)
    series = lower_central_series(alg, u)
    print(f"lower central series dims: {_dims(series.terms)}")
    print(f"stabilized at: {series.stabilized_at}")
    print(f"residual dim: {series.residual.dim}")
    print(f"residual basis: {_basis(series.residual)}")
    print(f"nilpotent: {'yes' if series.residual.is_zero() else 'no'}")
    if args.sub is None:
        print(f"derived series dims: {_dims(derived_series(alg))}")
        print(f"left centre dim: {left_centre(alg).dim}")
        print(f"leibniz kernel dim: {leibniz_kernel(alg).dim}")
        print(f"lie: {'yes' if is_lie(alg) else 'no'}")
    return EXIT_OK


def cmd_subnormal(args):
    alg = read_algebra(args.algebra)
    report = subnormal_chain(alg, parse_subspace(args.sub, alg))
    print(report.describe())
    for index, term in enumerate(report.chain):
        print(f"W{index}: {_basis(term)}")
    return EXIT_OK


def cmd_residual_check(args):
    alg = read_algebra(args.algebra)
    u = parse_subspace(args.sub, alg)
    report = residual_ideal_check(alg, u, report_only=args.report_only)
    if report.subnormal:
        print(f"defect r: {report.defect}")
    else:
        print("report-only: subalgebra is NOT SUBNORMAL")
    print(f"stabilized at s: {report.stabilized_at}")
    print(f"residual basis: {_basis(report.residual)}")
    for name, ok in report.checks.items():
        family = 'corollary' if name in COROLLARY_CHECKS else 'theorem2'
        print(f"{family} {name} {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def cmd_compfactors(args):
    alg = read_algebra(args.algebra)
    v = read_bimodule(args.bimodule, alg)
    if args.sub is not None:
        v = restrict_to(v, parse_subspace(args.sub, alg))
    report = composition_series(v, get_settings().enumeration_cap)
    print(f"series dims: {_dims(report.series)}")
    print(f"factor dims: {' '.join(map(str, report.factor_dims)) or '-'}")
    classes = ' '.join('[' + ','.join(map(str, cls)) + ']' for cls in report.iso_classes)
    print(f"iso classes: {len(report.iso_classes)} {classes}".rstrip())
    return EXIT_OK


def _fields(values):
    if not values:
        return None
    tokens = [t.strip() for value in values for t in value.split(',') if t.strip()]
    for token in tokens:
        field_from_token(token)
    return tokens


def cmd_verify(args):
    settings = get_settings()
    config = SuiteConfig.from_profile(
        args.profile,
        fields=_fields(args.field),
        max_dim=args.max_dim,
        budget=args.budget,
        seed=args.seed,
        k_max=args.k_max,
        drop_hypotheses=True if args.drop_hypotheses else None,
        jobs=args.jobs,
        failures_dir=args.failures_dir or os.path.join(settings.output_dir, 'failures'),
        include_catalogue=False if args.no_catalogue else None,
    )
    report = run_suite(config)
    text = report.to_text()
    sys.stdout.write(text)
    if args.report:
        write_text(args.report, text)
    if args.json:
        write_text(args.json, json.dumps(report.to_dict(), indent=2) + '\n')
    if args.excel:
        ExcelExporter().export_suite_report(report.to_dict(), args.excel)
    for path in report.artifacts:
        logger.info("failure artifact %s", path)
    return report.exit_status()


def cmd_catalogue(args):
    field = field_from_token(args.field)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    for entry in catalogue(field):
        facts = entry.facts()
        names = ','.join(v.name for v in entry.bimodules) or '-'
        print(f"{entry.name} dim={entry.algebra.dim} lie={facts['is_lie']} nilpotent={facts['nilpotent']} "
              f"residual_dim={facts['residual_dim']} bimodules={names}")
        if args.out:
            write_text(os.path.join(args.out, f"{entry.name}.alg"), format_algebra(entry.algebra))
            for v in entry.bimodules:
                write_text(os.path.join(args.out, f"{entry.name}__{v.name}.bimod"), format_bimodule(v))
    return EXIT_OK


def cmd_check(args):
    """Re-run a single check, as written into failure artifacts"""
    alg = read_algebra(args.algebra)
    instance_id = os.path.splitext(os.path.basename(args.algebra))[0]
    cap = get_settings().enumeration_cap
    needs_bimodule = args.kind in ('lemma1', 'theorem1', 'schur')
    if needs_bimodule and not args.bimodule:
        raise ValueError(f"check {args.kind} needs a bimodule file")
    v = read_bimodule(args.bimodule, alg) if needs_bimodule else None

    if args.kind == 'lemma1':
        result = verify_lemma1(alg, v, cap, instance_id)
    elif args.kind == 'theorem1':
        result = verify_theorem1(alg, _sub(args, alg), v, cap, instance_id)
    elif args.kind == 'schur':
        result = verify_restricted_schur(alg, _sub(args, alg), v, cap, instance_id)
    elif args.kind == 'lemma2':
        result = verify_lemma2(alg, _sub(args, alg), _sub(args, alg, 'v'), args.k_max, instance_id)
    elif args.kind == 'corollary':
        result = verify_corollary(alg, _sub(args, alg), instance_id)
    else:
        result = verify_theorem2(alg, _sub(args, alg), instance_id)
    print(result.line())
    return EXIT_CHECK_FAILED if result.status == Status.FAIL else EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog='cli.py', description='Exact computations in left Leibniz algebras')
    parser.add_argument('--verbose', action='store_true', help='debug logging with timestamps on stderr')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('validate', help='check the left Leibniz identity')
    p.add_argument('algebra')
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser('series', help='lower central series and nilpotent residual')
    p.add_argument('algebra')
    p.add_argument('--sub', help='subalgebra rows, e.g. "1,0,0; 0,0,1"')
    p.set_defaults(handler=cmd_series)

    p = sub.add_parser('subnormal', help='canonical subnormal chain')
    p.add_argument('algebra')
    p.add_argument('--sub', required=True)
    p.set_defaults(handler=cmd_subnormal)

    p = sub.add_parser('residual-check', help='ideality of the nilpotent residual')
    p.add_argument('algebra')
    p.add_argument('--sub', required=True)
    p.add_argument('--report-only', action='store_true', help='run even if the subalgebra is not subnormal')
    p.set_defaults(handler=cmd_residual_check)

    p = sub.add_parser('compfactors', help='composition factors of a bimodule (GF(p) only)')
    p.add_argument('algebra')
    p.add_argument('bimodule')
    p.add_argument('--sub', help='restrict to this subalgebra first')
    p.set_defaults(handler=cmd_compfactors)

    profiles = [profile['id'] for profile in list_profiles()]
    p = sub.add_parser('verify', help='run the verification suite')
    p.add_argument('--profile', default='default', choices=profiles)
    p.add_argument('--field', action='append', help='p for GF(p) or q; repeat or comma separate')
    p.add_argument('--max-dim', type=int)
    p.add_argument('--budget', type=int, help='generated instances per field')
    p.add_argument('--seed', type=int)
    p.add_argument('--k-max', type=int)
    p.add_argument('--jobs', type=int, default=1)
    p.add_argument('--drop-hypotheses', action='store_true',
                   help='run the residual checks on non-subnormal subalgebras in report-only mode')
    p.add_argument('--no-catalogue', action='store_true', help='generated instances only')
    p.add_argument('--report', help='also write the text report here')
    p.add_argument('--json', help='write the report as JSON')
    p.add_argument('--excel', help='write the report as an .xlsx workbook')
    p.add_argument('--failures-dir', help='where failure artifacts go')
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser('catalogue', help='list catalogue entries and optionally write their files')
    p.add_argument('--field', default='q')
    p.add_argument('--out', help='directory for .alg and .bimod files')
    p.set_defaults(handler=cmd_catalogue)

    p = sub.add_parser('check', help='re-run one check on saved files')
    p.add_argument('kind', choices=CHECK_KINDS)
    p.add_argument('algebra')
    p.add_argument('bimodule', nargs='?')
    p.add_argument('--sub')
    p.add_argument('--v', help='subspace rows for lemma2')
    p.add_argument('--k-max', type=int, default=8)
    p.set_defaults(handler=cmd_check)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except HypothesisViolationError as e:
        print(f"hypothesis violation: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (LeibnizKernelError, ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == '__main__':
    sys.exit(main())
