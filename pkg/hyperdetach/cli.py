"""
Command-Line Interface

    python -m hyperdetach generate | detach | factorize | verify | split

Exit codes: 0 ok, 1 verification or audit failure, 2 refused or infeasible
(structured JSON on standard error), 3 usage or input error.
"""

from typing import Any, Dict, List, Optional, Tuple
import argparse
import json
import logging
import sys

from hyperdetach import DetachConfig, __version__
from hyperdetach.audit import StepAudit
from hyperdetach.designs import DesignSpec, FactorSpec, design_for
from hyperdetach.detachment import run_detachment
from hyperdetach.exceptions import (
    DomainError,
    FactorizationRefused,
    PreconditionError,
    SchemaError,
)
from hyperdetach.generators import random_instance
from hyperdetach.laminar import fair_split
from hyperdetach.pipeline import factorize
from hyperdetach.serialization import (
    ArtifactStore,
    artifact_kind,
    design_artifact,
    detachment_artifact,
    factorization_artifact,
    instance_artifact,
    parse_amalgamation,
    parse_design_spec,
    parse_factor_spec,
    parse_hypergraph,
    parse_number_function,
    parse_split_request,
    read_document,
    split_artifact,
    write_document,
    write_json_lines,
)
from hyperdetach.verification import (
    VerificationReport,
    verify_design,
    verify_detachment,
    verify_factorization,
    verify_split,
)

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_REFUSED = 2
EXIT_USAGE = 3


class UsageError(Exception):
    """Raised by the parser instead of exiting with status 2"""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _int_vector(text: str) -> Tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog='hyperdetach', description="Hypergraph detachment and design factorization")
    parser.add_argument('--version', action='version', version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest='command', required=True, parser_class=_Parser)

    def design_flags(sub: argparse.ArgumentParser, required: bool) -> None:
        sub.add_argument('--n', type=int, required=required, help="number of vertices or parts")
        sub.add_argument('--H', type=_int_vector, required=required, help="edge sizes h1,h2,...")
        sub.add_argument('--lambda', dest='Lambda', type=_int_vector, required=required,
                         help="multiplicities l1,l2,...")
        parts = sub.add_mutually_exclusive_group()
        parts.add_argument('--p', type=int, help="uniform part size")
        parts.add_argument('--parts', type=_int_vector, help="part sizes p1,p2,...")

    def store_flag(sub: argparse.ArgumentParser) -> None:
        sub.add_argument('--store', default=None, metavar='DIR',
                         help="also save the artifact, timestamped, under DIR")

    generate = commands.add_parser('generate', help="emit a design or a random detachment instance")
    design_flags(generate, required=False)
    generate.add_argument('--random', action='store_true', help="random colored hypergraph with a simple g")
    generate.add_argument('--seed', type=int, default=None)
    generate.add_argument('--vertices', type=int, default=None)
    generate.add_argument('--edges', type=int, default=None)
    generate.add_argument('--colors', type=int, default=None)
    generate.add_argument('--output', default=None)
    store_flag(generate)

    detach = commands.add_parser('detach', help="build a simple g-detachment")
    detach.add_argument('--input', required=True, help="hypergraph or instance document")
    detach.add_argument('--g', default=None, help="number function document (optional for instances)")
    detach.add_argument('--seed', type=int, default=None)
    detach.add_argument('--audit', action='store_true', help=f"evaluate audits (also ${DetachConfig.AUDIT_ENV_VAR}=1)")
    detach.add_argument('--audit-output', default=None, help="JSON-lines audit stream (default: stderr)")
    detach.add_argument('--output', default=None)
    store_flag(detach)

    fact = commands.add_parser('factorize', help="R-, (Q,R)- or almost-R-factorize a design")
    design_flags(fact, required=True)
    fact.add_argument('--R', type=_int_vector, required=True)
    bounds = fact.add_mutually_exclusive_group()
    bounds.add_argument('--Q', type=_int_vector, default=None)
    bounds.add_argument('--almost', action='store_true')
    fact.add_argument('--seed', type=int, default=None)
    fact.add_argument('--audit', action='store_true')
    fact.add_argument('--audit-output', default=None, help="JSON-lines audit stream (default: stderr)")
    fact.add_argument('--output', default=None)
    store_flag(fact)

    verify = commands.add_parser('verify', help="verify an artifact against its embedded spec")
    verify.add_argument('--input', required=True)

    split = commands.add_parser('split', help="fair split over two laminar families")
    split.add_argument('--input', required=True)
    split.add_argument('--output', default=None)
    store_flag(split)

    return parser


def _design_spec(args) -> DesignSpec:
    if args.n is None or args.H is None or args.Lambda is None:
        raise UsageError("--n, --H and --lambda are required")
    parts = args.parts
    if args.p is not None:
        parts = (args.p,) * args.n
    return DesignSpec(args.n, args.H, args.Lambda, parts)


def _emit(document: Dict[str, Any], args) -> None:
    text = write_document(document, args.output)
    if not args.output:
        sys.stdout.write(text)
    if args.store:
        ArtifactStore(args.store).save(document, args.command)


def _emit_audits(audits: List[StepAudit], args) -> None:
    """One StepAudit per line, to --audit-output or stderr"""
    text = write_json_lines((audit.to_dict() for audit in audits), args.audit_output)
    if not args.audit_output:
        sys.stderr.write(text)


def _audit_flag(args) -> Optional[bool]:
    return True if args.audit else None


# ── commands ───────────────────────────────────────────────────────────


def cmd_generate(args) -> int:
    if args.random:
        if args.n is not None or args.H is not None or args.Lambda is not None:
            raise UsageError("--random cannot be combined with design flags")
        F, g = random_instance(args.seed, max_vertices=args.vertices, max_edges=args.edges, max_colors=args.colors)
        _emit(instance_artifact(F, g, args.seed), args)
        return EXIT_OK

    spec = _design_spec(args)
    _emit(design_artifact(spec, design_for(spec).build()), args)
    return EXIT_OK


def cmd_detach(args) -> int:
    document = read_document(args.input)
    source = document.get('hypergraph', document) if isinstance(document, dict) else document
    F = parse_hypergraph(source, "$.hypergraph" if source is not document else "$")
    if args.g:
        g = parse_number_function(read_document(args.g))
    elif isinstance(document, dict) and 'g' in document:
        g = parse_number_function(document)
    else:
        raise UsageError("--g is required unless the input carries a number function")

    run = run_detachment(F, g, seed=args.seed, audit=_audit_flag(args))
    final = run.final
    _emit(detachment_artifact(F, g, final.hypergraph, final.psi, final.step, args.seed), args)

    if run.audits:
        _emit_audits(run.audits, args)
        if not run.passed:
            logger.error("Detachment audits failed")
            return EXIT_FAILED
    return EXIT_OK


def cmd_factorize(args) -> int:
    spec = _design_spec(args)
    if args.almost:
        fs = FactorSpec.almost_of(args.R)
    else:
        fs = FactorSpec(args.R, args.Q)

    factorization = factorize(spec, fs, seed=args.seed, audit=_audit_flag(args))
    _emit(factorization_artifact(factorization), args)
    if factorization.audits:
        _emit_audits(factorization.audits, args)
    if factorization.report is None or not factorization.report.passed or not factorization.audits_passed:
        return EXIT_FAILED
    return EXIT_OK


def verify_document(document: Any) -> VerificationReport:
    """Dispatch on the artifact kind"""
    kind = artifact_kind(document)
    if kind == 'design':
        return verify_design(parse_hypergraph(document['hypergraph'], "$.hypergraph"),
                             parse_design_spec(document['spec'], "$.spec"))
    if kind == 'factorization':
        return verify_factorization(parse_hypergraph(document['hypergraph'], "$.hypergraph"),
                                    parse_design_spec(document['spec'], "$.spec"),
                                    parse_factor_spec(document['factors'], "$.factors"))
    if kind == 'detachment':
        return verify_detachment(parse_hypergraph(document['input'], "$.input"),
                                 parse_hypergraph(document['hypergraph'], "$.hypergraph"),
                                 parse_amalgamation(document),
                                 parse_number_function(document))
    if kind == 'split':
        ground, family_a, family_b, parts = parse_split_request(document)
        if 'Z' not in document:
            raise SchemaError("missing key 'Z'", "$")
        return verify_split(ground, family_a.sets, family_b.sets, parts, document['Z'])
    raise UsageError(f"artifacts of kind {kind!r} carry nothing to verify")


def cmd_verify(args) -> int:
    document = read_document(args.input)
    for key in {'design': ['hypergraph', 'spec'], 'factorization': ['hypergraph', 'spec', 'factors'],
                'detachment': ['input', 'hypergraph']}.get(artifact_kind(document), []):
        if key not in document:
            raise SchemaError(f"missing key {key!r}", "$")
    report = verify_document(document)
    sys.stdout.write(json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n")
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_split(args) -> int:
    ground, family_a, family_b, parts = parse_split_request(read_document(args.input))
    certificate = fair_split(ground, family_a, family_b, parts)
    _emit(split_artifact(ground, family_a, family_b, certificate), args)
    return EXIT_OK


COMMANDS = {
    'generate': cmd_generate,
    'detach': cmd_detach,
    'factorize': cmd_factorize,
    'verify': cmd_verify,
    'split': cmd_split,
}


def _fail(code: int, payload: Dict[str, Any]) -> int:
    sys.stderr.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return code


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments and dispatch to the library

    Args:
        argv: Arguments without the program name (defaults to sys.argv[1:])

    Returns:
        Process exit code
    """
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        return _fail(EXIT_USAGE, {'error': 'usage', 'message': str(e)})
    except SystemExit as e:
        return int(e.code or 0)

    try:
        return COMMANDS[args.command](args)
    except FactorizationRefused as e:
        return _fail(EXIT_REFUSED, e.to_dict())
    except PreconditionError as e:
        return _fail(EXIT_REFUSED, {'error': 'precondition', 'message': str(e)})
    except SchemaError as e:
        return _fail(EXIT_USAGE, e.to_dict())
    except (DomainError, UsageError) as e:
        return _fail(EXIT_USAGE, {'error': 'input', 'message': str(e)})
    except OSError as e:
        return _fail(EXIT_USAGE, {'error': 'io', 'message': str(e)})


def main() -> None:
    sys.exit(run())
