"""
Command-line surface. Each subcommand is a management command (tree, horn, triple,
disc, scan, verify) with its action as first argument; run(argv) dispatches them
through call_command and turns CommandError into the exit code:

    0  success
    1  a verification did not pass
    2  bad input (usage, unreadable file, invalid field)
"""
import json
import logging
import os
import sys
from typing import List, Optional, Sequence

from django.core.management.base import BaseCommand, CommandError
from rest_framework import serializers

from .conf import get_option
from .exactalg import as_rational, decimal_string, format_rational
from .exceptions import HornMLEError, InputError, PoleAtInput, ZeroDenominator

logger = logging.getLogger('hornmle')

SUBCOMMANDS = ('tree', 'horn', 'triple', 'disc', 'scan', 'verify')
USAGE = (
    "usage: hornmle <subcommand> <action> [files] [flags]\n"
    "  tree validate|mle|horn|equiv|identify|from-dag\n"
    "  horn check|eval|reduce|equal\n"
    "  triple check|from-pair|to-pair\n"
    "  disc univariate|trinomial\n"
    "  scan univariate|trinomial|linear-multiples\n"
    "  verify model\n"
)

VERIFICATION_FAILED = 1
INPUT_ERROR = 2


def parse_rationals(text: str, name: str = '--counts') -> List:
    try:
        return [as_rational(part) for part in text.split(',') if part.strip()]
    except (TypeError, ValueError, ZeroDivisionError):
        raise CommandError(f"{name}: cannot read '{text}' as comma-separated rationals", returncode=INPUT_ERROR)


def parse_integers(text: str, name: str) -> List[int]:
    try:
        return [int(part) for part in text.split(',') if part.strip()]
    except ValueError:
        raise CommandError(f"{name}: cannot read '{text}' as comma-separated integers", returncode=INPUT_ERROR)


def rational_text(value) -> str:
    """Exact value followed by its decimal approximation, e.g. 3/5 (0.6)."""
    exact = format_rational(value)
    if '/' not in exact:
        return exact
    return f"{exact} ({decimal_string(value)})"


def vector_text(values: Sequence) -> str:
    return '(' + ', '.join(format_rational(x) for x in values) + ')'


def validation_message(detail, prefix: str = '') -> str:
    """Flatten a DRF error detail into 'field: message' lines."""
    if isinstance(detail, dict):
        return '; '.join(validation_message(value, f"{prefix}{key}: " if not prefix else f"{prefix}{key}.")
                         for key, value in detail.items())
    if isinstance(detail, list):
        return '; '.join(validation_message(item, prefix) for item in detail if item)
    return f"{prefix}{detail}"


class HornMLECommand(BaseCommand):
    """Base of the subcommands: JSON loading, output formatting and exit codes."""
    actions: Sequence[str] = ()

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)

        def usage_error(message):
            raise CommandError(f"Error: {message}", returncode=INPUT_ERROR)

        # manage.py keeps argparse's own exit (status 2)
        if not getattr(self, '_called_from_command_line', False):
            parser.error = usage_error
        return parser

    def add_arguments(self, parser):
        parser.add_argument('action', choices=self.actions)
        parser.add_argument('--format', choices=['json', 'table'], default=None, help='output format')
        parser.add_argument('--output', default=None, help='write the JSON result to this file as well')

    def handle(self, *args, **options):
        self.format = options.get('format') or get_option('FORMAT')
        try:
            self.handle_action(options['action'], options)
        except CommandError:
            raise
        except (InputError, PoleAtInput, ZeroDenominator) as e:
            raise CommandError(str(e), returncode=INPUT_ERROR)
        except HornMLEError as e:
            logger.error(f"{options['action']} failed: {e}")
            raise CommandError(str(e), returncode=VERIFICATION_FAILED)

    def handle_action(self, action: str, options: dict):
        raise NotImplementedError('subclasses of HornMLECommand must provide a handle_action() method')

    # ------------------------------------------------------------ input

    def read_json(self, path: str):
        if not os.path.exists(path):
            raise CommandError(f"{path}: no such file", returncode=INPUT_ERROR)
        try:
            with open(path, encoding='utf-8') as f:
                return json.load(f)
        except json.JSONDecodeError as e:
            raise CommandError(f"{path}: invalid JSON ({e})", returncode=INPUT_ERROR)

    def load(self, path: str, serializer_class):
        """Read a file and return the domain object built by the serializer."""
        serializer = serializer_class(data=self.read_json(path))
        return self.build(serializer, path)

    def build(self, serializer, source: str):
        try:
            serializer.is_valid(raise_exception=True)
        except serializers.ValidationError as e:
            raise CommandError(f"{source}: {validation_message(e.detail)}", returncode=INPUT_ERROR)
        return serializer.save()

    def require_paths(self, options: dict, count: int) -> List[str]:
        paths = options.get('paths') or []
        if len(paths) != count:
            raise CommandError(f"{options['action']} expects {count} file(s), got {len(paths)}", returncode=INPUT_ERROR)
        return paths

    # ------------------------------------------------------------ output

    def emit(self, data, lines: Optional[Sequence[str]] = None, output: Optional[str] = None):
        """JSON document, or the given table lines; --output always receives JSON."""
        if self.format == 'table' and lines is not None:
            for line in lines:
                self.stdout.write(line)
        else:
            self.stdout.write(json.dumps(data, ensure_ascii=False))
        if output:
            with open(output, 'w', encoding='utf-8') as f:
                json.dump(data, f, indent=2, ensure_ascii=False)
            logger.info(f"💾 wrote {output}")

    def fail_verification(self, message: str):
        self.stderr.write(self.style.ERROR(f"❌ {message}"))
        raise CommandError(message, returncode=VERIFICATION_FAILED)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit code."""
    import django
    from django.core.management import call_command

    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ('-h', '--help'):
        sys.stdout.write(USAGE)
        return 0 if argv else INPUT_ERROR
    name, rest = argv[0], argv[1:]
    if name not in SUBCOMMANDS:
        sys.stderr.write(f"unknown subcommand '{name}'\n{USAGE}")
        return INPUT_ERROR
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'ratmle.settings')
    django.setup()
    try:
        call_command(name, *rest)
    except CommandError as e:
        sys.stderr.write(f"{e}\n")
        return e.returncode
    return 0
