from django.core.management.base import CommandError

from hornmle.cli import INPUT_ERROR, HornMLECommand, parse_rationals, rational_text
from hornmle.exactalg import format_rational
from hornmle.horn import find_column_bijection, horn_map_eval, horn_pair_check, reduce_horn
from hornmle.serializers import HornPairSerializer


class Command(HornMLECommand):
    help = 'Horn pairs: check, evaluate, reduce, compare'
    actions = ('check', 'eval', 'reduce', 'equal')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('paths', nargs='*', help='Horn pair JSON file(s)')
        parser.add_argument('--counts', help='eval: the point u, comma separated')

    def handle_action(self, action, options):
        if action == 'equal':
            first, second = self.require_paths(options, 2)
            self.equal(self.load(first, HornPairSerializer), self.load(second, HornPairSerializer), options)
            return
        path, = self.require_paths(options, 1)
        pair = self.load(path, HornPairSerializer)
        getattr(self, action if action != 'eval' else 'evaluate')(pair, options)

    def check(self, pair, options):
        verdict = horn_pair_check(pair.H, pair.lam)
        lines = [f"{'✓' if getattr(verdict, name) else '✗'} {name}"
                 for name in ('friendly', 'reduced', 'sign_consistent', 'positive')]
        lines.append(f"sigma = {list(verdict.sigma)}")
        self.emit(verdict.to_dict(), lines, options['output'])
        if not verdict.horn:
            failed = [name for name in ('friendly', 'reduced', 'sign_consistent', 'positive')
                      if not getattr(verdict, name)]
            self.fail_verification(f"not a Horn pair: {', '.join(failed)} failed")

    def evaluate(self, pair, options):
        if not options['counts']:
            raise CommandError("eval needs --counts", returncode=INPUT_ERROR)
        values = horn_map_eval(pair, parse_rationals(options['counts']))
        self.emit({'value': [format_rational(x) for x in values], 'sum': format_rational(sum(values))},
                  [f"  p{j} = {rational_text(x)}" for j, x in enumerate(values)] + [f"  sum = {rational_text(sum(values))}"],
                  options['output'])

    def reduce(self, pair, options):
        reduced = reduce_horn(pair.H, pair.lam)
        dropped = [label for label in pair.H.row_labels if label not in set(
            part for label in reduced.H.row_labels for part in label.split('+'))]
        lines = [f"{label}: {list(row)}" for label, row in zip(reduced.H.row_labels, reduced.H.entries)]
        lines.append(f"λ = ({', '.join(format_rational(x) for x in reduced.lam)})")
        if dropped:
            lines.append(f"deleted rows: {', '.join(dropped)}")
        self.emit(reduced.to_dict(), lines, options['output'])

    def equal(self, first, second, options):
        bijection = find_column_bijection(reduce_horn(first.H, first.lam), reduce_horn(second.H, second.lam))
        equal = bijection is not None
        self.emit({'equal': equal, 'bijection': list(bijection) if equal else None},
                  [f"{'✓ equal under columns ' + str(list(bijection)) if equal else '✗ not equal'}"],
                  options['output'])
