from hornmle.cli import HornMLECommand
from hornmle.disctriple import left_kernel_basis, marked_poly_from_pair, pair_from_marked_poly, triple_check
from hornmle.exactalg import format_rational
from hornmle.serializers import HornPairSerializer, TripleSerializer


class Command(HornMLECommand):
    help = 'Discriminantal triples (A, Delta, m): check, build from a Horn pair, convert to a Horn pair'
    actions = ('check', 'from-pair', 'to-pair')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('paths', nargs='*', help='triple JSON (check, to-pair) or Horn pair JSON (from-pair)')

    def handle_action(self, action, options):
        path, = self.require_paths(options, 1)
        if action == 'from-pair':
            pair = self.load(path, HornPairSerializer)
            marked = marked_poly_from_pair(pair.H, pair.lam)
            triple = triple_check(left_kernel_basis(pair.H), marked)
            self.emit(triple.to_dict(), self.triple_lines(triple), options['output'])
            return

        A, marked = self.load(path, TripleSerializer)
        if action == 'to-pair':
            H, lam = pair_from_marked_poly(marked)
            data = H.to_dict()
            data['lambda'] = [format_rational(x) for x in lam]
            lines = [f"{label}: {list(row)}" for label, row in zip(H.row_labels, H.entries)]
            lines.append(f"λ = ({', '.join(format_rational(x) for x in lam)})")
            self.emit(data, lines, options['output'])
            return

        triple = triple_check(A, marked)
        self.emit(triple.to_dict(), self.triple_lines(triple), options['output'])
        if not triple.verified:
            self.fail_verification(f"not a discriminantal triple: {', '.join(triple.failures())} failed")

    def triple_lines(self, triple):
        lines = [f"Δ = {triple.marked.delta.format(triple.marked.names)}",
                 f"m = {triple.marked.marked_term()}"]
        lines += [f"{'✓' if getattr(triple, name) else '✗'} {name}"
                  for name in ('homogeneous', 'reduced', 'sign_consistent', 'positive')]
        return lines
