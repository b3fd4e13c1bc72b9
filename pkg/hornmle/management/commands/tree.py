from django.core.management.base import CommandError

from hornmle.cli import INPUT_ERROR, HornMLECommand, parse_rationals, rational_text, vector_text
from hornmle.exactalg import format_rational
from hornmle.horn import horn_pair_check
from hornmle.serializers import ContingencyTableSerializer, DAGSerializer, TreeSerializer
from hornmle.stagedtree import (
    bayes_net_mle, from_bayesian_network, identify_florets, leaf_assignments, tree_equivalent, tree_horn,
    tree_horn_pair, tree_mle, tree_mle_aggregated,
)


class Command(HornMLECommand):
    help = 'Staged trees: validate, estimate, Horn matrix, equivalence and floret identification'
    actions = ('validate', 'mle', 'horn', 'equiv', 'identify', 'from-dag')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('paths', nargs='*', help='tree JSON file(s); a DAG file for from-dag')
        parser.add_argument('--counts', help='leaf counts, comma separated, in leaf order')
        parser.add_argument('--aggregated', action='store_true', help='mle: use edge transition counts')
        parser.add_argument('--reduced', action='store_true', help='horn: print the reduced Horn pair')
        parser.add_argument('--florets', nargs=2, metavar=('F', 'F_PRIME'), help='identify: floret names such as f4 f5')
        parser.add_argument('--table', help='from-dag: contingency table JSON to estimate')

    def handle_action(self, action, options):
        getattr(self, 'do_' + action.replace('-', '_'))(options)

    def do_validate(self, options):
        path, = self.require_paths(options, 1)
        tree = self.load(path, TreeSerializer)
        self.emit(
            {'valid': True, 'leaves': list(tree.leaves), 'labels': list(tree.labels),
             'florets': {name: list(f) for name, f in zip(tree.floret_names, tree.florets)}},
            [self.style.SUCCESS(f"✓ valid staged tree: {tree.n_leaves} leaves, {len(tree.labels)} labels, "
                                f"{len(tree.florets)} florets")],
            options['output'],
        )

    def do_mle(self, options):
        path, = self.require_paths(options, 1)
        tree = self.load(path, TreeSerializer)
        if not options['counts']:
            raise CommandError("mle needs --counts", returncode=INPUT_ERROR)
        counts = parse_rationals(options['counts'])
        estimate = (tree_mle_aggregated if options['aggregated'] else tree_mle)(tree, counts)
        lines = [f"ŝ = {vector_text(estimate.s_hat)}", f"p̂ = {vector_text(estimate.p_hat)}"]
        lines += [f"  {label} = {rational_text(x)}" for label, x in zip(tree.labels, estimate.s_hat)]
        lines += [f"  p[{leaf}] = {rational_text(x)}" for leaf, x in zip(tree.leaves, estimate.p_hat)]
        self.emit(
            {'labels': list(tree.labels), 's_hat': [format_rational(x) for x in estimate.s_hat],
             'leaves': list(tree.leaves), 'p_hat': [format_rational(x) for x in estimate.p_hat]},
            lines,
            options['output'],
        )

    def do_horn(self, options):
        path, = self.require_paths(options, 1)
        tree = self.load(path, TreeSerializer)
        if options['reduced']:
            pair = tree_horn_pair(tree)
            H, lam = pair.H, pair.lam
        else:
            H, lam = tree_horn(tree)
        data = H.to_dict()
        data['lambda'] = [format_rational(x) for x in lam]
        data['leaves'] = list(tree.leaves)
        width = max(len(label) for label in H.row_labels)
        lines = [f"{label:>{width}} " + ' '.join(f"{h:>2}" for h in row) for label, row in zip(H.row_labels, H.entries)]
        lines.append(f"{'λ':>{width}} " + ' '.join(f"{format_rational(x):>2}" for x in lam))
        self.emit(data, lines, options['output'])

    def do_equiv(self, options):
        first, second = self.require_paths(options, 2)
        T1 = self.load(first, TreeSerializer)
        T2 = self.load(second, TreeSerializer)
        equivalent = tree_equivalent(T1, T2)
        self.emit({'equivalent': equivalent},
                  [f"{'✓' if equivalent else '✗'} the trees {'are' if equivalent else 'are not'} statistically equivalent"],
                  options['output'])

    def do_identify(self, options):
        path, = self.require_paths(options, 1)
        tree = self.load(path, TreeSerializer)
        if not options['florets']:
            raise CommandError("identify needs --florets F F_PRIME", returncode=INPUT_ERROR)
        f, f_prime = options['florets']
        merged = identify_florets(tree, f, f_prime)
        verdict = horn_pair_check(*tree_horn(merged))
        self.emit(merged.to_dict(),
                  [f"identified {options['florets'][0]} with {options['florets'][1]}: "
                   f"{len(merged.florets)} florets, friendly = {verdict.friendly}"],
                  options['output'])

    def do_from_dag(self, options):
        path, = self.require_paths(options, 1)
        dag = self.load(path, DAGSerializer)
        tree = from_bayesian_network(dag)
        data = tree.to_dict()
        data['leaf_states'] = [list(states) for states in leaf_assignments(dag)]
        lines = [f"staged tree with {tree.n_leaves} leaves and {len(tree.florets)} florets"]
        if options['table']:
            table = self.load(options['table'], ContingencyTableSerializer)
            estimate = bayes_net_mle(dag, table)
            data['mle'] = estimate.to_dict()
            lines += [f"  p{list(states)} = {rational_text(estimate[states])}" for states in leaf_assignments(dag)]
        self.emit(data, lines, options['output'])
