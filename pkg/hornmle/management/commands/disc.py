from django.core.management.base import CommandError

from hornmle.cli import INPUT_ERROR, HornMLECommand, parse_integers
from hornmle.families import trinomial_resultant, univariate_discriminant


class Command(HornMLECommand):
    help = 'Sparse discriminants and trinomial resultants with content removed'
    actions = ('univariate', 'trinomial')

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--params', required=True, help='alpha,beta,gamma (univariate) or alpha,beta,gamma,epsilon')
        parser.add_argument('--method', choices=['bareiss', 'cofactor'], default='bareiss')
        parser.add_argument('--direct', action='store_true',
                            help='keep every coefficient symbolic instead of specializing and rehomogenizing')

    def handle_action(self, action, options):
        params = parse_integers(options['params'], '--params')
        expected = 3 if action == 'univariate' else 4
        if len(params) != expected:
            raise CommandError(f"--params: {action} needs {expected} integers, got {len(params)}", returncode=INPUT_ERROR)
        compute = univariate_discriminant if action == 'univariate' else trinomial_resultant
        poly = compute(*params, method=options['method'], dehomogenize=not options['direct'])
        data = poly.to_dict()
        data['degree'] = poly.degree()
        self.emit(data, [poly.format(), f"{len(poly)} terms, degree {poly.degree()}"], options['output'])
