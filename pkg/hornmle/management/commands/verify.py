from hornmle.cli import HornMLECommand
from hornmle.serializers import (
    HornPairSerializer, ModelRecordSerializer, PolynomialSerializer, TreeSerializer, VerificationReportSerializer,
)
from hornmle.verify import verify_model


class Command(HornMLECommand):
    help = 'Check that a model estimator is a likelihood maximizer (exact gradient, idempotence, dominance)'
    actions = ('model',)

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('paths', nargs='*', help='staged tree, Horn pair or model record JSON')
        parser.add_argument('--seed', type=int, default=None)
        parser.add_argument('--trials', type=int, default=100)
        parser.add_argument('--relations', default=None,
                            help='JSON list of polynomials in the model coordinates that must vanish on the image')

    def handle_action(self, action, options):
        path, = self.require_paths(options, 1)
        data = self.read_json(path)
        if isinstance(data, dict) and 'edges' in data:
            serializer_class = TreeSerializer
        elif isinstance(data, dict) and 'sigma' in data:
            serializer_class = ModelRecordSerializer
        else:
            serializer_class = HornPairSerializer
        model = self.build(serializer_class(data=data), path)

        relations = None
        if options['relations']:
            serializer = PolynomialSerializer(data=self.read_json(options['relations']), many=True)
            relations = self.build(serializer, options['relations'])

        report = verify_model(model, seed=options['seed'], trials=options['trials'], relations=relations)
        lines = [f"{'✓' if check.ok else '✗'} {check.name}: {check.passed}/{check.trials}" for check in report.checks]
        lines.append(f"seed {report.seed}")
        self.emit(VerificationReportSerializer(report).data, lines, options['output'])
        if not report.ok:
            self.fail_verification(f"{len(report.failures)} verification failure(s); first: {report.failures[0]}")
