import json

from django.conf import settings
from django.core.management.base import CommandError

from hornmle.cli import INPUT_ERROR, HornMLECommand
from hornmle.methods import ScanBuilder
from hornmle.serializers import ScanInstanceSerializer


class Command(HornMLECommand):
    help = 'Scan an experiment family: every term of every Delta is tried as the marked term'

    @property
    def actions(self):
        return tuple(settings.FAMILIES)

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--bound', type=int, default=None, help='parameter bound (degree bound for linear-multiples)')
        parser.add_argument('--jobs', type=int, default=None, help='worker processes')
        parser.add_argument('--resume', default=None, help='checkpoint name; stored instances are not recomputed')
        parser.add_argument('--shape', choices=['binomial', 'trinomial'], default=None, help='linear-multiples only')
        parser.add_argument('--signs', default=None, help="linear-multiples only: '-' or '+' (binomial), '+-' or '++'")
        parser.add_argument('--distinct', action='store_true', help='also count distinct models among passing terms')

    def handle_action(self, family, options):
        if options['bound'] is not None and options['bound'] < 1:
            raise CommandError("--bound must be at least 1", returncode=INPUT_ERROR)
        if options['jobs'] is not None and options['jobs'] < 1:
            raise CommandError("--jobs must be at least 1", returncode=INPUT_ERROR)
        builder = ScanBuilder(jobs=options['jobs'], resume=options['resume'], distinct=options['distinct'])
        scans = builder.build_scans(family, options['bound'], options['shape'], options['signs'])

        reports = []
        for label, scan in scans:
            report = scan()
            reports.append(report)
            if self.format == 'json':
                for instance in report.instances:
                    self.stdout.write(json.dumps(ScanInstanceSerializer(instance).data))
                self.stdout.write(json.dumps({'summary': report.summary(timing=False)}))
            for message in report.discrepancies():
                self.stderr.write(self.style.WARNING(f"⚠️  {label}: {message}"))

        if self.format == 'table':
            self.write_table(family, reports)
        if options['output']:
            with open(options['output'], 'w', encoding='utf-8') as f:
                json.dump([{'summary': report.summary(),
                            'instances': [instance.to_dict() for instance in report.instances]}
                           for report in reports], f, indent=2, ensure_ascii=False)

    def write_table(self, family, reports):
        if family != 'linear-multiples':
            for report in reports:
                self.stdout.write(report.summary_line())
                if report.distinct is not None:
                    self.stdout.write(f"  {report.distinct} distinct models")
            return
        self.stdout.write(f"{'Family':<22}{'Pairs (Δ, m)':>14}{'Horn pairs':>12}{'Percentage':>12}")
        for report in reports:
            self.stdout.write(f"{report.family:<22}{report.pairs:>14}{report.triples:>12}{report.percentage + '%':>12}")
        for report in reports:
            self.stdout.write(f"{report.family}: {report.matrices} polynomials")
            for degree, row in report.breakdown().items():
                self.stdout.write(f"  degree {degree}: {row['polynomials']} polynomials, {row['pairs']} pairs, "
                                  f"{row['triples']} Horn pairs")
            if report.distinct is not None:
                self.stdout.write(f"  {report.distinct} distinct models")
