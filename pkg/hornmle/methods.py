# Standard library imports
import importlib
import logging
from functools import partial
from typing import Callable, Dict, List, Optional, Tuple

# Django imports
from django.conf import settings
from django.db import connections, transaction

# Local imports
from .conf import get_option
from .exceptions import InputError
from .families import FamilyStrategy, InstanceRecord, LinearMultipleFamily, ScanReport, params_key, run_family_scan
from .models import InstanceResult, ScanCheckpoint
from .serializers import InstanceResultSerializer

logger = logging.getLogger('hornmle')


class DatabaseCheckpoint:
    """Per-instance scan results kept in the checkpoint tables, keyed by family parameters."""

    def __init__(self, name: str, family: str, bound: int):
        self.checkpoint, created = ScanCheckpoint.objects.get_or_create(
            name=name, defaults={'family': family, 'bound': bound},
        )
        if not created and (self.checkpoint.family != family or self.checkpoint.bound != bound):
            raise InputError(f"checkpoint '{name}' belongs to {self.checkpoint.family} bound {self.checkpoint.bound}, "
                             f"not {family} bound {bound}")
        if created:
            logger.info(f"📝 new checkpoint '{name}' for {family} bound {bound}")
        else:
            logger.info(f"♻️  resuming checkpoint '{name}' ({self.checkpoint.results.count()} instances stored)")

    def load(self) -> Dict[str, InstanceRecord]:
        return {result.key: InstanceRecord.from_dict(result.data) for result in self.checkpoint.results.all()}

    def store(self, record: InstanceRecord):
        key = params_key(record.params)
        with transaction.atomic():
            existing = InstanceResult.objects.filter(checkpoint=self.checkpoint, key=key).first()
            serializer = InstanceResultSerializer(existing, data={
                'key': key,
                'terms': record.n_terms,
                'passing': record.n_passing,
                'seconds': record.seconds,
                'data': record.to_dict(),
            })
            serializer.is_valid(raise_exception=True)
            serializer.save(checkpoint=self.checkpoint)


class ScanBuilder:
    """
    Builds one scan per requested family. Strategy classes are looked up by name in
    hornmle.families through settings.FAMILIES, so a new family only needs a class
    and a settings entry.
    """

    def __init__(self, jobs: Optional[int] = None, resume: Optional[str] = None, distinct: bool = False):
        self.jobs = jobs or get_option('JOBS')
        self.resume = resume
        self.distinct = distinct

    def strategy_class(self, family: str):
        families = getattr(settings, 'FAMILIES', {})
        if family not in families:
            raise InputError(f"unknown family '{family}'; choose from {', '.join(families)}")
        module = importlib.import_module('hornmle.families')
        Strategy = getattr(module, families[family])
        if not issubclass(Strategy, FamilyStrategy):
            raise InputError(f"{families[family]} is not a family strategy")
        return Strategy

    def default_bound(self, family: str, shape: Optional[str] = None) -> int:
        bounds = get_option('FAMILY_BOUNDS')
        if family == 'linear-multiples':
            return bounds['linear_multiple'][shape]
        return bounds[family]

    def build_scans(self, family: str, bound: Optional[int] = None, shape: Optional[str] = None,
                    signs: Optional[str] = None) -> List[Tuple[str, Callable[[], ScanReport]]]:
        Strategy = self.strategy_class(family)
        if issubclass(Strategy, LinearMultipleFamily):
            shapes = [shape] if shape else list(Strategy.SHAPES)
            strategies = []
            for each in shapes:
                if each not in Strategy.SHAPES:
                    raise InputError(f"shape must be one of {', '.join(Strategy.SHAPES)}, got '{each}'")
                for sign in ([signs] if signs else Strategy.SHAPES[each]):
                    strategies.append((Strategy(each, sign), bound or self.default_bound(family, each)))
        else:
            if shape or signs:
                raise InputError(f"--shape and --signs only apply to linear-multiples, not {family}")
            strategies = [(Strategy(), bound or self.default_bound(family))]

        scans = []
        for strategy, family_bound in strategies:
            scans.append((strategy.label, partial(self._run, strategy, family_bound)))
        return scans

    def _run(self, strategy: FamilyStrategy, bound: int) -> ScanReport:
        checkpoint = None
        if self.resume:
            name = self.resume if strategy.label == strategy.name else f"{self.resume}:{strategy.label}"
            checkpoint = DatabaseCheckpoint(name, strategy.label, bound)
        if self.jobs > 1:
            # forked workers must not share the sqlite handle
            connections.close_all()
        return run_family_scan(strategy, bound, self.jobs, checkpoint, self.distinct)
