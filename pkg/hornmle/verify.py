"""
Likelihood-side checks that a Horn map really is the maximum likelihood estimator.

Everything that enters a verdict is exact: likelihoods are compared by cross
multiplying integer powers and the gradient of log L_u is evaluated over the
rationals. finite_difference_gradient is a float diagnostic and never decides
anything.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .conf import get_option
from .disctriple import ModelRecord
from .exactalg import SparsePoly, as_rational
from .exceptions import InputError, PoleAtInput
from .horn import HornPair, horn_map_eval
from .stagedtree import StagedTree, tree_horn_pair, tree_mle, tree_parametrize

logger = logging.getLogger('hornmle')

Model = Union[ModelRecord, HornPair, StagedTree]


def _positive_vector(values: Sequence, name: str) -> Tuple[Fraction, ...]:
    vector = tuple(as_rational(x) for x in values)
    if not vector or any(x <= 0 for x in vector):
        raise InputError(f"{name} must be a nonempty vector of positive rationals")
    return vector


def _common_denominator(values: Sequence[Fraction]) -> int:
    return lcm(*(Fraction(x).denominator for x in values))


def log_likelihood_compare(p: Sequence, q: Sequence, u: Sequence) -> int:
    """
    Sign of log L_u(p) - log L_u(q) with L_u(p) = prod p_i ** u_i: 1, 0 or -1.
    u is scaled to integers first, so the comparison is between two rationals.
    """
    p = _positive_vector(p, 'p')
    q = _positive_vector(q, 'q')
    u = _positive_vector(u, 'u')
    if not len(p) == len(q) == len(u):
        raise InputError(f"p, q and u have lengths {len(p)}, {len(q)} and {len(u)}")
    scale = _common_denominator(u)
    weights = [int(x * scale) for x in u]
    ratio = Fraction(1)
    for a, b, w in zip(p, q, weights):
        ratio *= (a / b) ** w
    return (ratio > 1) - (ratio < 1)


def critical_gradient(pair: HornPair, u: Sequence, v: Sequence) -> Tuple[Fraction, ...]:
    """Gradient of log L_u at v for the Horn map of the pair: sum_j h_jl (Hu)_j / (Hv)_j."""
    v = _positive_vector(v, 'v')
    H = pair.H
    hu = H.linear_forms(u)
    hv = H.linear_forms(v)
    for label, value in zip(H.row_labels, hv):
        if value == 0:
            raise PoleAtInput(f"linear form {label} vanishes at v")
    ratios = [a / b for a, b in zip(hu, hv)]
    return tuple(
        sum((row[l] * r for row, r in zip(H.entries, ratios) if row[l]), Fraction(0))
        for l in range(H.n_columns)
    )


def finite_difference_gradient(pair: HornPair, u: Sequence, v: Sequence, step: Fraction = Fraction(1, 10 ** 6)) -> np.ndarray:
    """Central differences of log L_u at v in floating point."""
    u = np.array([float(as_rational(x)) for x in u])
    v = [as_rational(x) for x in v]

    def log_likelihood(point):
        values = np.array([float(x) for x in horn_map_eval(pair, point)])
        return float(np.dot(u, np.log(values)))

    gradient = np.zeros(len(v))
    for l in range(len(v)):
        up = list(v)
        down = list(v)
        up[l] += step
        down[l] -= step
        gradient[l] = (log_likelihood(up) - log_likelihood(down)) / (2 * float(step))
    return gradient


class ModelAdapter:
    """Uniform view of a Horn pair, a ModelRecord or a staged tree as an estimator."""

    def __init__(self, model: Model):
        self.model = model
        if isinstance(model, StagedTree):
            model.check()
            self.pair = tree_horn_pair(model)
        elif isinstance(model, ModelRecord):
            self.pair = model.pair
        elif isinstance(model, HornPair):
            self.pair = model
        else:
            raise InputError(f"cannot verify a {type(model).__name__}")

    @property
    def n(self) -> int:
        return self.pair.H.n_columns

    @property
    def estimate(self) -> Callable[[Sequence], Tuple[Fraction, ...]]:
        if isinstance(self.model, StagedTree):
            return lambda u: tree_mle(self.model, u).p_hat
        return lambda u: horn_map_eval(self.pair, u)

    def random_counts(self, rng: np.random.Generator, high: int = 50) -> Tuple[int, ...]:
        return tuple(int(x) for x in rng.integers(1, high, size=self.n))

    def random_point(self, rng: np.random.Generator) -> Tuple[Fraction, ...]:
        """A point of the model: parametrized for trees, the image of random counts otherwise."""
        if isinstance(self.model, StagedTree):
            T = self.model
            values = {}
            for floret in T.florets:
                weights = [int(w) for w in rng.integers(1, 20, size=len(floret))]
                total = sum(weights)
                values.update({label: Fraction(w, total) for label, w in zip(floret, weights)})
            return tree_parametrize(T, values)
        return self.estimate(self.random_counts(rng))


@dataclass
class CheckResult:
    name: str
    trials: int
    passed: int
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.passed == self.trials and not self.failures

    def to_dict(self) -> dict:
        return {'name': self.name, 'trials': self.trials, 'passed': self.passed, 'ok': self.ok}


@dataclass
class VerificationReport:
    seed: int
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def failures(self) -> List[str]:
        return [f"{check.name}: {message}" for check in self.checks for message in check.failures]

    @property
    def ok(self) -> bool:
        return all(check.ok for check in self.checks)

    def to_dict(self) -> dict:
        return {'checks': [check.to_dict() for check in self.checks], 'seed': self.seed, 'failures': self.failures}


def _rng(seed: Optional[int], stream: int) -> np.random.Generator:
    seed = get_option('SEED') if seed is None else seed
    return np.random.default_rng(np.random.SeedSequence(seed).spawn(stream + 1)[stream])


def mle_idempotence_check(model: Model, u: Optional[Sequence] = None, trials: int = 100,
                          seed: Optional[int] = None) -> CheckResult:
    """Phi(N * Phi(u)) == Phi(u) where N clears the denominators of Phi(u)."""
    adapter = ModelAdapter(model)
    rng = _rng(seed, 0)
    points = [tuple(u)] if u is not None else []
    points += [adapter.random_counts(rng) for _ in range(trials)]
    result = CheckResult('idempotence', len(points), 0)
    for counts in points:
        p = adapter.estimate(counts)
        scale = _common_denominator(p)
        again = adapter.estimate([x * scale for x in p])
        if again == p:
            result.passed += 1
        else:
            result.failures.append(f"u = {list(counts)} is not fixed")
    return result


def gradient_check(model: Model, trials: int = 100, seed: Optional[int] = None) -> CheckResult:
    adapter = ModelAdapter(model)
    rng = _rng(seed, 1)
    result = CheckResult('critical_gradient', trials, 0)
    for _ in range(trials):
        u = adapter.random_counts(rng)
        try:
            gradient = critical_gradient(adapter.pair, u, u)
        except PoleAtInput as e:
            result.failures.append(f"u = {list(u)}: {e}")
            continue
        if any(gradient):
            result.failures.append(f"u = {list(u)}: gradient is not zero")
        else:
            result.passed += 1
    return result


def dominance_check(model: Model, u: Sequence, samples: int = 200, rng: Optional[np.random.Generator] = None,
                    seed: Optional[int] = None) -> CheckResult:
    """L_u(Phi(u)) >= L_u(q) for sampled model points q, with equality only at q = Phi(u)."""
    adapter = ModelAdapter(model)
    rng = rng if rng is not None else _rng(seed, 2)
    p = adapter.estimate(u)
    result = CheckResult('dominance', samples, 0)
    if not all(x > 0 for x in p) or sum(p) != 1:
        result.failures.append(f"Phi(u) = {[str(x) for x in p]} is not in the open simplex")
        return result
    for _ in range(samples):
        q = adapter.random_point(rng)
        order = log_likelihood_compare(p, q, u)
        if order < 0 or (order == 0 and tuple(q) != tuple(p)):
            result.failures.append(f"q = {[str(x) for x in q]} is at least as likely as Phi(u)")
        else:
            result.passed += 1
    return result


def relation_check(model: Model, relations: Sequence[SparsePoly], trials: int = 200,
                   seed: Optional[int] = None) -> CheckResult:
    """Every relation vanishes at Phi(u) for random positive integer u."""
    adapter = ModelAdapter(model)
    rng = _rng(seed, 3)
    result = CheckResult('relations', trials, 0)
    for _ in range(trials):
        u = adapter.random_counts(rng)
        image = adapter.estimate(u)
        nonzero = [k for k, relation in enumerate(relations) if relation.evaluate(image) != 0]
        if nonzero:
            result.failures.append(f"u = {list(u)}: relations {nonzero} do not vanish")
        else:
            result.passed += 1
    return result


def verify_model(model: Model, seed: Optional[int] = None, trials: int = 100,
                 relations: Optional[Sequence[SparsePoly]] = None) -> VerificationReport:
    seed = get_option('SEED') if seed is None else seed
    report = VerificationReport(seed)
    report.checks.append(gradient_check(model, trials, seed))
    report.checks.append(mle_idempotence_check(model, trials=trials, seed=seed))
    adapter = ModelAdapter(model)
    u = adapter.random_counts(_rng(seed, 4))
    report.checks.append(dominance_check(model, u, samples=2 * trials, seed=seed))
    if relations:
        report.checks.append(relation_check(model, relations, 2 * trials, seed))
    for message in report.failures:
        logger.error(f"verification failed: {message}")
    return report
