import os
import unittest
from collections import Counter
from math import gcd

import sympy
from django.test import SimpleTestCase

from hornmle.exactalg import SparsePoly, normalize_discriminant
from hornmle.exceptions import InputError
from hornmle.families import (
    ExpectedCounts, InstanceRecord, LinearMultipleFamily, ScanReport, TrinomialFamily, UnivariateFamily,
    coprime_monomials, linear_multiple_scan, monomials_of_degree, params_key, percent_text, run_family_scan,
    trinomial_family_scan, trinomial_resultant, univariate_discriminant, univariate_family_scan,
)
from hornmle.tests.test_exactalg import CUBIC_DISCRIMINANT, from_sympy

FULL_SCANS = os.environ.get('RATMLE_FULL_SCANS') == '1'


class MemoryCheckpoint:

    def __init__(self, records=None):
        self.records = dict(records or {})
        self.stored = []

    def load(self):
        return dict(self.records)

    def store(self, record):
        self.records[params_key(record.params)] = record
        self.stored.append(record.params)


def without_timing(report):
    instances = []
    for instance in report.instances:
        data = instance.to_dict()
        data.pop('seconds')
        instances.append(data)
    return report.summary(timing=False), instances


class HelperTests(SimpleTestCase):

    def test_percent_text(self):
        self.assertEqual(percent_text(12, 8212), '0.15')
        self.assertEqual(percent_text(8, 8678), '0.09')
        self.assertEqual(percent_text(123, 7927), '1.55')
        self.assertEqual(percent_text(93, 2665), '3.49')
        self.assertEqual(percent_text(1, 8), '12.50')
        self.assertEqual(percent_text(0, 0), '0.00')

    def test_monomials(self):
        self.assertEqual(monomials_of_degree(4, 1), [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
        self.assertEqual(len(monomials_of_degree(4, 3)), 20)
        self.assertTrue(coprime_monomials((2, 0, 0, 0), (0, 1, 1, 0)))
        self.assertFalse(coprime_monomials((1, 0, 0, 0), (1, 1, 0, 0)))

    def test_params_key(self):
        self.assertEqual(params_key(((1, 0), (0, 1))), '[[1, 0], [0, 1]]')

    def test_instance_record_round_trip(self):
        record = InstanceRecord(((1, 0, 0, 0), (0, 1, 0, 0)), 6, [2], degree=2)
        self.assertEqual(InstanceRecord.from_dict(record.to_dict()), record)


class DiscriminantFamilyTests(SimpleTestCase):

    def test_cubic(self):
        self.assertEqual(univariate_discriminant(1, 2, 3), CUBIC_DISCRIMINANT)

    def test_specialized_and_direct_agree(self):
        for params in [(1, 2, 4), (1, 3, 5), (2, 3, 4), (1, 4, 7)]:
            self.assertEqual(univariate_discriminant(*params), univariate_discriminant(*params, dehomogenize=False))
        for params in [(1, 2, 1, 3), (1, 3, 2, 3), (2, 3, 1, 2)]:
            self.assertEqual(trinomial_resultant(*params), trinomial_resultant(*params, dehomogenize=False))

    def test_against_sympy(self):
        t = sympy.Symbol('t')
        a = sympy.symbols('a1:7')
        expected = sympy.discriminant(a[0] + a[1] * t + a[2] * t ** 3 + a[3] * t ** 5, t)
        self.assertEqual(univariate_discriminant(1, 3, 5), normalize_discriminant(from_sympy(expected, a[:4])))
        expected = sympy.resultant(a[0] + a[1] * t + a[2] * t ** 3, a[3] + a[4] * t ** 2 + a[5] * t ** 3, t)
        self.assertEqual(trinomial_resultant(1, 3, 2, 3), normalize_discriminant(from_sympy(expected, a)))

    def test_sparse_septic(self):
        self.assertEqual(len(univariate_discriminant(1, 4, 7)), 9)

    def test_exponents_must_increase(self):
        with self.assertRaises(InputError):
            univariate_discriminant(2, 2, 3)
        with self.assertRaises(InputError):
            trinomial_resultant(1, 2, 3, 3)

    def test_resultant_is_homogeneous_for_its_grading(self):
        delta = trinomial_resultant(1, 2, 1, 3)
        self.assertTrue(delta.is_homogeneous(TrinomialFamily().toric_matrix((1, 2, 1, 3)).rows))


class InstanceCountTests(SimpleTestCase):

    def test_univariate_instances(self):
        family = UnivariateFamily()
        self.assertEqual(family.instances(3), [(1, 2, 3)])
        self.assertNotIn((2, 4, 6), family.instances(6))
        self.assertEqual(len(family.instances(17)), 613)
        with self.assertRaises(InputError):
            family.instances(2)

    def test_trinomial_instances(self):
        self.assertEqual(len(TrinomialFamily().instances(17)), 9025)
        self.assertEqual(TrinomialFamily().instances(2), [(1, 2, 1, 2)])

    def test_trinomial_count_mismatch_is_reported(self):
        instances = TrinomialFamily().instances(17)
        for alpha, beta, gamma, epsilon in instances:
            self.assertTrue(0 < alpha < beta <= 17 and 0 < gamma < epsilon <= 17)
            self.assertEqual((gcd(alpha, beta), gcd(gamma, epsilon)), (1, 1))
        report = ScanReport('trinomial', 17, [InstanceRecord(params, 0, []) for params in instances],
                            expected=TrinomialFamily.expected)
        self.assertIn('matrices: computed 9025, published 138', report.discrepancies())

    def test_linear_multiple_instances(self):
        binomials = LinearMultipleFamily('binomial', '-').instances(8)
        self.assertEqual(len(binomials), 1028)
        by_degree = Counter(sum(params[0]) for params in binomials)
        self.assertEqual(by_degree[1], 6)
        self.assertEqual(by_degree[2], 21)
        trinomials = LinearMultipleFamily('trinomial', '+-').instances(3)
        self.assertEqual(len(trinomials), 792)
        self.assertEqual(Counter(sum(params[0]) for params in trinomials), {1: 4, 2: 104, 3: 684})

    def test_multiplier_signs(self):
        x1, x2, x3, _ = SparsePoly.variables(4)
        params = ((1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0))
        self.assertEqual(LinearMultipleFamily('trinomial', '+-').multiplier(params), x1 + x2 - x3)
        self.assertEqual(LinearMultipleFamily('binomial', '-').multiplier(params[:2]), x1 - x2)
        self.assertEqual(LinearMultipleFamily('binomial', '+').label, '(x^a + x^b)')
        self.assertEqual(LinearMultipleFamily('trinomial', '+-').label, '(x^a + x^b - x^c)')

    def test_bad_shape_or_signs(self):
        with self.assertRaises(InputError):
            LinearMultipleFamily('quadrinomial', '-')
        with self.assertRaises(InputError):
            LinearMultipleFamily('binomial', '+-')


class ScanReportTests(SimpleTestCase):

    def test_smallest_univariate_scan(self):
        report = univariate_family_scan(bound=3)
        self.assertEqual(report.summary_line(), '1 matrices, 5 pairs, 1 triples (20.00%)')
        self.assertEqual(report.records()[0].provenance['params'], [1, 2, 3])
        self.assertEqual(report.discrepancies(), [])

    def test_degree_one_linear_multiples(self):
        minus = linear_multiple_scan('binomial', '-', bound=1)
        self.assertEqual((minus.matrices, minus.pairs), (6, 36))
        self.assertEqual(minus.breakdown()[2]['polynomials'], 6)
        plus = linear_multiple_scan('binomial', '+', bound=1)
        self.assertEqual((plus.matrices, plus.pairs, plus.triples), (6, 42, 0))

    def test_discrepancies_only_at_the_published_bound(self):
        report = ScanReport('univariate', 17, [InstanceRecord((1, 2, 3), 5, [0])],
                            expected=ExpectedCounts(17, 1, 5, 1, '20.00'))
        self.assertEqual(report.discrepancies(), [])
        report.expected = ExpectedCounts(17, 613, 7927, 123, '1.55')
        self.assertEqual(len(report.discrepancies()), 4)
        report.bound = 4
        self.assertEqual(report.discrepancies(), [])

    def test_smallest_trinomial_scan(self):
        report = trinomial_family_scan(bound=2)
        self.assertEqual((report.matrices, report.pairs), (1, 7))
        self.assertLessEqual(report.triples, report.pairs)

    def test_workers_do_not_change_the_result(self):
        serial = run_family_scan(UnivariateFamily(), 5, jobs=1)
        parallel = run_family_scan(UnivariateFamily(), 5, jobs=2)
        self.assertEqual(without_timing(serial), without_timing(parallel))

    def test_checkpoint_resume(self):
        checkpoint = MemoryCheckpoint()
        first = run_family_scan(UnivariateFamily(), 4, checkpoint=checkpoint)
        self.assertEqual(len(checkpoint.stored), 4)
        resumed = MemoryCheckpoint(checkpoint.records)
        second = run_family_scan(UnivariateFamily(), 4, checkpoint=resumed)
        self.assertEqual(resumed.stored, [])
        self.assertEqual(without_timing(first), without_timing(second))

    def test_distinct_models(self):
        report = univariate_family_scan(bound=4, distinct=True)
        self.assertLessEqual(report.distinct, report.triples)
        self.assertEqual(report.summary(timing=False)['distinct_models'], report.distinct)


@unittest.skipUnless(FULL_SCANS, 'set RATMLE_FULL_SCANS=1 to run the published family scans')
class PublishedScanTests(SimpleTestCase):

    def test_univariate(self):
        report = univariate_family_scan(jobs=os.cpu_count() or 1)
        self.assertEqual(report.summary_line(), '613 matrices, 7927 pairs, 123 triples (1.55%)')

    def test_binomial_multiples(self):
        report = linear_multiple_scan('binomial', '-', jobs=os.cpu_count() or 1)
        self.assertEqual(report.summary_line(), '1028 matrices, 8212 pairs, 12 triples (0.15%)')

    def test_trinomial_multiples(self):
        report = linear_multiple_scan('trinomial', '+-', jobs=os.cpu_count() or 1)
        self.assertEqual((report.matrices, report.pairs, report.triples), (792, 8678, 8))
