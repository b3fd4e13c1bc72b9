import json
import os
import tempfile
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction
from io import StringIO

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase

from hornmle.cli import INPUT_ERROR, VERIFICATION_FAILED, run
from hornmle.models import InstanceResult, ScanCheckpoint
from hornmle.tests import data_path, load_data


class CommandTestMixin:

    def setUp(self):
        super().setUp()
        self.tmp = tempfile.TemporaryDirectory()
        self.addCleanup(self.tmp.cleanup)

    def write_json(self, name, data):
        path = os.path.join(self.tmp.name, name)
        with open(path, 'w', encoding='utf-8') as f:
            json.dump(data, f)
        return path

    def call(self, *args):
        out, err = StringIO(), StringIO()
        call_command(*args, stdout=out, stderr=err)
        return out.getvalue()

    def call_json(self, *args):
        return json.loads(self.call(*args))

    def run_cli(self, *argv):
        out, err = StringIO(), StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = run(list(argv))
        return code, out.getvalue(), err.getvalue()


class TreeCommandTests(CommandTestMixin, SimpleTestCase):

    def test_mle(self):
        data = self.call_json('tree', 'mle', data_path('coin.json'), '--counts', '1,1,1')
        self.assertEqual(data['s_hat'], ['3/5', '2/5'])
        self.assertEqual(data['p_hat'], ['9/25', '6/25', '2/5'])
        self.assertEqual(data['leaves'], ['HH', 'HT', 'T'])

    def test_mle_table(self):
        output = self.call('tree', 'mle', data_path('coin.json'), '--counts', '1,1,1', '--aggregated',
                           '--format', 'table')
        self.assertIn('ŝ = (3/5, 2/5)', output)
        self.assertIn('s0 = 3/5 (0.6)', output)

    def test_mle_needs_counts(self):
        with self.assertRaises(CommandError) as cm:
            self.call('tree', 'mle', data_path('coin.json'))
        self.assertEqual(cm.exception.returncode, INPUT_ERROR)

    def test_mle_with_an_empty_floret(self):
        counts = ','.join(['1'] * 8 + ['0'] * 8)
        code, _, err = self.run_cli('tree', 'mle', data_path('sixteen_leaf.json'), '--counts', counts)
        self.assertEqual(code, INPUT_ERROR)
        self.assertIn('zero aggregate count', err)

    def test_validate(self):
        data = self.call_json('tree', 'validate', data_path('sixteen_leaf.json'))
        self.assertTrue(data['valid'])
        self.assertEqual(len(data['leaves']), 16)
        self.assertEqual(data['florets']['f4'], ['s6', 's7'])

    def test_invalid_tree(self):
        path = self.write_json('overlap.json', {'edges': [
            {'from': 'r', 'to': 'a', 'label': 'x'}, {'from': 'r', 'to': 'b', 'label': 'y'},
            {'from': 'a', 'to': 'c', 'label': 'x'}, {'from': 'a', 'to': 'd', 'label': 'z'},
        ]})
        code, _, err = self.run_cli('tree', 'validate', path)
        self.assertEqual(code, INPUT_ERROR)
        self.assertIn('overlap', err)

    def test_reduced_horn_matrix(self):
        data = self.call_json('tree', 'horn', data_path('sixteen_leaf.json'), '--reduced')
        self.assertEqual(len(data['H']), 17)
        self.assertNotIn('s0', data['row_labels'])
        full = self.call_json('tree', 'horn', data_path('sixteen_leaf.json'))
        self.assertEqual(len(full['H']), 21)

    def test_identify_and_equivalence(self):
        output = self.call('tree', 'identify', data_path('sixteen_leaf.json'), '--florets', 'f4', 'f5', '--format', 'table')
        self.assertIn('6 florets, friendly = True', output)
        merged = self.call_json('tree', 'identify', data_path('sixteen_leaf.json'), '--florets', 'f4', 'f5')
        path = self.write_json('merged.json', merged)
        self.assertEqual(self.call_json('tree', 'equiv', path, path), {'equivalent': True})
        self.assertEqual(self.call_json('tree', 'equiv', path, data_path('coin.json')), {'equivalent': False})

    def test_from_dag(self):
        data = self.call_json('tree', 'from-dag', data_path('chain_dag.json'), '--table', data_path('chain_table.json'))
        self.assertEqual(len(data['leaf_states']), 16)
        self.assertEqual(sum(Fraction(x) for x in data['mle']['counts']), 1)

    def test_output_file(self):
        path = os.path.join(self.tmp.name, 'mle.json')
        printed = self.call_json('tree', 'mle', data_path('coin.json'), '--counts', '1,1,1', '--output', path)
        with open(path, encoding='utf-8') as f:
            self.assertEqual(json.load(f), printed)


class HornCommandTests(CommandTestMixin, SimpleTestCase):

    def test_check(self):
        data = self.call_json('horn', 'check', data_path('cubic_pair.json'))
        self.assertTrue(data['horn'])
        self.assertEqual(data['sigma'], [-1, 1, 1, -1])

    def test_check_failure_exit_code(self):
        pair = load_data('cubic_pair.json')
        pair['lambda'][3] = '2/27'
        code, out, err = self.run_cli('horn', 'check', self.write_json('perturbed.json', pair))
        self.assertEqual(code, VERIFICATION_FAILED)
        self.assertFalse(json.loads(out)['friendly'])
        self.assertIn('friendly', err)

    def test_bad_column_sum(self):
        code, _, err = self.run_cli('horn', 'check', data_path('bad.json'))
        self.assertEqual(code, INPUT_ERROR)
        self.assertIn('column 3 sums to 1', err)

    def test_eval(self):
        data = self.call_json('horn', 'eval', data_path('cubic_pair.json'), '--counts', '1,1,1,1')
        self.assertEqual(data['value'], ['2/3', '4/27', '4/27', '1/27'])
        self.assertEqual(data['sum'], '1')

    def test_eval_at_a_pole(self):
        code, _, err = self.run_cli('horn', 'eval', data_path('cubic_pair.json'), '--counts', '2,0,0,-1')
        self.assertEqual(code, INPUT_ERROR)
        self.assertIn('vanishes at u', err)

    def test_reduce_and_equal(self):
        data = self.call_json('horn', 'reduce', data_path('cubic_pair.json'))
        self.assertEqual(len(data['H']), 4)
        pair = load_data('cubic_pair.json')
        permuted = {
            'H': [[row[j] for j in (2, 0, 3, 1)] for row in pair['H']],
            'lambda': [pair['lambda'][j] for j in (2, 0, 3, 1)],
        }
        result = self.call_json('horn', 'equal', data_path('cubic_pair.json'), self.write_json('perm.json', permuted))
        self.assertTrue(result['equal'])


class TripleCommandTests(CommandTestMixin, SimpleTestCase):

    def test_check(self):
        data = self.call_json('triple', 'check', data_path('cubic_triple.json'))
        self.assertTrue(data['verified'])
        self.assertEqual(data['lambda'], ['2/3', '-4/27', '-4/27', '1/27'])

    def test_other_marked_term_fails(self):
        triple = load_data('cubic_triple.json')
        triple['marked_term_index'] = 3
        code, _, _ = self.run_cli('triple', 'check', self.write_json('t3.json', triple))
        self.assertEqual(code, VERIFICATION_FAILED)

    def test_marked_term_out_of_range(self):
        triple = load_data('cubic_triple.json')
        triple['marked_term_index'] = 9
        code, _, err = self.run_cli('triple', 'check', self.write_json('t9.json', triple))
        self.assertEqual(code, INPUT_ERROR)
        self.assertIn('marked_term_index', err)

    def test_from_pair_and_to_pair(self):
        data = self.call_json('triple', 'from-pair', data_path('cubic_pair.json'))
        self.assertEqual(data['A'], [[1, 0, -1, -2], [0, 1, 2, 3]])
        self.assertEqual(data['marked_term'], 'x1^2*x4^2')
        self.assertTrue(data['verified'])
        pair = self.call_json('triple', 'to-pair', data_path('cubic_triple.json'))
        self.assertEqual(pair['H'], load_data('cubic_pair.json')['H'])


class DiscCommandTests(CommandTestMixin, SimpleTestCase):

    def test_univariate(self):
        data = self.call_json('disc', 'univariate', '--params', '1,2,3')
        self.assertEqual(data['terms'][0], {'c': '27', 'e': [2, 0, 0, 2]})
        self.assertEqual(len(data['terms']), 5)
        direct = self.call_json('disc', 'univariate', '--params', '1,2,3', '--method', 'cofactor', '--direct')
        self.assertEqual(direct, data)

    def test_trinomial_table(self):
        output = self.call('disc', 'trinomial', '--params', '1,2,1,2', '--format', 'table')
        self.assertIn('terms, degree 4', output)

    def test_wrong_parameter_count(self):
        code, _, _ = self.run_cli('disc', 'univariate', '--params', '1,2')
        self.assertEqual(code, INPUT_ERROR)
        code, _, _ = self.run_cli('disc', 'univariate', '--params', '3,2,1')
        self.assertEqual(code, INPUT_ERROR)


class ScanCommandTests(CommandTestMixin, SimpleTestCase):

    def test_json_lines(self):
        lines = [json.loads(line) for line in self.call('scan', 'univariate', '--bound', '3').splitlines()]
        self.assertEqual(lines[0], {'params': [1, 2, 3], 'terms': 5, 'passing': [0], 'degree': None})
        summary = lines[-1]['summary']
        self.assertEqual((summary['matrices'], summary['pairs'], summary['triples']), (1, 5, 1))
        self.assertNotIn('seconds', summary)

    def test_repeatable_output(self):
        self.assertEqual(self.call('scan', 'univariate', '--bound', '4'), self.call('scan', 'univariate', '--bound', '4'))

    def test_table(self):
        output = self.call('scan', 'univariate', '--bound', '3', '--format', 'table')
        self.assertIn('1 matrices, 5 pairs, 1 triples (20.00%)', output)

    def test_linear_multiples_table(self):
        output = self.call('scan', 'linear-multiples', '--shape', 'binomial', '--signs', '+', '--bound', '1',
                           '--format', 'table')
        self.assertIn('(x^a + x^b)', output)
        self.assertIn('degree 2: 6 polynomials, 42 pairs, 0 Horn pairs', output)

    def test_shape_only_for_linear_multiples(self):
        code, _, err = self.run_cli('scan', 'univariate', '--shape', 'binomial', '--bound', '3')
        self.assertEqual(code, INPUT_ERROR)
        self.assertIn('linear-multiples', err)

    def test_unknown_family(self):
        code, _, _ = self.run_cli('scan', 'quartic')
        self.assertEqual(code, INPUT_ERROR)


class ScanResumeTests(CommandTestMixin, TestCase):

    def test_resume_reuses_stored_instances(self):
        first = self.call('scan', 'univariate', '--bound', '4', '--resume', 'small')
        self.assertEqual(ScanCheckpoint.objects.get(name='small').results.count(), 4)
        second = self.call('scan', 'univariate', '--bound', '4', '--resume', 'small')
        self.assertEqual(first, second)
        self.assertEqual(InstanceResult.objects.count(), 4)

    def test_checkpoint_of_another_bound(self):
        self.call('scan', 'univariate', '--bound', '3', '--resume', 'other')
        with self.assertRaises(CommandError) as cm:
            self.call('scan', 'univariate', '--bound', '4', '--resume', 'other')
        self.assertEqual(cm.exception.returncode, INPUT_ERROR)

    def test_linear_multiples_get_one_checkpoint_per_sign(self):
        self.call('scan', 'linear-multiples', '--shape', 'binomial', '--bound', '1', '--resume', 'lm')
        self.assertEqual(sorted(ScanCheckpoint.objects.values_list('name', flat=True)),
                         ['lm:(x^a + x^b)', 'lm:(x^a - x^b)'])


class VerifyCommandTests(CommandTestMixin, SimpleTestCase):

    def test_tree(self):
        data = self.call_json('verify', 'model', data_path('coin.json'), '--seed', '1', '--trials', '5')
        self.assertEqual(data['seed'], 1)
        self.assertTrue(all(check['ok'] for check in data['checks']))

    def test_pair_with_relations(self):
        data = self.call_json('verify', 'model', data_path('cubic_pair.json'), '--trials', '5',
                              '--relations', data_path('cubic_relations.json'))
        self.assertEqual([check['name'] for check in data['checks']],
                         ['critical_gradient', 'idempotence', 'dominance', 'relations'])
        self.assertEqual(data['failures'], [])

    def test_model_record(self):
        record = self.call_json('triple', 'check', data_path('cubic_triple.json'))
        record['term_index'] = record['marked_term_index']
        data = self.call_json('verify', 'model', self.write_json('record.json', record), '--trials', '5')
        self.assertEqual(data['failures'], [])

    def test_broken_pair(self):
        pair = load_data('cubic_pair.json')
        pair['lambda'][3] = '2/27'
        code, _, err = self.run_cli('verify', 'model', self.write_json('broken.json', pair), '--trials', '5')
        self.assertEqual(code, VERIFICATION_FAILED)
        self.assertIn('verification failure', err)


class RunTests(CommandTestMixin, SimpleTestCase):

    def test_usage(self):
        code, out, _ = self.run_cli()
        self.assertEqual(code, INPUT_ERROR)
        self.assertIn('usage: hornmle', out)
        self.assertEqual(self.run_cli('--help')[0], 0)

    def test_unknown_subcommand(self):
        code, _, err = self.run_cli('matrix', 'check')
        self.assertEqual(code, INPUT_ERROR)
        self.assertIn("unknown subcommand 'matrix'", err)

    def test_unknown_action(self):
        code, _, _ = self.run_cli('tree', 'grow', data_path('coin.json'))
        self.assertEqual(code, INPUT_ERROR)

    def test_missing_file(self):
        code, _, err = self.run_cli('tree', 'validate', os.path.join(self.tmp.name, 'nope.json'))
        self.assertEqual(code, INPUT_ERROR)
        self.assertIn('no such file', err)

    def test_success(self):
        code, out, _ = self.run_cli('tree', 'mle', data_path('coin.json'), '--counts', '1,1,1')
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(out)['p_hat'], ['9/25', '6/25', '2/5'])
