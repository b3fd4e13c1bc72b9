from fractions import Fraction as F

import numpy as np
from django.test import SimpleTestCase

from hornmle.exceptions import (
    CyclicGraph, InvalidParameter, InvalidTree, NotChordal, SizeMismatch, ZeroDenominator,
)
from hornmle.disctriple import marked_poly_from_pair
from hornmle.horn import friendliness_check, horn_pair_check
from hornmle.stagedtree import (
    ContingencyTable, DAGModel, StagedTree, UndirectedGraph, bayes_net_mle, coin_tree, decomposable_mle,
    from_bayesian_network, identify_florets, independence_tree, junction_tree, leaf_assignments, marginal,
    orient_by_peo, random_tree, star_tree, tree_equivalent, tree_horn, tree_horn_pair, tree_mle,
    tree_mle_aggregated, tree_parametrize, tree_validate,
)
from hornmle.tests import load_data


def sixteen_leaf_tree():
    return StagedTree.from_dict(load_data('sixteen_leaf.json'))


ROW_LABELS = (
    's0', 's1', 'f1', 's2', 's3', 'f2', 's4', 's5', 'f3', 's6', 's7', 'f4',
    's8', 's9', 'f5', 's10', 's11', 'f6', 's12', 's13', 'f7',
)
FLORETS = {f'f{k + 1}': (f's{2 * k}', f's{2 * k + 1}') for k in range(7)}

# edge labels from the root to each leaf of sixteen_leaf.json
LEAF_PATHS = [
    's0 s2 s6 s10', 's0 s2 s6 s11', 's0 s2 s7 s12', 's0 s2 s7 s13',
    's0 s3 s8 s10', 's0 s3 s8 s11', 's0 s3 s9 s12', 's0 s3 s9 s13',
    's1 s4 s6 s10', 's1 s4 s6 s11', 's1 s4 s7 s12', 's1 s4 s7 s13',
    's1 s5 s8 s10', 's1 s5 s8 s11', 's1 s5 s9 s12', 's1 s5 s9 s13',
]

FLORET_PRODUCT = 'f1 f2 f3 f4 f5 f6 f7'
MARKED_TERMS = [
    's0 s2 s6 s10 f3 f5 f7', 's0 s2 s6 s11 f3 f5 f7', 's0 s2 s7 s12 f3 f5 f6', 's0 s2 s7 s13 f3 f5 f6',
    's0 s3 s8 s10 f3 f4 f7', 's0 s3 s8 s11 f3 f4 f7', 's0 s3 s9 s12 f3 f4 f6', 's0 s3 s9 s13 f3 f4 f6',
    's1 s4 s6 s10 f2 f5 f7', 's1 s4 s6 s11 f2 f5 f7', 's1 s4 s7 s12 f2 f5 f6', 's1 s4 s7 s13 f2 f5 f6',
    's1 s5 s8 s10 f2 f4 f7', 's1 s5 s8 s11 f2 f4 f7', 's1 s5 s9 s12 f2 f4 f6', 's1 s5 s9 s13 f2 f4 f6',
]


def exponents(monomial):
    factors = monomial.split()
    return tuple(factors.count(label) for label in ROW_LABELS)


class StagedTreeStructureTests(SimpleTestCase):

    def test_coin_tree(self):
        tree = coin_tree()
        self.assertEqual(tree.leaves, ('HH', 'HT', 'T'))
        self.assertEqual(tree.labels, ('s0', 's1'))
        self.assertEqual(tree.florets, (('s0', 's1'),))
        self.assertEqual(tree.mu, ((2, 1, 0), (0, 1, 1)))

    def test_sixteen_leaf_tree_florets(self):
        tree = sixteen_leaf_tree()
        self.assertEqual(tree_validate(tree), [])
        self.assertEqual(tree.n_leaves, 16)
        self.assertEqual(len(tree.florets), 7)
        self.assertEqual(tree.florets[3], ('s6', 's7'))
        self.assertEqual(tree.resolve_floret('f5'), 4)
        self.assertEqual(tree.resolve_floret(['s9', 's8']), 4)

    def test_overlapping_florets(self):
        tree = StagedTree([('r', 'a', 'x'), ('r', 'b', 'y'), ('a', 'c', 'x'), ('a', 'd', 'z')])
        violations = tree.validate()
        self.assertTrue(any('overlap' in v for v in violations))
        with self.assertRaises(InvalidTree):
            tree.check()

    def test_structural_violations(self):
        self.assertTrue(any('single outgoing edge' in v
                            for v in StagedTree([('r', 'a', 'x'), ('a', 'b', 'y'), ('a', 'c', 'z')]).validate()))
        self.assertTrue(any('root' in v for v in StagedTree([('r', 'a', 'x'), ('q', 'b', 'y')]).validate()))
        self.assertTrue(any('incoming' in v
                            for v in StagedTree([('r', 'a', 'x'), ('r', 'b', 'y'), ('b', 'a', 'x')]).validate()))
        self.assertEqual(StagedTree([]).validate(), ["tree has no edges"])

    def test_dict_round_trip(self):
        tree = sixteen_leaf_tree()
        self.assertEqual(StagedTree.from_dict(tree.to_dict()), tree)

    def test_random_trees_are_valid(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            self.assertEqual(random_tree(rng).validate(), [])


class ParametrizationTests(SimpleTestCase):

    def test_coin_distribution(self):
        self.assertEqual(tree_parametrize(coin_tree(), {'s0': F(1, 2), 's1': F(1, 2)}),
                         (F(1, 4), F(1, 4), F(1, 2)))

    def test_parameters_must_lie_in_the_simplex(self):
        with self.assertRaises(InvalidParameter):
            tree_parametrize(coin_tree(), [F(1, 3), F(1, 3)])
        with self.assertRaises(InvalidParameter):
            tree_parametrize(coin_tree(), [0, 1])
        with self.assertRaises(InvalidParameter):
            tree_parametrize(coin_tree(), [F(1, 2)])


class TreeMLETests(SimpleTestCase):

    def test_coin_estimate(self):
        estimate = tree_mle(coin_tree(), [1, 1, 1])
        self.assertEqual(estimate.s_hat, (F(3, 5), F(2, 5)))
        self.assertEqual(estimate.p_hat, (F(9, 25), F(6, 25), F(2, 5)))
        self.assertEqual(tree_mle_aggregated(coin_tree(), [1, 1, 1]), estimate)

    def test_aggregated_counts_agree_on_random_trees(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            tree = random_tree(rng)
            u = [int(x) for x in rng.integers(1, 30, size=tree.n_leaves)]
            estimate = tree_mle(tree, u)
            self.assertEqual(tree_mle_aggregated(tree, u), estimate)
            self.assertEqual(sum(estimate.p_hat), 1)

    def test_estimate_is_a_fixed_point(self):
        rng = np.random.default_rng(19)
        for _ in range(200):
            tree = random_tree(rng)
            u = [int(x) for x in rng.integers(1, 30, size=tree.n_leaves)]
            p_hat = tree_mle(tree, u).p_hat
            self.assertEqual(tree_mle(tree, p_hat).p_hat, p_hat)
            self.assertEqual(tree_mle(tree, [1000 * p for p in p_hat]).p_hat, p_hat)

    def test_estimate_is_a_model_point(self):
        tree = sixteen_leaf_tree()
        estimate = tree_mle(tree, range(1, 17))
        self.assertEqual(tree_parametrize(tree, estimate.s_hat), estimate.p_hat)

    def test_zero_floret_count(self):
        tree = StagedTree([('root', 'A', 's0'), ('root', 'B', 's1'), ('A', 'A0', 't0'), ('A', 'A1', 't1')])
        with self.assertRaises(ZeroDenominator):
            tree_mle(tree, [0, 0, 1])
        with self.assertRaises(ZeroDenominator):
            tree_mle_aggregated(tree, [0, 0, 1])

    def test_count_length(self):
        with self.assertRaises(SizeMismatch):
            tree_mle(coin_tree(), [1, 2])


class TreeHornTests(SimpleTestCase):

    def test_sixteen_leaf_tree_matrix(self):
        H, lam = tree_horn(sixteen_leaf_tree())
        self.assertEqual(H.shape, (21, 16))
        self.assertEqual(H.row_labels[:6], ('s0', 's1', 'f1', 's2', 's3', 'f2'))
        self.assertEqual(H.row_labels[-3:], ('s12', 's13', 'f7'))
        self.assertEqual(lam, (1,) * 16)
        s6 = H.entries[H.row_labels.index('s6')]
        self.assertEqual([j for j, x in enumerate(s6) if x], [0, 1, 8, 9])

    def test_sixteen_leaf_tree_full_matrix(self):
        H, _ = tree_horn(sixteen_leaf_tree())
        self.assertEqual(H.row_labels, ROW_LABELS)
        expected = []
        for label in ROW_LABELS:
            if label in FLORETS:
                expected.append(tuple(-int(bool(set(FLORETS[label]) & set(path.split()))) for path in LEAF_PATHS))
            else:
                expected.append(tuple(path.split().count(label) for path in LEAF_PATHS))
        self.assertEqual(list(H.entries), expected)

    def test_sixteen_leaf_tree_reduction(self):
        pair = tree_horn_pair(sixteen_leaf_tree())
        self.assertEqual(pair.H.row_labels, (
            'f1', 's2', 's3', 's4', 's5', 's6', 's7', 'f4', 's8', 's9', 'f5',
            's10', 's11', 'f6', 's12', 's13', 'f7',
        ))
        self.assertEqual(pair.lam, (-1,) * 16)
        self.assertTrue(horn_pair_check(pair.H, pair.lam).horn)

    def test_marked_polynomial_of_the_tree(self):
        H, lam = tree_horn(sixteen_leaf_tree())
        marked = marked_poly_from_pair(H, lam)
        self.assertEqual(len(marked.delta), 17)
        self.assertEqual({sum(e) for _, e in marked.delta.terms()}, {7})
        self.assertEqual(marked.coefficient, 1)
        expected = {exponents(FLORET_PRODUCT): 1}
        for monomial in MARKED_TERMS:
            expected[exponents(monomial)] = -1
        self.assertEqual(dict((e, c) for c, e in marked.delta.terms()), expected)

    def test_random_trees_are_friendly(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            H, lam = tree_horn(random_tree(rng, max_leaves=12))
            self.assertTrue(friendliness_check(H, lam))

    def test_coin_pair_is_horn(self):
        H, lam = tree_horn(coin_tree())
        self.assertEqual(lam, (1, 1, -1))
        self.assertTrue(horn_pair_check(H, lam).horn)


class IdentificationTests(SimpleTestCase):

    def test_identified_florets_give_independence_model(self):
        merged = identify_florets(sixteen_leaf_tree(), 'f4', 'f5')
        self.assertEqual(len(merged.florets), 6)
        self.assertTrue(tree_equivalent(merged, independence_tree(4, 4)))
        self.assertFalse(tree_equivalent(sixteen_leaf_tree(), independence_tree(4, 4)))

    def test_sizes_must_match(self):
        with self.assertRaises(SizeMismatch):
            identify_florets(independence_tree(2, 3), 'f1', 'f2')

    def test_star_trees(self):
        self.assertTrue(tree_equivalent(star_tree(3), star_tree(3)))
        self.assertFalse(tree_equivalent(star_tree(4), independence_tree(2, 2)))


class GraphicalModelTests(SimpleTestCase):

    def setUp(self):
        dag = load_data('chain_dag.json')
        table = load_data('chain_table.json')
        self.dag = DAGModel.from_edges(dag['states'], dag['edges'])
        self.table = ContingencyTable(table['dims'], table['counts'])

    def test_marginal(self):
        m = marginal(self.table, [1])
        self.assertEqual(m.dims, (2,))
        self.assertEqual(m.flat(), (F(3 + 1 + 4 + 1 + 5 + 9 + 2 + 6), F(5 + 3 + 5 + 8 + 9 + 7 + 9 + 3)))

    def test_junction_tree_of_a_chain(self):
        cliques, separators = junction_tree(UndirectedGraph.from_cliques('[12][23][34]'))
        self.assertEqual(cliques, [(1, 2), (2, 3), (3, 4)])
        self.assertEqual(separators, [(2,), (3,)])

    def test_decomposable_equals_bayesian_network(self):
        G = UndirectedGraph.from_cliques('[12][23][34]')
        decomposable = decomposable_mle(G, (2, 2, 2, 2), self.table)
        self.assertEqual(decomposable, bayes_net_mle(self.dag, self.table))
        self.assertEqual(bayes_net_mle(orient_by_peo(G, (2, 2, 2, 2)), self.table), decomposable)
        self.assertEqual(decomposable.total, 1)

    def test_staged_tree_of_the_network(self):
        tree = from_bayesian_network(self.dag)
        self.assertEqual(tree.n_leaves, 16)
        self.assertEqual(leaf_assignments(self.dag)[:3], [(0, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0)])
        estimate = tree_mle(tree, self.table.flat())
        self.assertEqual(estimate.p_hat, bayes_net_mle(self.dag, self.table).flat())

    def test_star_graph_through_its_staged_tree(self):
        G = UndirectedGraph.from_cliques('[14][24][34]')
        decomposable = decomposable_mle(G, (2, 2, 2, 2), self.table)
        dag = orient_by_peo(G, (2, 2, 2, 2))
        assignments = leaf_assignments(dag)
        estimate = tree_mle(from_bayesian_network(dag), [self.table[a] for a in assignments])
        self.assertEqual(list(estimate.p_hat), [decomposable[a] for a in assignments])
        self.assertEqual(decomposable, bayes_net_mle(dag, self.table))

    def test_four_cycle_is_not_chordal(self):
        with self.assertRaises(NotChordal):
            junction_tree(UndirectedGraph.from_cliques('[12][23][34][14]'))

    def test_cyclic_network(self):
        with self.assertRaises(CyclicGraph):
            DAGModel.from_edges([2, 2], [(1, 2), (2, 1)])

    def test_table_size(self):
        with self.assertRaises(SizeMismatch):
            ContingencyTable([2, 2], [1, 2, 3])
