#!/usr/bin/env python
"""
Quick end-to-end check of the worked examples: coin tree, the cubic Horn pair and
triple, the sixteen-leaf tree and the smallest univariate scan.
Run it after installing requirements; no database is needed.
"""
import json
import os
import sys
from fractions import Fraction as F

import django

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'ratmle.settings')
django.setup()

from hornmle.disctriple import MarkedPoly, ToricMatrix, triple_check
from hornmle.families import univariate_discriminant, univariate_family_scan
from hornmle.horn import HornMatrix, HornPair, horn_map_eval, horn_pair_check
from hornmle.stagedtree import (
    StagedTree, coin_tree, identify_florets, independence_tree, tree_equivalent, tree_horn_pair, tree_mle,
)
from hornmle.verify import verify_model

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'hornmle', 'data')

CUBIC_H = HornMatrix([[-1, -1, -2, -2], [1, 0, 3, 2], [1, 3, 0, 2], [-1, -2, -1, -2]])
CUBIC_LAMBDA = (F(2, 3), F(-4, 27), F(-4, 27), F(1, 27))


def check(label, condition):
    print(f"   {'✓' if condition else '✗'} {label}")
    return bool(condition)


def check_coin_tree():
    """Closed-form estimate of the two-flip coin model"""
    print("\n1. Coin tree...")
    try:
        estimate = tree_mle(coin_tree(), [1, 1, 1])
        return all([
            check("ŝ = (3/5, 2/5)", estimate.s_hat == (F(3, 5), F(2, 5))),
            check("p̂ = (9/25, 6/25, 2/5)", estimate.p_hat == (F(9, 25), F(6, 25), F(2, 5))),
            check("verification report passes", verify_model(coin_tree(), seed=0, trials=20).ok),
        ])
    except Exception as e:
        print(f"   ✗ coin tree failed: {e}")
        return False


def check_cubic_pair():
    """Horn pair and discriminantal triple of the cubic"""
    print("\n2. Cubic Horn pair and triple...")
    try:
        pair = HornPair(CUBIC_H, CUBIC_LAMBDA)
        triple = triple_check(ToricMatrix(((1, 1, 1, 1), (0, 1, 2, 3))),
                              MarkedPoly.from_index(univariate_discriminant(1, 2, 3), 0))
        return all([
            check("Horn pair", horn_pair_check(CUBIC_H, CUBIC_LAMBDA).horn),
            check("φ(1,1,1,1) = (2/3, 4/27, 4/27, 1/27)",
                  horn_map_eval(pair, [1, 1, 1, 1]) == (F(2, 3), F(4, 27), F(4, 27), F(1, 27))),
            check("triple verified with σ = (-1, 1, 1, -1)", triple.verified and triple.sigma == (-1, 1, 1, -1)),
        ])
    except Exception as e:
        print(f"   ✗ cubic pair failed: {e}")
        return False


def check_sixteen_leaf_tree():
    """Reduction and floret identification of the 16-leaf tree"""
    print("\n3. Sixteen-leaf staged tree...")
    try:
        with open(os.path.join(DATA_DIR, 'sixteen_leaf.json'), encoding='utf-8') as f:
            tree = StagedTree.from_dict(json.load(f))
        pair = tree_horn_pair(tree)
        merged = identify_florets(tree, 'f4', 'f5')
        return all([
            check("reduced Horn matrix has 17 rows", pair.H.shape == (17, 16)),
            check("reduced pair is Horn", horn_pair_check(pair.H, pair.lam).horn),
            check("f4 ~ f5 gives the independence model", tree_equivalent(merged, independence_tree(4, 4))),
        ])
    except Exception as e:
        print(f"   ✗ staged tree failed: {e}")
        return False


def check_smallest_scan():
    """Univariate family scan at the smallest bound"""
    print("\n4. Univariate scan, bound 3...")
    try:
        line = univariate_family_scan(bound=3).summary_line()
        print(f"   {line}")
        return check("1 matrices, 5 pairs, 1 triples", line == '1 matrices, 5 pairs, 1 triples (20.00%)')
    except Exception as e:
        print(f"   ✗ scan failed: {e}")
        return False


def main():
    """Run all acceptance checks"""
    print("=" * 60)
    print("Rational MLE Acceptance Checks")
    print("=" * 60)

    results = {
        'Coin tree': check_coin_tree(),
        'Cubic pair': check_cubic_pair(),
        'Staged tree': check_sixteen_leaf_tree(),
        'Univariate scan': check_smallest_scan(),
    }

    print("\n" + "=" * 60)
    print("Summary:")
    print("=" * 60)

    all_passed = True
    for name, passed in results.items():
        print(f"{name}: {'PASSED' if passed else 'FAILED'}")
        all_passed = all_passed and passed

    if all_passed:
        print("\n✓ All acceptance checks passed!")
    else:
        print("\n✗ Some acceptance checks failed. See logs/hornmle.log for details.")

    return 0 if all_passed else 1


if __name__ == "__main__":
    sys.exit(main())
