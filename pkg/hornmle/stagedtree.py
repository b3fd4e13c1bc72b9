"""
Staged trees and the graphical models they carry.

Leaves (root-to-leaf paths) are enumerated depth first following edge insertion
order; labels are ordered by first appearance in the edge list and florets by their
smallest label. Graph and table helpers use 1-based variable indices.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .exactalg import as_rational, format_rational
from .exceptions import (
    CyclicGraph, InputError, InvalidParameter, InvalidTree, NotChordal, SizeMismatch, ZeroDenominator,
)
from .horn import HornMatrix, HornPair, horn_pair_equal, reduce_horn

logger = logging.getLogger('hornmle')


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    label: str


class TreeEstimate(NamedTuple):
    s_hat: Tuple[Fraction, ...]
    p_hat: Tuple[Fraction, ...]


class StagedTree:
    """
    Rooted edge-labelled tree. Construction only records the edges; validity
    (single root, florets equal or disjoint, ...) is reported by validate().
    """

    def __init__(self, edges: Sequence, nodes: Optional[Sequence[str]] = None):
        parsed = []
        for edge in edges:
            if isinstance(edge, Edge):
                parsed.append(edge)
            elif isinstance(edge, Mapping):
                parsed.append(Edge(str(edge['from']), str(edge['to']), str(edge['label'])))
            else:
                source, target, label = edge
                parsed.append(Edge(str(source), str(target), str(label)))
        self.edges: Tuple[Edge, ...] = tuple(parsed)
        order = list(nodes) if nodes is not None else []
        for edge in self.edges:
            for node in (edge.source, edge.target):
                if node not in order:
                    order.append(node)
        self.nodes: Tuple[str, ...] = tuple(str(node) for node in order)

    # ------------------------------------------------------------ structure

    @cached_property
    def children(self) -> Dict[str, List[Edge]]:
        children = {node: [] for node in self.nodes}
        for edge in self.edges:
            children[edge.source].append(edge)
        return children

    @cached_property
    def parents(self) -> Dict[str, List[Edge]]:
        parents = {node: [] for node in self.nodes}
        for edge in self.edges:
            parents[edge.target].append(edge)
        return parents

    @cached_property
    def roots(self) -> List[str]:
        return [node for node in self.nodes if not self.parents[node]]

    @property
    def root(self) -> str:
        if len(self.roots) != 1:
            raise InvalidTree(f"expected one root, found {len(self.roots)}")
        return self.roots[0]

    @cached_property
    def labels(self) -> Tuple[str, ...]:
        seen = {}
        for edge in self.edges:
            seen.setdefault(edge.label, None)
        return tuple(seen)

    @cached_property
    def label_index(self) -> Dict[str, int]:
        return {label: i for i, label in enumerate(self.labels)}

    def is_leaf(self, node: str) -> bool:
        return not self.children[node]

    @cached_property
    def paths(self) -> Tuple[Tuple[Edge, ...], ...]:
        """Root-to-leaf paths, depth first in edge insertion order."""
        self.check()
        paths = []
        stack = [(self.root, ())]
        while stack:
            node, path = stack.pop()
            if self.is_leaf(node):
                paths.append(path)
                continue
            for edge in reversed(self.children[node]):
                stack.append((edge.target, path + (edge,)))
        return tuple(paths)

    @property
    def leaves(self) -> Tuple[str, ...]:
        return tuple(path[-1].target for path in self.paths)

    @property
    def n_leaves(self) -> int:
        return len(self.paths)

    @cached_property
    def vertex_florets(self) -> Dict[str, Tuple[str, ...]]:
        return {node: tuple(edge.label for edge in self.children[node])
                for node in self.nodes if self.children[node]}

    @cached_property
    def florets(self) -> Tuple[Tuple[str, ...], ...]:
        """Distinct florets as label tuples in label order, sorted by their first label."""
        distinct = {}
        for labels in self.vertex_florets.values():
            key = frozenset(labels)
            distinct.setdefault(key, tuple(sorted(key, key=self.label_index.__getitem__)))
        return tuple(sorted(distinct.values(), key=lambda f: self.label_index[f[0]]))

    @property
    def floret_names(self) -> Tuple[str, ...]:
        return tuple(f"f{k + 1}" for k in range(len(self.florets)))

    def floret_of(self, label: str) -> int:
        for k, floret in enumerate(self.florets):
            if label in floret:
                return k
        raise InputError(f"unknown label {label}")

    def resolve_floret(self, floret: Union[int, str, Sequence[str]]) -> int:
        """Floret index from an index, a name like 'f4', or its label set."""
        if isinstance(floret, int):
            index = floret
        elif isinstance(floret, str):
            if not (floret.startswith('f') and floret[1:].isdigit()):
                raise InputError(f"unknown floret {floret}")
            index = int(floret[1:]) - 1
        else:
            wanted = frozenset(floret)
            matches = [k for k, f in enumerate(self.florets) if frozenset(f) == wanted]
            if not matches:
                raise InputError(f"no floret with labels {sorted(wanted)}")
            index = matches[0]
        if not 0 <= index < len(self.florets):
            raise InputError(f"floret index {index + 1} out of range")
        return index

    @cached_property
    def mu(self) -> Tuple[Tuple[int, ...], ...]:
        """Path exponent matrix: mu[i][j] counts label i on path j."""
        rows = [[0] * self.n_leaves for _ in self.labels]
        for j, path in enumerate(self.paths):
            for edge in path:
                rows[self.label_index[edge.label]][j] += 1
        return tuple(tuple(row) for row in rows)

    # ------------------------------------------------------------ validation

    def validate(self) -> List[str]:
        violations = []
        if not self.edges:
            return ["tree has no edges"]
        for node in self.nodes:
            if len(self.parents[node]) > 1:
                violations.append(f"vertex {node} has {len(self.parents[node])} incoming edges")
        if len(self.roots) != 1:
            violations.append(f"expected one root, found {len(self.roots)}: {', '.join(self.roots) or 'none'}")
        else:
            reached, stack = set(), [self.roots[0]]
            while stack:
                node = stack.pop()
                if node in reached:
                    continue
                reached.add(node)
                stack.extend(edge.target for edge in self.children[node])
            unreached = [node for node in self.nodes if node not in reached]
            if unreached:
                violations.append(f"vertices not reachable from the root: {', '.join(unreached)}")
        for node, labels in self.vertex_florets.items():
            if len(labels) < 2:
                violations.append(f"vertex {node} has a single outgoing edge")
            if len(set(labels)) != len(labels):
                violations.append(f"floret of vertex {node} repeats a label: {{{', '.join(labels)}}}")
        seen = []
        for node, labels in self.vertex_florets.items():
            current = frozenset(labels)
            for other_node, other in seen:
                if other != current and other & current:
                    violations.append(
                        f"florets {{{', '.join(sorted(other))}}} at {other_node} and "
                        f"{{{', '.join(sorted(current))}}} at {node} overlap"
                    )
            if all(other != current for _, other in seen):
                seen.append((node, current))
        return violations

    def check(self) -> 'StagedTree':
        violations = self.validate()
        if violations:
            raise InvalidTree(violations)
        return self

    # ------------------------------------------------------------ serialization

    def to_dict(self) -> dict:
        return {
            'nodes': list(self.nodes),
            'edges': [{'from': e.source, 'to': e.target, 'label': e.label} for e in self.edges],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> 'StagedTree':
        return cls(data['edges'], data.get('nodes'))

    def __eq__(self, other):
        return isinstance(other, StagedTree) and self.edges == other.edges and self.nodes == other.nodes

    def __hash__(self):
        return hash((self.edges, self.nodes))

    def __repr__(self):
        return f"StagedTree({len(self.nodes)} nodes, {len(self.labels)} labels)"


def tree_validate(T: StagedTree) -> List[str]:
    """Violations of the staged-tree conditions; an empty list means the tree is valid."""
    return T.validate()


# ---------------------------------------------------------------- constructors

def coin_tree() -> StagedTree:
    """Flip a coin; on heads flip it again."""
    return StagedTree([
        ('root', 'H', 's0'), ('root', 'T', 's1'),
        ('H', 'HH', 's0'), ('H', 'HT', 's1'),
    ])


def star_tree(k: int) -> StagedTree:
    if k < 2:
        raise InputError("a star tree needs at least two leaves")
    return StagedTree([('r', f"l{i + 1}", f"s{i}") for i in range(k)])


def independence_tree(r1: int, r2: int) -> StagedTree:
    """Two independent variables with r1 and r2 states: one shared floret on the second level."""
    if r1 < 2 or r2 < 2:
        raise InputError("state counts must be at least 2")
    edges = [('r', f"a{i}", f"a{i}") for i in range(r1)]
    for i in range(r1):
        edges.extend((f"a{i}", f"a{i}b{k}", f"b{k}") for k in range(r2))
    return StagedTree(edges)


def random_tree(rng: np.random.Generator, depth: int = 4, max_children: int = 3,
                max_leaves: Optional[int] = None, merge_probability: float = 0.5) -> StagedTree:
    """
    Random valid staged tree: every inner vertex gets 2..max_children children and
    joins an existing stage of the same size with probability merge_probability.
    """
    edges = []
    stages: Dict[int, List[Tuple[str, ...]]] = {}
    counter = {'label': 0, 'node': 0}
    leaves = 1
    frontier = [('v0', 0)]
    while frontier:
        next_frontier = []
        for node, level in frontier:
            is_root = level == 0
            if not is_root and (level >= depth or rng.random() < 0.4):
                continue
            k = int(rng.integers(2, max_children + 1))
            if max_leaves is not None and leaves + k - 1 > max_leaves:
                continue
            leaves += k - 1
            if stages.get(k) and rng.random() < merge_probability:
                labels = stages[k][int(rng.integers(len(stages[k])))]
            else:
                labels = tuple(f"s{counter['label'] + i}" for i in range(k))
                counter['label'] += k
                stages.setdefault(k, []).append(labels)
            for label in labels:
                counter['node'] += 1
                child = f"v{counter['node']}"
                edges.append((node, child, label))
                next_frontier.append((child, level + 1))
        frontier = next_frontier
    return StagedTree(edges)


# ---------------------------------------------------------------- parametrization and MLE

def _parameter_vector(T: StagedTree, s: Union[Sequence, Mapping]) -> Tuple[Fraction, ...]:
    if isinstance(s, Mapping):
        missing = [label for label in T.labels if label not in s]
        if missing:
            raise InvalidParameter(f"no value for {', '.join(missing)}")
        values = tuple(as_rational(s[label]) for label in T.labels)
    else:
        values = tuple(as_rational(x) for x in s)
        if len(values) != len(T.labels):
            raise InvalidParameter(f"{len(values)} parameters for {len(T.labels)} labels")
    return values


def tree_parametrize(T: StagedTree, s: Union[Sequence, Mapping]) -> Tuple[Fraction, ...]:
    T.check()
    values = _parameter_vector(T, s)
    for label, x in zip(T.labels, values):
        if not 0 < x < 1:
            raise InvalidParameter(f"{label} = {x} is outside (0, 1)")
    for name, floret in zip(T.floret_names, T.florets):
        total = sum(values[T.label_index[label]] for label in floret)
        if total != 1:
            raise InvalidParameter(f"parameters of {name} sum to {total}")
    p = []
    for j in range(T.n_leaves):
        value = Fraction(1)
        for i, row in enumerate(T.mu):
            if row[j]:
                value *= values[i] ** row[j]
        p.append(value)
    return tuple(p)


def _counts(T: StagedTree, u: Sequence) -> Tuple[Fraction, ...]:
    counts = tuple(as_rational(x) for x in u)
    if len(counts) != T.n_leaves:
        raise SizeMismatch(f"{len(counts)} counts for {T.n_leaves} leaves")
    if any(x < 0 for x in counts):
        raise InputError("counts must be nonnegative")
    if not any(counts):
        raise InputError("all counts are zero")
    return counts


def _path_products(T: StagedTree, s_hat: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    p = []
    for path in T.paths:
        value = Fraction(1)
        for edge in path:
            value *= s_hat[T.label_index[edge.label]]
        p.append(value)
    return tuple(p)


def tree_mle(T: StagedTree, u: Sequence) -> TreeEstimate:
    T.check()
    counts = _counts(T, u)
    alpha = np.array(T.mu, dtype=object) @ np.array(counts, dtype=object)
    s_hat = [Fraction(0)] * len(T.labels)
    for name, floret in zip(T.floret_names, T.florets):
        indices = [T.label_index[label] for label in floret]
        denominator = sum((alpha[i] for i in indices), Fraction(0))
        if denominator == 0:
            raise ZeroDenominator(f"floret {name} has zero aggregate count")
        for i in indices:
            s_hat[i] = Fraction(alpha[i]) / denominator
    return TreeEstimate(tuple(s_hat), _path_products(T, s_hat))


def tree_mle_aggregated(T: StagedTree, u: Sequence) -> TreeEstimate:
    """Same estimate from edge transition counts u[v'] / u[v], aggregated per label."""
    T.check()
    counts = _counts(T, u)
    through = {leaf: c for leaf, c in zip(T.leaves, counts)}

    def count(node):
        if node not in through:
            through[node] = sum((count(edge.target) for edge in T.children[node]), Fraction(0))
        return through[node]

    count(T.root)
    numerators = {label: Fraction(0) for label in T.labels}
    denominators = {label: Fraction(0) for label in T.labels}
    for edge in T.edges:
        numerators[edge.label] += through[edge.target]
        denominators[edge.label] += through[edge.source]
    s_hat = []
    for label in T.labels:
        if denominators[label] == 0:
            raise ZeroDenominator(f"floret of {label} has zero aggregate count")
        s_hat.append(numerators[label] / denominators[label])
    return TreeEstimate(tuple(s_hat), _path_products(T, s_hat))


# ---------------------------------------------------------------- Horn pairs

def tree_horn(T: StagedTree) -> Tuple[HornMatrix, Tuple[Fraction, ...]]:
    """Rows per floret: its labels, then the floret row (minus the summed label rows)."""
    T.check()
    rows, labels = [], []
    for name, floret in zip(T.floret_names, T.florets):
        floret_row = [0] * T.n_leaves
        for label in floret:
            row = T.mu[T.label_index[label]]
            rows.append(row)
            labels.append(label)
            floret_row = [a - b for a, b in zip(floret_row, row)]
        rows.append(tuple(floret_row))
        labels.append(name)
    lam = tuple(Fraction((-1) ** len(path)) for path in T.paths)
    return HornMatrix(tuple(rows), tuple(labels)), lam


def tree_horn_pair(T: StagedTree) -> HornPair:
    """Reduced Horn pair of the tree model."""
    H, lam = tree_horn(T)
    return reduce_horn(H, lam)


def identify_florets(T: StagedTree, f, f_prime, bijection: Optional[Mapping[str, str]] = None) -> StagedTree:
    """
    Tree with florets f and f' merged: every edge labelled s' (in f') is relabelled s
    where bijection[s] = s'. Without a bijection labels are paired in label order.
    """
    T.check()
    first, second = T.resolve_floret(f), T.resolve_floret(f_prime)
    if first == second:
        raise InputError(f"cannot identify floret {T.floret_names[first]} with itself")
    source, target = T.florets[first], T.florets[second]
    if len(source) != len(target):
        raise SizeMismatch(f"florets {T.floret_names[first]} and {T.floret_names[second]} "
                           f"have sizes {len(source)} and {len(target)}")
    if bijection is None:
        bijection = dict(zip(source, target))
    if set(bijection) != set(source) or set(bijection.values()) != set(target):
        raise InputError(f"bijection must map {set(source)} onto {set(target)}")
    inverse = {v: k for k, v in bijection.items()}
    edges = [Edge(e.source, e.target, inverse.get(e.label, e.label)) for e in T.edges]
    return StagedTree(edges, T.nodes).check()


def tree_equivalent(T1: StagedTree, T2: StagedTree) -> bool:
    T1.check()
    T2.check()
    if T1.n_leaves != T2.n_leaves:
        return False
    return horn_pair_equal(tree_horn_pair(T1), tree_horn_pair(T2))


# ---------------------------------------------------------------- contingency tables

class ContingencyTable:
    """Dense table of nonnegative rational counts, stored as a numpy object array."""

    def __init__(self, dims: Sequence[int], counts):
        self.dims = tuple(int(r) for r in dims)
        array = np.array(counts, dtype=object)
        size = int(np.prod(self.dims, dtype=object)) if self.dims else 1
        if array.size != size:
            raise SizeMismatch(f"{array.size} counts for dims {list(self.dims)} (expected {size})")
        flat = [as_rational(x) for x in array.reshape(-1)]
        if any(x < 0 for x in flat):
            raise InputError("counts must be nonnegative")
        values = np.empty(size, dtype=object)
        values[:] = flat
        self.counts = values.reshape(self.dims)

    @property
    def total(self) -> Fraction:
        return sum(self.flat(), Fraction(0))

    def flat(self) -> Tuple[Fraction, ...]:
        return tuple(self.counts.reshape(-1))

    def __getitem__(self, index):
        return self.counts[index]

    def __eq__(self, other):
        return isinstance(other, ContingencyTable) and self.dims == other.dims and self.flat() == other.flat()

    def to_dict(self) -> dict:
        return {'dims': list(self.dims), 'counts': [format_rational(x) for x in self.flat()]}

    @classmethod
    def from_dict(cls, data: Mapping) -> 'ContingencyTable':
        return cls(data['dims'], data['counts'])

    def __repr__(self):
        return f"ContingencyTable(dims={list(self.dims)})"


def marginal(u: ContingencyTable, C: Sequence[int]) -> ContingencyTable:
    """Sum out every variable not in C (1-based); the result keeps C in increasing order."""
    keep = sorted(set(C))
    if any(not 1 <= k <= len(u.dims) for k in keep):
        raise InputError(f"marginal {list(C)} outside variables 1..{len(u.dims)}")
    drop = tuple(k for k in range(len(u.dims)) if k + 1 not in keep)
    summed = u.counts.sum(axis=drop) if drop else u.counts
    return ContingencyTable([u.dims[k - 1] for k in keep], np.asarray(summed, dtype=object))


# ---------------------------------------------------------------- graphs

@dataclass(frozen=True)
class UndirectedGraph:
    n: int
    edges: frozenset

    @classmethod
    def from_cliques(cls, spec: str, n: Optional[int] = None) -> 'UndirectedGraph':
        """'[14][24][34]' style notation; single digits name the vertices."""
        groups = [group for group in spec.replace(' ', '').strip('[]').split('][') if group]
        vertices = [[int(ch) for ch in group] for group in groups]
        edges = set()
        for group in vertices:
            for a in group:
                for b in group:
                    if a < b:
                        edges.add((a, b))
        top = max((v for group in vertices for v in group), default=0)
        return cls(n if n is not None else top, frozenset(edges))

    @classmethod
    def from_edges(cls, n: int, edges: Sequence[Tuple[int, int]]) -> 'UndirectedGraph':
        return cls(n, frozenset((min(a, b), max(a, b)) for a, b in edges if a != b))

    def neighbors(self, v: int) -> List[int]:
        return sorted({b for a, b in self.edges if a == v} | {a for a, b in self.edges if b == v})

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges


def maximum_cardinality_search(G: UndirectedGraph) -> List[int]:
    order, weight = [], {v: 0 for v in range(1, G.n + 1)}
    while weight:
        v = max(weight, key=lambda w: (weight[w], -w))
        order.append(v)
        del weight[v]
        for w in G.neighbors(v):
            if w in weight:
                weight[w] += 1
    return order


def earlier_neighbors(G: UndirectedGraph, order: Sequence[int]) -> Dict[int, List[int]]:
    position = {v: k for k, v in enumerate(order)}
    return {v: [w for w in G.neighbors(v) if position[w] < position[v]] for v in order}


def junction_tree(G: UndirectedGraph) -> Tuple[List[Tuple[int, ...]], List[Tuple[int, ...]]]:
    """Maximal cliques in search order and the separators of the running intersection property."""
    order = maximum_cardinality_search(G)
    earlier = earlier_neighbors(G, order)
    for v in order:
        for a in earlier[v]:
            for b in earlier[v]:
                if a < b and not G.adjacent(a, b):
                    raise NotChordal(f"graph is not chordal: {a} and {b} are not adjacent but precede {v}")
    candidates = [frozenset([v] + earlier[v]) for v in order]
    cliques = [c for k, c in enumerate(candidates)
               if not any(c < other for other in candidates)
               and c not in candidates[:k]]
    separators = []
    seen = set()
    for k, clique in enumerate(cliques):
        if k:
            separators.append(tuple(sorted(clique & seen)))
        seen |= clique
    return [tuple(sorted(c)) for c in cliques], separators


def _marginal_value(u: ContingencyTable, marginals: Dict[Tuple[int, ...], ContingencyTable],
                    subset: Tuple[int, ...], index: Tuple[int, ...], denominator: bool = False) -> Fraction:
    if subset not in marginals:
        marginals[subset] = marginal(u, subset)
    value = marginals[subset].counts[tuple(index[k - 1] for k in subset)]
    if denominator and value == 0:
        raise ZeroDenominator(f"marginal u_{list(subset)} vanishes at {index}")
    return value


def decomposable_mle(G: UndirectedGraph, states: Sequence[int], u: ContingencyTable) -> ContingencyTable:
    """prod_C u_C / (|u| prod_S u_S) over maximal cliques C and separators S."""
    if tuple(states) != u.dims:
        raise SizeMismatch(f"states {list(states)} do not match table dims {list(u.dims)}")
    if G.n != len(states):
        raise SizeMismatch(f"graph has {G.n} vertices, table has {len(states)} variables")
    cliques, separators = junction_tree(G)
    logger.debug(f"decomposable_mle: cliques {cliques}, separators {separators}")
    total = u.total
    if total == 0:
        raise ZeroDenominator("table is empty")
    marginals: Dict[Tuple[int, ...], ContingencyTable] = {}
    values = []
    for index in np.ndindex(*u.dims):
        value = Fraction(1) / total
        for clique in cliques:
            value *= _marginal_value(u, marginals, clique, index)
        for separator in separators:
            value /= _marginal_value(u, marginals, separator, index, denominator=True)
        values.append(value)
    return ContingencyTable(u.dims, values)


@dataclass(frozen=True)
class DAGModel:
    """Bayesian network on variables 1..m; parents[j-1] lists the parents of j."""
    states: Tuple[int, ...]
    parents: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        states = tuple(int(r) for r in self.states)
        parents = tuple(tuple(sorted(int(p) for p in pa)) for pa in self.parents)
        if len(parents) != len(states):
            raise SizeMismatch(f"{len(parents)} parent lists for {len(states)} variables")
        if any(r < 2 for r in states):
            raise InputError("every variable needs at least two states")
        for j, pa in enumerate(parents, start=1):
            if any(not 1 <= p <= len(states) or p == j for p in pa):
                raise InputError(f"variable {j} has invalid parents {list(pa)}")
        object.__setattr__(self, 'states', states)
        object.__setattr__(self, 'parents', parents)
        self.topological_order()

    @classmethod
    def from_edges(cls, states: Sequence[int], edges: Sequence[Tuple[int, int]]) -> 'DAGModel':
        parents = [[] for _ in states]
        for a, b in edges:
            parents[b - 1].append(a)
        return cls(tuple(states), tuple(tuple(pa) for pa in parents))

    @property
    def m(self) -> int:
        return len(self.states)

    def topological_order(self) -> List[int]:
        """Kahn's algorithm, lowest index first."""
        remaining = {j: set(pa) for j, pa in enumerate(self.parents, start=1)}
        order = []
        while remaining:
            ready = [j for j, pa in remaining.items() if not pa]
            if not ready:
                raise CyclicGraph(f"cycle among variables {sorted(remaining)}")
            j = min(ready)
            order.append(j)
            del remaining[j]
            for pa in remaining.values():
                pa.discard(j)
        return order

    def to_dict(self) -> dict:
        return {'states': list(self.states),
                'edges': [[p, j] for j, pa in enumerate(self.parents, start=1) for p in pa]}


def orient_by_peo(G: UndirectedGraph, states: Sequence[int]) -> DAGModel:
    """Directed version of a chordal graph: parents are the neighbours visited earlier."""
    junction_tree(G)
    order = maximum_cardinality_search(G)
    earlier = earlier_neighbors(G, order)
    return DAGModel(tuple(states), tuple(tuple(earlier[j]) for j in range(1, G.n + 1)))


def bayes_net_mle(D: DAGModel, u: ContingencyTable) -> ContingencyTable:
    """prod_j u_{pa(j) + j} / u_{pa(j)}."""
    if D.states != u.dims:
        raise SizeMismatch(f"states {list(D.states)} do not match table dims {list(u.dims)}")
    marginals: Dict[Tuple[int, ...], ContingencyTable] = {}
    values = []
    for index in np.ndindex(*u.dims):
        value = Fraction(1)
        for j, pa in enumerate(D.parents, start=1):
            family = tuple(sorted(pa + (j,)))
            value *= _marginal_value(u, marginals, family, index)
            value /= _marginal_value(u, marginals, tuple(pa), index, denominator=True)
        values.append(value)
    return ContingencyTable(u.dims, values)


def _assignment_name(assignment: Sequence[Tuple[int, int]]) -> str:
    return ','.join(f"X{j}={k}" for j, k in assignment)


def from_bayesian_network(D: DAGModel) -> StagedTree:
    """
    Staged tree with one level per variable in topological order. The label of an
    edge choosing state k of X_j is 'X{j}={k}' followed by the parent configuration,
    so vertices with equal parent configurations share a floret.
    """
    order = D.topological_order()
    edges = []
    level = [((), 'root')]
    for j in order:
        pa = D.parents[j - 1]
        next_level = []
        for assignment, node in level:
            states = dict(assignment)
            context = _assignment_name([(p, states[p]) for p in pa])
            for k in range(D.states[j - 1]):
                child_assignment = assignment + ((j, k),)
                child = _assignment_name(child_assignment)
                label = f"X{j}={k}|{context}" if context else f"X{j}={k}"
                edges.append((node, child, label))
                next_level.append((child_assignment, child))
        level = next_level
    return StagedTree(edges)


def leaf_assignments(D: DAGModel) -> List[Tuple[int, ...]]:
    """State tuples, in natural variable order, of the leaves of from_bayesian_network(D)."""
    order = D.topological_order()
    leaves = []
    for states in product(*(range(D.states[j - 1]) for j in order)):
        natural = [0] * D.m
        for j, k in zip(order, states):
            natural[j - 1] = k
        leaves.append(tuple(natural))
    return leaves
