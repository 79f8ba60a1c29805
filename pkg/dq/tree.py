"""
Decision tree and random forest classifiers.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .base import BaseClassifier, ClassifierKind, ClassifierSpec
from .config import derive_seed

logger = logging.getLogger(__name__)


@dataclass
class Node:
    """Tree node; leaves have no children"""
    value: int
    feature: int = -1
    threshold: float = 0.0
    left: Optional['Node'] = None
    right: Optional['Node'] = None

    def is_leaf(self) -> bool:
        return self.left is None


def _gini(counts: np.ndarray, totals: np.ndarray) -> np.ndarray:
    proportions = counts / totals[:, None]
    return 1.0 - (proportions ** 2).sum(axis=1)


class DecisionTree(BaseClassifier):
    """CART-style tree: Gini impurity, binary threshold splits, depth and leaf-size limits"""

    def _fit(self, features: np.ndarray, labels: np.ndarray):
        self.max_depth = self.hyper_parameters['max_depth']
        self.min_leaf = self.hyper_parameters['min_leaf']
        self.max_features = self.hyper_parameters['max_features']
        self.rng = np.random.default_rng(self.spec.seed)
        self.root = self._grow(features, labels, depth=0)

    def _candidate_features(self, d: int) -> np.ndarray:
        if self.max_features is None or self.max_features >= d:
            return np.arange(d)
        return np.sort(self.rng.choice(d, self.max_features, replace=False))

    def _best_split(self, features: np.ndarray, labels: np.ndarray, counts: np.ndarray) -> Optional[Tuple[int, float]]:
        n = labels.shape[0]
        best_score = _gini(counts[None, :], np.array([n]))[0] - 1e-12
        best = None
        one_hot = np.eye(self.class_count)
        left_n = np.arange(1, n)
        right_n = n - left_n

        for feature in self._candidate_features(features.shape[1]):
            order = np.argsort(features[:, feature], kind='stable')
            values = features[order, feature]
            left_counts = np.cumsum(one_hot[labels[order]], axis=0)[:-1]
            right_counts = counts[None, :] - left_counts

            valid = (values[:-1] < values[1:]) & (left_n >= self.min_leaf) & (right_n >= self.min_leaf)
            if not valid.any():
                continue
            weighted = (left_n * _gini(left_counts, left_n) + right_n * _gini(right_counts, right_n)) / n
            weighted = np.where(valid, weighted, np.inf)
            position = int(np.argmin(weighted))
            if weighted[position] < best_score:
                best_score = weighted[position]
                low, high = values[position], values[position + 1]
                threshold = low + (high - low) / 2
                best = (int(feature), threshold if threshold < high else low)

        return best

    def _grow(self, features: np.ndarray, labels: np.ndarray, depth: int) -> Node:
        counts = np.bincount(labels, minlength=self.class_count)
        node = Node(value=int(np.argmax(counts)))
        if depth >= self.max_depth or counts.max() == labels.shape[0] or labels.shape[0] < 2 * self.min_leaf:
            return node

        split = self._best_split(features, labels, counts)
        if split is None:
            return node

        node.feature, node.threshold = split
        goes_left = features[:, node.feature] <= node.threshold
        node.left = self._grow(features[goes_left], labels[goes_left], depth + 1)
        node.right = self._grow(features[~goes_left], labels[~goes_left], depth + 1)
        return node

    def _leaf_values(self, node: Node, features: np.ndarray, rows: np.ndarray, out: np.ndarray):
        if node.is_leaf():
            out[rows] = node.value
            return
        goes_left = features[rows, node.feature] <= node.threshold
        self._leaf_values(node.left, features, rows[goes_left], out)
        self._leaf_values(node.right, features, rows[~goes_left], out)

    def leaf_predictions(self, features: np.ndarray) -> np.ndarray:
        out = np.zeros(features.shape[0], dtype=np.int64)
        self._leaf_values(self.root, features, np.arange(features.shape[0]), out)
        return out

    def depth(self, node: Optional[Node] = None) -> int:
        node = node or self.root
        if node.is_leaf():
            return 0
        return 1 + max(self.depth(node.left), self.depth(node.right))

    def _scores(self, features: np.ndarray) -> np.ndarray:
        scores = np.zeros((features.shape[0], self.class_count))
        scores[np.arange(features.shape[0]), self.leaf_predictions(features)] = 1.0
        return scores


class RandomForest(BaseClassifier):
    """Bagged decision trees with per-split feature sampling, majority vote"""

    def _fit(self, features: np.ndarray, labels: np.ndarray):
        n, d = features.shape
        max_features = self.hyper_parameters['max_features'] or int(np.ceil(np.sqrt(d)))
        self.trees = []
        for index in range(self.hyper_parameters['n_trees']):
            tree_seed = derive_seed(self.spec.seed, 'tree', index)
            rows = np.random.default_rng(tree_seed).integers(0, n, size=n)
            tree_spec = ClassifierSpec(
                ClassifierKind.DECISION_TREE,
                {
                    'max_depth': self.hyper_parameters['max_depth'],
                    'min_leaf': self.hyper_parameters['min_leaf'],
                    'max_features': max_features,
                },
                tree_seed
            )
            self.trees.append(DecisionTree(tree_spec).fit(features[rows], labels[rows], self.class_count))
        logger.debug(f"{self.spec.identity}: grew {len(self.trees)} trees on {n} rows")

    def _scores(self, features: np.ndarray) -> np.ndarray:
        votes = np.zeros((features.shape[0], self.class_count))
        rows = np.arange(features.shape[0])
        for tree in self.trees:
            # a tree only predicts classes present in its bootstrap sample
            np.add.at(votes, (rows, tree.predict_many(features)), 1.0)
        return votes
