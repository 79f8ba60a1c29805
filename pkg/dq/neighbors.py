"""
K-nearest-neighbours classifier.
"""

import numpy as np

from .base import BaseClassifier, fit_standardizer

# Upper bound on the number of floats in one distance block
BLOCK_SIZE = 4_000_000


class KNearestNeighbors(BaseClassifier):
    """Majority vote of the k nearest training rows, Euclidean on standardized features"""

    def _fit(self, features: np.ndarray, labels: np.ndarray):
        self.mean, self.scale = fit_standardizer(features)
        self.memory = (features - self.mean) / self.scale
        self.memory_labels = labels.copy()
        self.k = min(self.hyper_parameters['k'], features.shape[0])

    def _scores(self, features: np.ndarray) -> np.ndarray:
        queries = (features - self.mean) / self.scale
        n, d = self.memory.shape
        votes = np.zeros((queries.shape[0], self.class_count))
        block = max(1, BLOCK_SIZE // (n * d))

        for start in range(0, queries.shape[0], block):
            chunk = queries[start:start + block]
            distances = ((chunk[:, None, :] - self.memory[None, :, :]) ** 2).sum(axis=2)
            # stable sort: equal distances keep training order
            nearest = np.argsort(distances, axis=1, kind='stable')[:, :self.k]
            rows = np.repeat(np.arange(chunk.shape[0]), self.k)
            np.add.at(votes, (start + rows, self.memory_labels[nearest].ravel()), 1.0)

        return votes
