"""
Gaussian naive Bayes classifier.
"""

import numpy as np

from .base import BaseClassifier


class GaussianNB(BaseClassifier):
    """Gaussian naive Bayes with a per-feature variance floor"""

    def _fit(self, features: np.ndarray, labels: np.ndarray):
        c, d = self.class_count, features.shape[1]
        floor = self.hyper_parameters['variance_floor']
        self.means = np.zeros((c, d))
        self.variances = np.ones((c, d))
        self.log_priors = np.full(c, -np.inf)

        for label in np.flatnonzero(self.seen_classes):
            rows = features[labels == label]
            self.means[label] = rows.mean(axis=0)
            self.variances[label] = np.maximum(rows.var(axis=0), floor)
            self.log_priors[label] = np.log(rows.shape[0] / features.shape[0])

    def _scores(self, features: np.ndarray) -> np.ndarray:
        # joint log likelihood, m x c
        diff = features[:, None, :] - self.means[None, :, :]
        log_density = -0.5 * (np.log(2 * np.pi * self.variances)[None, :, :] + diff ** 2 / self.variances[None, :, :])
        return self.log_priors[None, :] + log_density.sum(axis=2)
