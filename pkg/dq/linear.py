"""
Logistic regression classifier.
"""

import logging

import numpy as np

from .base import BaseClassifier, fit_standardizer

logger = logging.getLogger(__name__)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


class LogisticRegression(BaseClassifier):
    """One-vs-rest logistic regression trained by batch gradient descent on standardized inputs"""

    def _fit(self, features: np.ndarray, labels: np.ndarray):
        self.mean, self.scale = fit_standardizer(features)
        z = (features - self.mean) / self.scale
        n, d = z.shape
        targets = np.zeros((n, self.class_count))
        targets[np.arange(n), labels] = 1.0

        learning_rate = self.hyper_parameters['learning_rate']
        weights = np.zeros((d, self.class_count))
        bias = np.zeros(self.class_count)
        for _ in range(self.hyper_parameters['epochs']):
            residual = _sigmoid(z @ weights + bias) - targets
            weights -= learning_rate * (z.T @ residual) / n
            bias -= learning_rate * residual.mean(axis=0)

        self.weights = weights
        self.bias = bias
        logger.debug(f"{self.spec.identity}: trained on {n} rows, |w| = {np.abs(weights).sum():.4f}")

    def _scores(self, features: np.ndarray) -> np.ndarray:
        return ((features - self.mean) / self.scale) @ self.weights + self.bias
