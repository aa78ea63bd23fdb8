"""From-scratch classical classifiers over pooled embeddings.

Importing this package registers every algorithm in base.ALGORITHMS, keyed
by its short name: knn, logreg, svm, gnb, tree, mlp.
"""

from .base import ALGORITHMS, Classifier, make_classifier
from .knn import KNeighbors
from .logreg import LogisticRegression
from .mlp import MLP
from .naive_bayes import GaussianNB
from .serialize import load_model, save_model
from .svm import SVC
from .tree import DecisionTree

__all__ = [
    "ALGORITHMS", "Classifier", "make_classifier",
    "KNeighbors", "LogisticRegression", "MLP", "GaussianNB", "SVC",
    "DecisionTree", "load_model", "save_model",
]
