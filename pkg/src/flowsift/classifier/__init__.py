from .forest import Forest, ForestParams, feature_importance, fit_forest, importances, predict_forest
from .metrics import Metrics, metrics
from .tree import (
    ClassifierError,
    TreeNode,
    TreeParams,
    best_split,
    fit_tree,
    gini,
    predict_tree,
    tree_to_dict,
)

__all__ = [
    "ClassifierError", "Forest", "ForestParams", "Metrics", "TreeNode", "TreeParams",
    "best_split", "feature_importance", "fit_forest", "fit_tree", "gini", "importances",
    "metrics", "predict_forest", "predict_tree", "tree_to_dict",
]
