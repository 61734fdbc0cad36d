from problems.base import Problem
from problems.generators import gen_hinge_svm, gen_lasso, gen_least_squares
from problems.hinge import HingeSvmProblem, hinge_subgradient
from problems.least_squares import LassoProblem, LeastSquaresProblem, smooth_gradient
from problems.reference import Reference, centralized_reference

__all__ = [
    "HingeSvmProblem",
    "LassoProblem",
    "LeastSquaresProblem",
    "Problem",
    "Reference",
    "centralized_reference",
    "gen_hinge_svm",
    "gen_lasso",
    "gen_least_squares",
    "hinge_subgradient",
    "smooth_gradient",
]
