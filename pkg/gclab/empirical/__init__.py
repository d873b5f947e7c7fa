from gclab.empirical.measures import Ecdf, ecdf_sup_deviation, pn_f, sup_deviation
from gclab.empirical.study import (
    ConvergenceStudy,
    DkwCheck,
    DkwReport,
    StudyFit,
    StudyRow,
    convergence_study,
    dkw_tail_check,
)

__all__ = [
    "ConvergenceStudy",
    "DkwCheck",
    "DkwReport",
    "Ecdf",
    "StudyFit",
    "StudyRow",
    "convergence_study",
    "dkw_tail_check",
    "ecdf_sup_deviation",
    "pn_f",
    "sup_deviation",
]
