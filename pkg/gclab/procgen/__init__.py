from gclab.procgen.generator import generate, marginal_cdf, marginal_law, random_transition_model
from gclab.procgen.laws import ContinuousLaw, DiscreteLaw
from gclab.procgen.spec import (
    Ar1Process,
    IidProcess,
    Marginal,
    MarkovProcess,
    MDependentProcess,
    ProcessSpec,
    SamplePath,
    TransitionModel,
)
from gclab.procgen.streams import stream_rng

__all__ = [
    "Ar1Process",
    "ContinuousLaw",
    "DiscreteLaw",
    "IidProcess",
    "Marginal",
    "MarkovProcess",
    "MDependentProcess",
    "ProcessSpec",
    "SamplePath",
    "TransitionModel",
    "generate",
    "marginal_cdf",
    "marginal_law",
    "random_transition_model",
    "stream_rng",
]
