"""Antidistinguishability of pure quantum states: closed-form rules, an exact
circulant test, an exclusion SDP solver, and verifiable certificates."""

from .analysis import AnalysisReport, analyze, sweep_equiangular
from .certificates import (
    Decision,
    IncoherenceDecomposition,
    LocallyPsdWitness,
    VerificationReport,
    verify_certificate,
    verify_decomposition,
    verify_witness,
)
from .criteria import BoundVerdict, LambdaCertificate, Rule
from .exceptions import AntidistError, CertificateError, EigenvalueError, ValidationError
from .gram import (
    StateSet,
    as_gram,
    circulant_from_eigenvalues,
    gram_from_states,
    make_d4_example,
    make_equiangular,
    make_trine,
    states_from_gram,
)
from .sdp import Povm, SdpSolution, SolverConfig, decide_by_sdp, solve_exclusion_sdp

__all__ = [
    "AnalysisReport",
    "AntidistError",
    "BoundVerdict",
    "CertificateError",
    "Decision",
    "EigenvalueError",
    "IncoherenceDecomposition",
    "LambdaCertificate",
    "LocallyPsdWitness",
    "Povm",
    "Rule",
    "SdpSolution",
    "SolverConfig",
    "StateSet",
    "ValidationError",
    "VerificationReport",
    "analyze",
    "as_gram",
    "circulant_from_eigenvalues",
    "decide_by_sdp",
    "gram_from_states",
    "make_d4_example",
    "make_equiangular",
    "make_trine",
    "solve_exclusion_sdp",
    "states_from_gram",
    "sweep_equiangular",
    "verify_certificate",
    "verify_decomposition",
    "verify_witness",
]
