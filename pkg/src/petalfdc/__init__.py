"""Petal consensus networks: optimal averaging weights, SLEM analysis, optimality checks."""

__version__ = "0.1.0"

from .exceptions import (DegenerateEquation, MultipleUnitEigenvalues, NoSuchEigenvalue,
                         NotClassConstant, NotSymmetric, NumericError, SpecError, Underflow)
from .topology import (AsymmetricG, Composite, CoreKind, Graph, PathBundle, PetalSpec,
                       SymmetricG, build_graph, strata)
from .weights import (WeightAssignment, WeightMatrix, assemble_matrix,
                      metropolis_hastings_weights, optimal_weights)
from .spectral import (QuotientPair, SpectralReport, convergence_factor, eig_symmetric,
                       quotient_matrices, slem_full, slem_quotient)
from .closed_forms import ccs_characteristic_roots, hub_theta_roots
from .certificates import (AuditReport, DualCertificate, OracleResult, audit_closed_forms,
                           build_certificate, optimality_oracle, slackness_check)
from .simulate import Trajectory, asymptotic_rate, run_consensus
