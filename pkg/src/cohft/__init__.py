"""Exact reconstruction of semisimple cohomological field theories.

Correlators of ``R.omega`` are computed as weighted sums over stable graphs,
with psi and kappa integrals on the vertices.  Shipped theories: the trivial
theory, the Hodge class, Witten's r-spin class, the sl2 Verlinde class, and
the 3-point series of Hilb^m(C^2).
"""

from .arith import RationalFunction, TruncSeries, bernoulli
from .errors import (
    CohFTError,
    MismatchedTruncation,
    NonDivisible,
    NonSymplectic,
    RangeError,
    SingularPairing,
    SizeMismatch,
    UnstablePair,
)
from .frobenius import (
    FrobeniusData,
    RMatrix,
    edge_kernel,
    hodge_rmatrix,
    quantum_product,
    topological_correlator,
    trivial_theory,
)
from .graphs import StableGraph, automorphism_count, enumerate_stable_graphs, even_subset
from .hilbert import fock_inner, md_matrix, semisimplicity_witness, three_point_series
from .intersection import kappa_psi_correlator, psi_correlator
from .reconstruction import Engine, Insertion, cohft_axiom_suite, reconstruct_correlator
from .rspin import rspin_rmatrix, rspin_topological_exact, shifted_theory, witten_integral
from .verlinde import fusion_data, verlinde_correlator, verlinde_rank, verlinde_rmatrix

__version__ = "0.1.0"
