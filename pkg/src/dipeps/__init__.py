"""Dual-isometric PEPS toolkit.

Tensor families satisfying two isometric conditions, their verification, the
efficient one- and two-point contractions with dense oracles, cylinder
transfer-operator spectra, manifold dimension counting, parent-Hamiltonian
checks, and an encoding of brickwork dual-unitary circuits.
"""

from .conditions import (GaugeTriple, canonicalize, check_di, check_dual_isometry,
                         check_dual_unitary, check_generalized, check_isometry,
                         find_fixed_point)
from .contraction import (Lattice, channel_from_tensor, dense_expectation, dense_state,
                          local_expectation, two_point)
from .families import (boundary_default, complexity_tensors, controlled_dual_unitary,
                       permutation_phase, plumbing, random_di, sgs_tensor,
                       three_qubit_gate, u1_spin1_spec, u1_tensor, w_parametrized, w_z2)
from .geometry import (count_di_params, count_normal_peps_params, count_state_params,
                       tangent_dimension)
from .tensors import FoldedTensor, ObservableVec, PepsTensor, contract, fold, vectorize
from .transfer import analytic_transfer, build_transfer, doubled_w, topo_diagnostic

__version__ = "0.1.0"

__all__ = [
    "GaugeTriple", "canonicalize", "check_di", "check_dual_isometry",
    "check_dual_unitary", "check_generalized", "check_isometry", "find_fixed_point",
    "Lattice", "channel_from_tensor", "dense_expectation", "dense_state",
    "local_expectation", "two_point",
    "boundary_default", "complexity_tensors", "controlled_dual_unitary",
    "permutation_phase", "plumbing", "random_di", "sgs_tensor", "three_qubit_gate",
    "u1_spin1_spec", "u1_tensor", "w_parametrized", "w_z2",
    "count_di_params", "count_normal_peps_params", "count_state_params",
    "tangent_dimension",
    "FoldedTensor", "ObservableVec", "PepsTensor", "contract", "fold", "vectorize",
    "analytic_transfer", "build_transfer", "doubled_w", "topo_diagnostic",
]
