"""Exact simulator for a three-particle spin model with exchange coupling
and uniaxial magnetic anisotropy: density-matrix dynamics, switching
resonances, spin filtering and reproducible CSV reports."""

from .spin_core import Spin, Operator, EigenSystem, spin_matrices, kron, \
    hermitian_eig, propagator
from .model import ModelParams, HamiltonianBundle, build_hamiltonian, \
    build_bh3, build_trimer, unit_convert, MU_B_CM_PER_T
from .basis import clebsch_gordan, product_to_device, device_to_total, \
    block_decompose, reduce_two_level, DeviceSystem, SpinBlock
from .dynamics import DensityMatrix, TimeSeries, evolve, \
    transition_probabilities, bloch_trajectory
from .analysis import rabi, dj_resonance, generalized_dj_resonance, \
    eigen_balance, trimer_rabi, RabiResult
from .filtering import FilterSpec, spinor, prepare_filtered, \
    relative_transition, filter_scan
from .verify import series_expm_oracle, brute_force_rabi, run_oracle_suite

__version__ = "0.1.0"
