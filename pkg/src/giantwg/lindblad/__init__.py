"""Markovian master-equation route, valid at phi = +-pi/2."""
from .correlations import (DrivenCavity, OutputMoments, Propagator, output_density, prepare,
                           reflected_density, transmitted_amplitude, transmitted_g2_output,
                           two_time_correlation)
from .operators import (FockOperator, LiouvillianMatrix, build_hamiltonian, build_liouvillian,
                        default_cutoff, destroy, rabi_frequency, semiclassical_branches, trace_functional,
                        unvec, vec)
from .spectrum import SpectrumResult, liouvillian_gap, liouvillian_spectrum
from .steady import (CavityObservables, SteadyState, cavity_observables, is_physical, photon_number,
                     steady_state, steady_state_ode, trace_distance)

__all__ = [name for name in dir() if not name.startswith("_")]
