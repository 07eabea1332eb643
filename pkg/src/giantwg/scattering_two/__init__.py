"""Two-photon scattering: T-matrix, S-matrix, wavefunction and g2."""
from .amplitudes import (BACKENDS, TMatrixResult, TwoPhotonAmplitude, convolution,
                         correlated_part, g2_markov_limit, g2_transmitted, t_matrix,
                         two_photon_s, wavefunction_t)
from .fourier import FourierWavefunction, narrowest_width, wavefunction_fft
from .quadrature import green_convolution_quadrature
from .resummed import green_convolution as green_convolution_resummed
from .series import (ConvolutionResult, SeriesDiagnostics, c_mnl, expansion_base, f_mn,
                     green_convolution)

__all__ = [
    "BACKENDS", "ConvolutionResult", "FourierWavefunction", "SeriesDiagnostics",
    "TMatrixResult", "TwoPhotonAmplitude", "c_mnl", "convolution", "correlated_part",
    "expansion_base", "f_mn", "g2_markov_limit", "g2_transmitted", "green_convolution",
    "green_convolution_quadrature", "green_convolution_resummed", "narrowest_width",
    "t_matrix", "two_photon_s", "wavefunction_fft", "wavefunction_t",
]
