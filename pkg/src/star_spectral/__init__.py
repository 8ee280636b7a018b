from importlib.metadata import PackageNotFoundError, version

from star_spectral.entire.products import delta_from_zeros, product_eval
from star_spectral.entire.remainders import cauchy_coeffs, pw_extract
from star_spectral.inverse.conversion import ip1_to_ip2
from star_spectral.inverse.experiment import stability_experiment
from star_spectral.inverse.metrics import metrics
from star_spectral.inverse.reconstruct import ReconstructOptions, reconstruct
from star_spectral.models.data import SpectralDataIP1, SpectralDataIP2, WeightMatrix
from star_spectral.models.graph import Potential, PotentialVector, StarGraphConfig, random_in_ball
from star_spectral.models.spectrum import AuxSpectrum, Spectrum
from star_spectral.ode.engine import char_delta, edge_basis
from star_spectral.oracle.fd import oracle_eigenvalues
from star_spectral.spectral.forward import (
    forward_ip2,
    locate_aux_spectra,
    locate_spectrum,
    spectral_data,
    weight_numbers,
    weyl_values,
)

try:
    __version__ = version("star-spectral")
except PackageNotFoundError:
    __version__ = "0.0.0+dev"
__all__ = [
    "AuxSpectrum",
    "Potential",
    "PotentialVector",
    "ReconstructOptions",
    "SpectralDataIP1",
    "SpectralDataIP2",
    "Spectrum",
    "StarGraphConfig",
    "WeightMatrix",
    "cauchy_coeffs",
    "char_delta",
    "delta_from_zeros",
    "edge_basis",
    "forward_ip2",
    "ip1_to_ip2",
    "locate_aux_spectra",
    "locate_spectrum",
    "metrics",
    "oracle_eigenvalues",
    "product_eval",
    "pw_extract",
    "random_in_ball",
    "reconstruct",
    "spectral_data",
    "stability_experiment",
    "weight_numbers",
    "weyl_values",
]
