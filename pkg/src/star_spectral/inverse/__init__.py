from star_spectral.inverse.conversion import ip1_to_ip2, known_columns
from star_spectral.inverse.experiment import StabilityReport, stability_experiment
from star_spectral.inverse.metrics import ip1_metrics, metrics
from star_spectral.inverse.reconstruct import ReconstructOptions, born_update, reconstruct

__all__ = [
    "ReconstructOptions",
    "StabilityReport",
    "born_update",
    "ip1_metrics",
    "ip1_to_ip2",
    "known_columns",
    "metrics",
    "reconstruct",
    "stability_experiment",
]
