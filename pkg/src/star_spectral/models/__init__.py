from star_spectral.models.data import (
    AsymptoticReport,
    CauchyCoefficients,
    ClusterSplit,
    IterationRecord,
    PartialCharacteristicSet,
    PWRemainder,
    ReconstructionResult,
    SpectralDataIP1,
    SpectralDataIP2,
    StabilityMetrics,
    WeightMatrix,
    WeylSample,
)
from star_spectral.models.graph import Potential, PotentialVector, StarGraphConfig
from star_spectral.models.spectrum import AuxSpectrum, BranchKind, IndexedEigenvalue, Spectrum

__all__ = [
    "AsymptoticReport",
    "AuxSpectrum",
    "BranchKind",
    "CauchyCoefficients",
    "ClusterSplit",
    "IndexedEigenvalue",
    "IterationRecord",
    "PartialCharacteristicSet",
    "Potential",
    "PotentialVector",
    "PWRemainder",
    "ReconstructionResult",
    "SpectralDataIP1",
    "SpectralDataIP2",
    "Spectrum",
    "StabilityMetrics",
    "StarGraphConfig",
    "WeightMatrix",
    "WeylSample",
]
