from star_spectral.spectral.base import CharacteristicFunction
from star_spectral.spectral.characteristic import AuxCharacteristic, MainCharacteristic
from star_spectral.spectral.forward import (
    asymptotic_report,
    locate_aux_spectra,
    locate_aux_spectrum,
    locate_spectrum,
    weight_numbers,
    weight_sum_rule,
    weyl_values,
)

__all__ = [
    "AuxCharacteristic",
    "CharacteristicFunction",
    "MainCharacteristic",
    "asymptotic_report",
    "locate_aux_spectra",
    "locate_aux_spectrum",
    "locate_spectrum",
    "weight_numbers",
    "weight_sum_rule",
    "weyl_values",
]
