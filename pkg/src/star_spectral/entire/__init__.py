from star_spectral.entire.partial import partial_chars, recover_edge_m
from star_spectral.entire.products import (
    EntireFromZeros,
    delta_from_zeros,
    product_difference_terms,
    product_eval,
)
from star_spectral.entire.remainders import cauchy_coeffs, pw_extract

__all__ = [
    "EntireFromZeros",
    "cauchy_coeffs",
    "delta_from_zeros",
    "partial_chars",
    "product_difference_terms",
    "product_eval",
    "pw_extract",
    "recover_edge_m",
]
