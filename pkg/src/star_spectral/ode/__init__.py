from star_spectral.ode.engine import (
    CharValues,
    EdgeBasisValues,
    EdgePropagator,
    StarSystem,
    char_delta,
    edge_basis,
    scaled_char,
)

__all__ = [
    "CharValues",
    "EdgeBasisValues",
    "EdgePropagator",
    "StarSystem",
    "char_delta",
    "edge_basis",
    "scaled_char",
]
