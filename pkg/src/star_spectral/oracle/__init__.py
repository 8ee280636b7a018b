from star_spectral.oracle.fd import FdSystem, assemble, oracle_eigenvalues

__all__ = ["FdSystem", "assemble", "oracle_eigenvalues"]
