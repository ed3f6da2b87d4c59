"""Exception types that map onto the command-line exit-code contract."""


class DataError(ValueError):
    """Malformed or unusable input data (bad CSV, duplicate energies, too few points)."""


class DomainError(ValueError):
    """Argument outside its physical or mathematical domain, or an invalid configuration."""
