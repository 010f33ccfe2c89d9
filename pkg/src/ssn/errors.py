"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems exit 2,
unreadable or malformed inputs exit 3, numerical failures exit 4.
"""


class ConfigError(ValueError):
    """Invalid configuration (bad parameters, degenerate settings)."""


class DegenerateWindowError(ConfigError):
    """A window parameterization collapses to an empty filter."""


class ImageFormatError(ValueError):
    """Unsupported or malformed image file."""


class NumericalError(RuntimeError):
    """A numerical sanity check failed (non-finite values, residues)."""
