"""Exception and warning types shared across the package."""


class ConfigurationError(ValueError):
    """Raised when a configuration value is structurally invalid."""


class DegenerateSupportWarning(UserWarning):
    """Emitted when selected atoms are nearly collinear and the gain refit is damped."""
