class ParameterError(ValueError):
    """A scalar input is out of its admissible range."""


class StructureError(ValueError):
    """Array shapes or magnitudes are mutually inconsistent."""
