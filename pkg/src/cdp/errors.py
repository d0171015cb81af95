class CDPError(ValueError):
    """Base class for every error raised by the package."""


class DegenerateInputError(CDPError):
    """Input geometry the pipeline cannot handle (duplicates, collapsed edges, zero variance)."""


class EmptyAdmissibleSetError(CDPError):
    """No pair has a detour ratio at or below the threshold."""


class DisconnectedGraphError(CDPError):
    pass


class CSVFormatError(CDPError):
    pass
