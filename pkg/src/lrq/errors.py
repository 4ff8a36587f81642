class NumericalError(RuntimeError):
    """A numerical routine failed to converge or hit an invalid regime.

    ``operation`` names the routine so the CLI can report it.
    """

    def __init__(self, operation, message):
        super().__init__(f"{operation}: {message}")
        self.operation = operation


class CondensedPhaseError(NumericalError):
    """Requested coupling lies below the critical one (condensed phase)."""
