# declab/core/errors.py
# Error hierarchy. Every error is a ValueError so plain `except ValueError` still works.


class DeclabError(ValueError):
    """Base error. `exit_code` is what the CLI returns when it is left uncaught."""

    exit_code = 3

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


# --- Usage / domain (exit 2) ---
class PreconditionError(DeclabError):
    exit_code = 2


class PartitionError(DeclabError):
    exit_code = 2


class DegenerateGeometryError(DeclabError):
    exit_code = 2


class GridTooCoarseError(DeclabError):
    exit_code = 2


class MissingScaleError(DeclabError):
    exit_code = 2

    def __init__(self, missing: list[str]):
        self.missing = missing
        super().__init__(f"Recursion table is missing scales: {', '.join(missing)}")

    def to_dict(self) -> dict:
        return {**super().to_dict(), "missing": self.missing}


class LadderMismatchError(DeclabError):
    exit_code = 2


# --- Numerical failures (exit 3) ---
class QuadratureError(DeclabError):
    exit_code = 3

    def __init__(self, message: str, previous=None, last=None):
        # last two iterates, kept for diagnosis
        self.previous = previous
        self.last = last
        super().__init__(message)


class PrecisionLossError(DeclabError):
    exit_code = 3


class NyquistError(DeclabError):
    exit_code = 2


class IntegrityError(DeclabError):
    exit_code = 3


# --- Resource guards (exit 4) ---
class ResourceGuardError(DeclabError):
    exit_code = 4
