from ansible.errors import AnsibleError


class ContextureError(AnsibleError):
    def __init__(self, message: str = "", *args, **kwargs):
        super().__init__(message, *args, **kwargs)
        # message without any path prefix, for re-raising with a better path
        self.reason = message


class DimensionError(ContextureError):
    pass


class ScenarioError(ContextureError):
    pass


class ModelError(ContextureError):
    """
    path is a JSON-path-like pointer at the offending value, ex: "tables[1][0][2]"
    """

    def __init__(self, message: str, path: str | None = None):
        super().__init__(message if path is None else f"{path}: {message}")
        self.reason = message
        self.path = path


class ExtensionError(ContextureError):
    pass


class SweepTooLargeError(ContextureError):
    pass


class QuantumSpecError(ContextureError):
    pass


class RationalizeError(ContextureError):
    pass


def describe(e: ContextureError) -> str:
    path = getattr(e, "path", None)
    return e.reason if path is None else f"{path}: {e.reason}"
