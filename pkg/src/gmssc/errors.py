"""Error type shared by every module."""


class GmsscError(ValueError):
    """Raised with a short machine-readable ``code`` (e.g. ``"bad-k"``).

    Extra keyword arguments are kept in ``details`` so callers can inspect
    witnesses (a violating edge, the offending line number, ...).
    """

    def __init__(self, code: str, message: str = "", **details):
        self.code = code
        self.details = details
        super().__init__(f"{code}: {message}" if message else code)
