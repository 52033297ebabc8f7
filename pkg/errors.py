class BitError(Exception):
    """Base class for every error raised by the ideal toolkit."""


class TermSyntaxError(BitError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class SignatureError(BitError, ValueError):
    pass


class UnboundVariable(BitError, KeyError):
    def __str__(self):
        return f"unbound variable {self.args[0]}"


class AlgebraFormatError(BitError, ValueError):
    pass


class BudgetExceeded(BitError):
    def __init__(self, used: int, limit: int):
        super().__init__(f"evaluation budget exceeded: {used} > {limit}")
        self.used = used
        self.limit = limit


class EmptySubset(BitError, ValueError):
    pass


class NotAnIdeal(BitError, ValueError):
    pass


class UnknownVariety(BitError, KeyError):
    def __str__(self):
        return f"unknown variety {self.args[0]!r}"


class OracleInconsistency(BitError):
    """Two congruences share a kernel: the algebra is not in a BIT speciale variety."""


class Budget:
    """Counts term evaluations against a fixed ceiling."""

    def __init__(self, limit=None):
        self.limit = limit
        self.used = 0

    def charge(self, n: int) -> None:
        self.used += int(n)
        if self.limit is not None and self.used > self.limit:
            raise BudgetExceeded(self.used, self.limit)
