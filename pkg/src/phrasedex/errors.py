"""Exception hierarchy shared by every index component."""


class PhrasedexError(Exception):
    """Base class for all errors raised by this package."""


class InvalidToken(PhrasedexError, ValueError):
    pass


class UnknownForm(PhrasedexError, KeyError):
    pass


class ParseError(PhrasedexError, ValueError):
    pass


class ConfigError(PhrasedexError, ValueError):
    pass


class OrderViolation(PhrasedexError, ValueError):
    """Postings handed to a stream writer were not strictly increasing."""


class DecodeError(PhrasedexError):
    """Stored bytes could not be decoded back into records."""


class StoreClosed(PhrasedexError):
    pass


class UnknownSymbol(PhrasedexError, ValueError):
    pass


class WrongIndex(PhrasedexError):
    """A form was looked up in an index that does not hold its class."""


class IndexCorrupt(PhrasedexError):
    pass


class SequenceError(PhrasedexError, ValueError):
    pass


class UnsupportedQuery(PhrasedexError):
    pass


class EmptyQuery(UnsupportedQuery):
    pass


class SelfMatchError(PhrasedexError, AssertionError):
    """A benchmark query failed to find the document it was drawn from."""
