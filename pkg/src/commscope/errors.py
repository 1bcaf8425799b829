"""Exception hierarchy shared by all modules."""


class CommscopeError(Exception):
    """Base class for all errors raised by this package."""


class InputFormatError(CommscopeError):
    """Malformed input file (bad line, self-loop, unparsable value...)."""


class UnknownNodeError(CommscopeError):
    """A node id was referenced that does not exist in the graph."""


class PartitionError(CommscopeError):
    """The partition file does not describe a valid partition of the node set."""


class ConfigError(CommscopeError):
    """Invalid configuration (flag values, type overrides, missing options)."""


class AttributeKindError(CommscopeError):
    """An attribute has the wrong kind (nominal vs numeric vs binary) for an operation."""
