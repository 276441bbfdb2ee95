"""Exception types shared across the engine."""


class MudscopeError(Exception):
    """Base class for all engine errors."""


class LayerMismatch(MudscopeError):
    """Two layer values from incompatible layers were combined."""


class DuplicateProfile(MudscopeError):
    """A profile with the same id is already loaded."""


class UnknownDevice(MudscopeError):
    """No loaded profile has the given device id."""


class UnknownNode(MudscopeError):
    """No graph node has the given id."""


class UnknownPromise(MudscopeError):
    """No controller promise has the given id."""


class AlreadyFulfilled(MudscopeError):
    """The controller promise was fulfilled earlier."""


class EmptyHostList(MudscopeError):
    """A promise fulfillment needs at least one host."""
