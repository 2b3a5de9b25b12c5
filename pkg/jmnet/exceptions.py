"""
A module that contains exceptions.
"""

class JMNetError(Exception):
    """The base class of every exception raised by jmnet."""


class JMNetValidationError(JMNetError, ValueError):
    """Raised when a state, measurement, table or model fails its validity checks."""


class JMNetKindMismatchError(JMNetError, TypeError):
    """Raised when two objects of different kinds (e.g. a `Ket` and an `Operator`) are combined."""


class JMNetRangeError(JMNetError, ValueError):
    """Raised when a parameter such as a visibility or a probability is outside its allowed range."""


class JMNetIntegrityError(JMNetError):
    """Raised when a construction produces an object that breaks its own contract."""


class JMNetUsageError(JMNetError, ValueError):
    """Raised when the user passes an object of the wrong shape or label to a function."""


class JMNetWiringError(JMNetError, ValueError):
    """Raised when the dimensions of sources and measurements in a network do not match."""


class JMNetConfigurationError(JMNetError, ValueError):
    """Raised when a scenario, model or fit configuration is inconsistent."""
