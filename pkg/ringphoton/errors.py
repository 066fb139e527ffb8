"""
Exception and warning types raised by ringphoton
"""


class RingPhotonError(ValueError):
    """Base class for invalid inputs and failed numerical checks"""


class ConfigurationError(RingPhotonError):
    """Experiment configuration is inconsistent"""


class NonCirculantError(RingPhotonError):
    """Decay matrix is not circulant within tolerance"""


class BandwidthError(RingPhotonError):
    """Frequency band of an oracle mode grid is too narrow"""


class ShapeMismatchError(RingPhotonError):
    """Two datasets cannot be compared node by node"""


class NegativeIntensityError(RingPhotonError, ArithmeticError):
    """A photon density came out negative beyond round-off"""


class SubradiantModeWarning(UserWarning):
    """A collective mode decays slower than the clamp rate"""
