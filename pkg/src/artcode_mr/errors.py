"""Exception types raised across the toolkit."""


class ArtcodeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidSpec(ArtcodeError, ValueError):
    pass


class NoForeground(ArtcodeError):
    """Decoding was asked to read an image with no dark pixels."""


class NoValidRoot(ArtcodeError):
    """No component has the root -> region -> blob structure."""


class ImageTooSmall(ArtcodeError, ValueError):
    pass


class DimensionMismatch(ArtcodeError, ValueError):
    pass


class DegenerateTrainingSet(ArtcodeError, ValueError):
    pass


class VersionMismatch(ArtcodeError):
    pass


class CorruptModel(ArtcodeError):
    pass


class UnsupportedMaskCount(ArtcodeError, ValueError):
    pass


class GroupTooSmall(ArtcodeError, ValueError):
    pass


class FoldTooSmall(ArtcodeError, ValueError):
    pass


class DatasetError(ArtcodeError, OSError):
    """Reading or writing a dataset, image, or model file failed."""
