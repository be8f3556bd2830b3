class SubpixError(Exception):
    """Base exception for edge localization operations"""
    pass


class ImageError(SubpixError):
    """Base exception for image container and file problems"""
    pass


class ImageNotFoundError(ImageError):
    """Raised when an input image file does not exist"""
    pass


class ImageFormatError(ImageError):
    """Raised when a PGM file is malformed or truncated"""
    pass


class UnsupportedImageError(ImageFormatError):
    """Raised when a PGM file is valid but uses an unsupported variant (maxval > 255)"""
    pass


class ImageTooSmallError(ImageError):
    """Raised when an image is too small for the requested operation"""
    pass


class InvalidParameterError(SubpixError):
    """Raised when an operation receives an out-of-range parameter"""
    pass


class WindowOverrunError(SubpixError):
    """Raised when a pixel sequence window would leave the image"""
    pass


class NoEdgeContrastError(SubpixError):
    """Raised when both smooth sides have the same intensity"""
    pass


class SerEstimationError(SubpixError):
    """Raised when the stable-region side estimation cannot form both intensity groups"""
    pass


class InsufficientPointsError(SubpixError):
    """Raised when a metric receives too few subpixel points"""
    pass


class DegenerateProfileError(SubpixError):
    """Raised when a fitted profile carries no transition"""
    pass
