"""Exception hierarchy shared by every stage of the pipeline."""


class SketchMatchError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(SketchMatchError):
    """An image, gallery or manifest file could not be parsed."""


class ParameterError(SketchMatchError, ValueError):
    """A numeric parameter is outside its valid domain."""


class EmptyRegionError(SketchMatchError):
    """A rectangle is empty after clamping to the image bounds."""


class NoFaceError(SketchMatchError):
    """Face-region extraction produced an empty mask."""


class GeometryError(SketchMatchError):
    """A predicted region or anchor row is degenerate."""


class MeasureError(SketchMatchError):
    """A component measurement found nothing to measure."""

    def __init__(self, component, message):
        super().__init__(f"{component}: {message}")
        self.component = component


class ExtractionError(SketchMatchError):
    """Wraps any failure during full extraction, naming the failing stage."""

    def __init__(self, component, cause):
        super().__init__(f"{component}: {cause}")
        self.component = component
        self.cause = cause


class StateError(SketchMatchError):
    """An operation was called before its prerequisites were available."""


class IncompatibleGalleryError(SketchMatchError):
    """Gallery was enrolled with different extraction parameters."""
