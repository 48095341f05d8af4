"""Exception types shared across the toolkit."""


class LandcoverError(Exception):
    """Base class for data errors raised by this package."""


class HeaderError(LandcoverError):
    """A raster header is missing a key, has an unknown key or a bad value."""


class SizeMismatchError(LandcoverError):
    """A raster data file does not have the size its header declares."""


class MissingBandError(LandcoverError):
    """An operation needs a band the image does not have."""

    def __init__(self, band, available):
        self.band = band
        super().__init__(
            f"band {band} is required but the image has only {available} band(s)"
        )
