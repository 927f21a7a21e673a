"""Exception types shared across the package."""

from __future__ import annotations


class WidsError(Exception):
    """Base class for all package errors."""


class UnsupportedLinkType(WidsError):
    """Capture file uses a link type this tool cannot interpret."""

    def __init__(self, link_type: int):
        super().__init__(f"unsupported link type {link_type}; "
                         "expected 105 (IEEE 802.11) or 127 (radiotap)")
        self.link_type = link_type


class MalformedElement(WidsError):
    """An information element did not match its declared layout."""


class SchemaMismatch(WidsError):
    """CSV input whose header deviates from the expected attribute list."""


class InvalidScenario(WidsError):
    """Scenario description failed validation."""


class SourceUnavailable(WidsError):
    """The authorized-AP source could not be read."""


class ConfigError(WidsError):
    """Configuration file could not be parsed."""
