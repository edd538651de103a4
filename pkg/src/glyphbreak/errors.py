"""Exception types shared across the toolkit."""

from __future__ import annotations


class GlyphbreakError(Exception):
    """Base class for all toolkit errors."""


class MalformedLineError(GlyphbreakError):
    """A corpus line is not a JSON object with a string ``text`` field."""

    def __init__(self, line_no: int, detail: str = ""):
        self.line_no = line_no
        self.detail = detail
        msg = f"malformed corpus line {line_no}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class NotEnoughSamplesError(GlyphbreakError):
    """Requested more samples than the corpus holds."""

    def __init__(self, requested: int, available: int):
        self.requested = requested
        self.available = available
        super().__init__(f"requested {requested} samples, corpus has {available}")


class InsufficientTargetsError(GlyphbreakError):
    """Too few replaceable characters to meet the quota; the sample is discarded."""

    def __init__(self, eligible_count: int, quota: int):
        self.eligible_count = eligible_count
        self.quota = quota
        super().__init__(f"{eligible_count} eligible characters, quota {quota}")


class MalformedEntryError(GlyphbreakError):
    """A misspelling-list line is missing the ``->`` separator."""

    def __init__(self, line_no: int):
        self.line_no = line_no
        super().__init__(f"malformed misspelling entry on line {line_no}")


class InsufficientEligibleWordsError(GlyphbreakError):
    """Too few dictionary-covered words to meet the quota in strict mode."""

    def __init__(self, eligible_count: int, quota: int):
        self.eligible_count = eligible_count
        self.quota = quota
        super().__init__(f"{eligible_count} eligible words, quota {quota}")


class EmptyCorpusError(GlyphbreakError):
    """Operation requires a nonempty corpus."""


class NoTokensError(GlyphbreakError):
    """Operation requires at least one scorable token."""


class DegenerateCalibrationError(GlyphbreakError):
    """All calibration features are identical; no threshold separates the classes."""


class TransportError(GlyphbreakError):
    """Remote detector request failed at the HTTP level."""

    def __init__(self, detail: str, status: int | None = None):
        self.status = status
        self.detail = detail
        super().__init__(f"transport error: {detail}")


class ProtocolError(GlyphbreakError):
    """Remote detector response does not match the wire protocol."""


class ChecksumMismatchError(GlyphbreakError):
    """Remote detector read different bytes than the client sent."""

    def __init__(self, sent_sha256: str, echoed_sha256: str):
        self.sent_sha256 = sent_sha256
        self.echoed_sha256 = echoed_sha256
        super().__init__(
            f"text checksum mismatch: sent {sent_sha256}, service echoed {echoed_sha256}"
        )


class EmptyExperimentError(GlyphbreakError):
    """Every sample was skipped; the experiment has no evaluated results."""


class TableFormatError(GlyphbreakError):
    """A homoglyph table line is not ``U+XXXX U+YYYY``."""

    def __init__(self, line_no: int, detail: str):
        self.line_no = line_no
        self.detail = detail
        super().__init__(f"bad homoglyph table line {line_no}: {detail}")


class ConfigError(GlyphbreakError):
    """Run configuration is invalid (missing path, missing seed, bad value)."""
