"""Exception hierarchy shared across the package."""


class ConvometricsError(Exception):
    """Base class for all errors raised by this package."""


# --- session bundle ingestion ---

class BundleError(ConvometricsError):
    pass


class MissingManifest(BundleError):
    pass


class MalformedStream(BundleError):
    def __init__(self, file, line=None, message=""):
        self.file = file
        self.line = line
        detail = f"{file}" if line is None else f"{file}:{line}"
        super().__init__(f"malformed stream {detail}: {message}" if message else f"malformed stream {detail}")


class RateOutOfRange(BundleError):
    pass


class NonMonotonicTimestamps(BundleError):
    pass


class UnusableSession(BundleError):
    pass


# --- metrics ---

class OutOfRange(ConvometricsError):
    pass


class EmptySeries(ConvometricsError):
    pass


# --- emotion space ---

class UnknownEmotionName(ConvometricsError):
    pass


class EmptyInput(ConvometricsError):
    pass


class DegenerateInput(ConvometricsError):
    pass


# --- audio feature extraction ---

class EmptyAudio(ConvometricsError):
    pass


class TooFewPeriods(ConvometricsError):
    pass


class NoVoicedContent(ConvometricsError):
    pass


class MissingFormant(ConvometricsError):
    pass


# --- prediction ---

class EmptyDataset(ConvometricsError):
    pass


class SingleClass(ConvometricsError):
    pass


# --- statistics ---

class ConstantInput(ConvometricsError):
    pass


class LengthMismatch(ConvometricsError):
    pass


class ZeroMargin(ConvometricsError):
    pass


class NoCompleteParticipants(ConvometricsError):
    pass


class IoFailure(ConvometricsError):
    pass
