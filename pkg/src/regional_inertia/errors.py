"""Exception types carrying the module and operation that raised them."""

from __future__ import annotations


class AnalysisError(ValueError):
    """Base error for every failure inside the estimation pipeline.

    ``str(err)`` is prefixed with ``module.operation`` so that a message
    surfacing at the CLI still says where it came from.
    """

    module = "regional_inertia"

    def __init__(self, message: str, *, operation: str = "", module: str | None = None):
        self.message = message
        self.operation = operation
        if module is not None:
            self.module = module
        super().__init__(message)

    @property
    def provenance(self) -> str:
        return f"{self.module}.{self.operation}" if self.operation else self.module

    def __str__(self) -> str:
        return f"[{self.provenance}] {self.message}"


class TraceFormatError(AnalysisError):
    module = "ingest"


class BundleError(AnalysisError):
    module = "ingest"


class PreprocessError(AnalysisError):
    module = "preprocess"


class OnsetError(AnalysisError):
    module = "onset"


class RocofError(AnalysisError):
    module = "rocof"


class InertiaError(AnalysisError):
    module = "metrics"


class AssemblyError(AnalysisError):
    module = "metrics"


class SynthSpecError(AnalysisError):
    module = "synth"


class DataQualityWarning(UserWarning):
    """Non-fatal condition worth recording in a result's diagnostics."""
