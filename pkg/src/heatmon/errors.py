"""Exception types shared across the pipeline."""


class HeatmonError(Exception):
    """Base class for all heatmon errors."""


class MalformedPayload(HeatmonError):
    """Ingest payload is not a JSON array of spans."""


class OutOfBinSpan(HeatmonError):
    """A span handed to the aggregator lies outside the target interval."""


class MisalignedPlan(HeatmonError):
    """Resample plan or its input snapshots violate step/window alignment."""


class OverlappingSnapshots(HeatmonError):
    """Two input snapshots cover overlapping time ranges."""


class EmptyWindow(HeatmonError):
    """A whole-window aggregate was requested over zero snapshots."""


class SchemaViolation(HeatmonError):
    """Stored snapshot JSON deviates from the expected nested shape.

    ``path`` points at the first offending node, e.g.
    ``$["1700000000000"][0].datacenter_services["dc1"]``.
    """

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class OutOfOrderAppend(HeatmonError):
    """Appended snapshot does not advance the store timeline."""


class StorageFailure(HeatmonError):
    """Underlying blob storage failed; the operation may be retried."""


class InvalidSpec(HeatmonError):
    """Heatmap query spec violates its invariants."""


class InvalidScenario(HeatmonError):
    """Synthetic scenario spec violates its invariants."""
