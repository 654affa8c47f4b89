class L1LensError(Exception):
    category = "error"


class ConfigError(L1LensError):
    category = "config"


class ParseError(L1LensError):
    category = "input"

    def __init__(self, message: str, path=None, line: int | None = None):
        self.path = path
        self.line = line
        location = str(path) if path is not None else "<input>"
        if line is not None:
            location = f"{location}:{line}"
        super().__init__(f"{location}: {message}")


class UnknownLanguageError(ParseError): ...


class EmptyTranscriptError(ParseError): ...


class TranscriptDecodeError(ParseError): ...


class MalformedRecordError(ParseError): ...


class CorpusError(L1LensError):
    category = "data"


class PromptError(L1LensError):
    category = "data"


class TransportError(L1LensError):
    category = "model"

    def __init__(self, message: str, attempts: int = 0, raw: str = ""):
        self.attempts = attempts
        self.raw = raw
        super().__init__(message)


class UnparseableResponseError(L1LensError):
    category = "model"

    def __init__(self, message: str, raw: str):
        self.raw = raw
        super().__init__(f"{message}\n--- raw response ---\n{raw}")


class AnnotationResponseError(UnparseableResponseError): ...


class MissingAnnotationsError(L1LensError):
    category = "data"

    def __init__(self, dialogue_ids):
        self.dialogue_ids = list(dialogue_ids)
        shown = ", ".join(self.dialogue_ids[:10])
        more = len(self.dialogue_ids) - 10
        if more > 0:
            shown = f"{shown} (+{more} more)"
        super().__init__(f"no stored annotations for dialogues: {shown}")


class MetricError(L1LensError):
    category = "data"


class ZeroTokenDialogueError(MetricError): ...


class SynthError(L1LensError):
    category = "data"


class ReviewError(L1LensError):
    category = "data"


class MissingJudgmentsError(ReviewError):
    def __init__(self, refs):
        self.refs = list(refs)
        super().__init__(
            "no judgments for sampled annotations: " + ", ".join(self.refs)
        )


class OracleFailure(L1LensError):
    category = "oracle"


class PartialGenerationError(L1LensError):
    category = "partial"

    def __init__(self, succeeded: int, failed: int):
        self.succeeded = succeeded
        self.failed = failed
        super().__init__(
            f"generation finished with failures: "
            f"{succeeded} succeeded, {failed} failed"
        )
