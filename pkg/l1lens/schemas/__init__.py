from .annotation import (
    Annotation,
    AnnotationRecord,
    ConstructKind,
    Correctness,
    SentenceRef,
    SpeechActType,
)
from .corpus import (
    Condition,
    Corpus,
    CorpusSlice,
    CorpusStats,
    Dialogue,
    LanguageCode,
    ManifestRow,
    Origin,
    SourceTag,
    Speaker,
    Turn,
)
from .llm import (
    CardLine,
    ChatMessage,
    GenerationConfig,
    GenerationFailure,
    L1KnowledgeCard,
    PromptBundle,
    RejectedRecord,
    Role,
    Trait,
)
from .metrics import (
    CellStatus,
    ConstructRate,
    DensityModel,
    DivergenceResult,
    RateSample,
)
from .review import AccuracyReport, Judgment, ReviewBatch, ReviewItem, Verdict
from .synth import Distribution, OracleCase, SyntheticSpec
