from .annotation import (
    annotate_with_llm,
    load_shots,
    parse_annotation_response,
)
from .cards import bundled_card_path, load_knowledge_card
from .client import (
    AuditLog,
    FixtureTransport,
    HttpChatTransport,
    RecordingTransport,
    TokenBucket,
    call_with_retries,
)
from .generation import generate_batch, parse_dialogue_response
from .prompts import build_annotation_prompt, build_generation_prompt
