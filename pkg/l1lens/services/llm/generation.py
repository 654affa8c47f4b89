import logging
import re
import time
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor

from l1lens.errors import TransportError, UnparseableResponseError
from l1lens.schemas.corpus import (
    Condition,
    Corpus,
    Dialogue,
    LanguageCode,
    SourceTag,
    Speaker,
    Turn,
)
from l1lens.schemas.llm import (
    GenerationConfig,
    GenerationFailure,
    L1KnowledgeCard,
    PromptBundle,
)
from l1lens.services.llm.client import (
    AuditLog,
    TokenBucket,
    Transport,
    build_request,
    call_with_retries,
)
from l1lens.services.llm.prompts import DEFAULT_TURNS, build_generation_prompt

logger = logging.getLogger("l1lens")

# "Speaker A (NS):", "**Speaker B (L2, Thai):**", "Speaker B:"
SPEAKER_LABEL_RE = re.compile(
    r"[*_]*Speaker\s+([AB])\s*(\([^)\n]*\))?\s*[*_]*\s*:\s*[*_]*"
)
SPEAKERS = {"A": Speaker.NATIVE_SPEAKER, "B": Speaker.L2_SPEAKER}
_SLUG_RE = re.compile(r"[^a-z0-9]+")


def parse_dialogue_response(raw: str) -> list[Turn]:
    """Split a response on speaker labels; text between labels is a turn.

    Several turns may share a line, and markdown emphasis around the
    labels is ignored.
    """
    labels = list(SPEAKER_LABEL_RE.finditer(raw))
    turns = []
    for index, label in enumerate(labels):
        end = labels[index + 1].start() if index + 1 < len(labels) else None
        text = raw[label.end() : end].strip()
        text = text.removesuffix("\\\\").strip()
        if text:
            turns.append(Turn(speaker=SPEAKERS[label.group(1)], text=text))
    if len(turns) < 2:  # noqa: PLR2004
        raise UnparseableResponseError(
            f"found {len(turns)} speaker turns, need at least 2", raw=raw
        )
    return turns


def model_slug(model_name: str) -> str:
    return _SLUG_RE.sub("", model_name.lower()) or "model"


def generate_dialogue(
    bundle: PromptBundle,
    cfg: GenerationConfig,
    transport: Transport,
    dialogue_id: str | None = None,
    sleep: Callable[[float], None] = time.sleep,
    limiter: TokenBucket | None = None,
    audit: AuditLog | None = None,
) -> Dialogue:
    raw = call_with_retries(
        transport, build_request(bundle, cfg), cfg, sleep, limiter
    )
    if audit is not None:
        audit.append(
            cfg.model_name,
            bundle.prompt_version,
            bundle.condition.value,
            raw,
            dialogue_id=dialogue_id,
        )
    turns = parse_dialogue_response(raw)
    if dialogue_id is None:
        dialogue_id = (
            f"{bundle.l1.value}_{model_slug(cfg.model_name)}"
            f"-{bundle.condition.value}"
        )
    return Dialogue(
        id=dialogue_id,
        l1=bundle.l1,
        source=SourceTag.model(cfg.model_name),
        condition=bundle.condition,
        topic=bundle.topic,
        turns=turns,
    )


def generate_batch(
    l1: LanguageCode,
    topics: Iterable[str],
    card: L1KnowledgeCard | None,
    conditions: Iterable[Condition],
    per_cell: int,
    cfg: GenerationConfig,
    transport: Transport,
    workers: int = 1,
    max_in_flight: int | None = None,
    turns: int = DEFAULT_TURNS,
    version: str | None = None,
    limiter: TokenBucket | None = None,
    audit: AuditLog | None = None,
    sleep: Callable[[float], None] = time.sleep,
) -> tuple[Corpus, list[GenerationFailure]]:
    """Generate ``per_cell`` dialogues for every (condition, topic) cell.

    Bundles are built up front, so prompt errors surface before any call.
    Results keep the (condition, topic, repetition) order whatever the
    completion order was.
    """
    topics = list(topics)
    jobs = []
    slug = model_slug(cfg.model_name)
    for condition in conditions:
        for topic_index, topic in enumerate(topics):
            bundle = build_generation_prompt(
                l1,
                topic,
                card if condition == Condition.BI else None,
                condition,
                turns,
                version,
            )
            for repetition in range(per_cell):
                dialogue_id = (
                    f"{l1.value}_{slug}-{condition.value}"
                    f"-t{topic_index:03d}-r{repetition:03d}"
                )
                jobs.append((dialogue_id, bundle))

    def run(job) -> Dialogue | GenerationFailure:
        dialogue_id, bundle = job
        try:
            return generate_dialogue(
                bundle, cfg, transport, dialogue_id, sleep, limiter, audit
            )
        except (TransportError, UnparseableResponseError) as exc:
            logger.warning("Generation failed for %s: %s", dialogue_id, exc)
            return GenerationFailure(
                dialogue_id=dialogue_id,
                condition=bundle.condition,
                topic=bundle.topic,
                error=str(exc).split("\n", 1)[0],
            )

    pool_size = max(1, min(workers, max_in_flight or workers))
    if pool_size > 1:
        with ThreadPoolExecutor(max_workers=pool_size) as executor:
            outcomes = list(executor.map(run, jobs))
    else:
        outcomes = [run(job) for job in jobs]

    dialogues = [item for item in outcomes if isinstance(item, Dialogue)]
    failures = [
        item for item in outcomes if isinstance(item, GenerationFailure)
    ]
    logger.info(
        "Generated %d %s dialogues with %s: %d failed",
        len(dialogues),
        l1.value,
        cfg.model_name,
        len(failures),
    )
    return Corpus(dialogues=dialogues), failures
