"""LLM annotation engine: few-shot prompts in, five-field records out."""

import json
import logging
import re
import time
from collections.abc import Callable, Sequence
from pathlib import Path

import pydantic_core
from django.conf import settings

from l1lens.errors import AnnotationResponseError, PromptError
from l1lens.schemas.annotation import (
    CONSTRUCT_NAMES,
    Annotation,
    AnnotationRecord,
    ConstructKind,
    Correctness,
    SentenceRef,
)
from l1lens.schemas.corpus import Dialogue
from l1lens.schemas.llm import GenerationConfig, RejectedRecord
from l1lens.services.llm.client import (
    AuditLog,
    TokenBucket,
    Transport,
    build_request,
    call_with_retries,
)
from l1lens.services.llm.prompts import build_annotation_prompt
from l1lens.services.segment import Sentence, segment, tokenize

logger = logging.getLogger("l1lens")

RECORD_FIELDS = (
    "type",
    "annotation sentence",
    "annotation token",
    "rationale",
    "grammar correctness",
)
_FENCE_RE = re.compile(r"```(?:json)?\s*\n(.*?)```", re.S | re.I)
_BRACKETED_RE = re.compile(r"\[([^\]]+)\]")
_SPACES_RE = re.compile(r"\s+")

NATIVE_VERDICTS = frozenset(
    {"correct", "yes", "true", "native like", "native", "aligned"}
)
NON_NATIVE_VERDICTS = frozenset(
    {
        "incorrect",
        "no",
        "false",
        "non native like",
        "non native",
        "not aligned",
        "wrong",
    }
)


def _key(text: str) -> str:
    text = text.strip().lower().replace("_", " ").replace("-", " ")
    return _SPACES_RE.sub(" ", text)


def _singular_key(text: str) -> str:
    return " ".join(word.removesuffix("s") for word in _key(text).split())


KIND_LOOKUP = {
    _singular_key(name): kind
    for kind in ConstructKind
    for name in (kind.value, CONSTRUCT_NAMES[kind])
}


def parse_kind(value) -> ConstructKind | None:
    if not isinstance(value, str):
        return None
    return KIND_LOOKUP.get(_singular_key(value))


def parse_correctness(value) -> Correctness:
    if isinstance(value, bool):
        if value:
            return Correctness.NATIVE_LIKE
        return Correctness.NON_NATIVE_LIKE
    if isinstance(value, str):
        verdict = _key(value).rstrip(".")
        if verdict in NATIVE_VERDICTS:
            return Correctness.NATIVE_LIKE
        if verdict in NON_NATIVE_VERDICTS:
            return Correctness.NON_NATIVE_LIKE
    return Correctness.UNJUDGED


def extract_structured_block(raw: str):
    """The first JSON value in a ```json fence, else anywhere in the text."""
    for match in _FENCE_RE.finditer(raw):
        try:
            return json.loads(match.group(1))
        except json.JSONDecodeError:
            continue
    decoder = json.JSONDecoder()
    for index, char in enumerate(raw):
        if char not in "{[":
            continue
        try:
            value, _ = decoder.raw_decode(raw, index)
        except json.JSONDecodeError:
            continue
        if isinstance(value, dict | list):
            return value
    raise AnnotationResponseError("no JSON block in response", raw=raw)


def _records(block) -> list:
    if isinstance(block, list):
        return block
    if isinstance(block, dict):
        if any(_key(name) == "type" for name in block):
            return [block]
        for value in block.values():
            if isinstance(value, list):
                return value
    return []


def _token_groups(value) -> list[str]:
    if isinstance(value, list):
        return [str(item) for item in value if str(item).strip()]
    if not isinstance(value, str):
        return []
    bracketed = _BRACKETED_RE.findall(value)
    if bracketed:
        return bracketed
    return [part for part in value.split(",") if part.strip()]


def locate_spans(
    sentence: Sentence, groups: list[str]
) -> list[tuple[int, int]] | None:
    """Exact, case-insensitive token search; groups must appear in order."""
    words = sentence.lowered
    spans = []
    position = 0
    for group in groups:
        needle = [token.lowercase for token in tokenize(group)]
        if not needle:
            return None
        found = None
        for start in range(position, len(words) - len(needle) + 1):
            if words[start : start + len(needle)] == needle:
                found = (start, start + len(needle))
                break
        if found is None:
            return None
        spans.append(found)
        position = found[1]
    return spans


def _find_sentence(
    text: str, batch: Sequence[Sentence]
) -> Sentence | None:
    wanted = _SPACES_RE.sub(" ", text.strip())
    for sentence in batch:
        if _SPACES_RE.sub(" ", sentence.raw.strip()) == wanted:
            return sentence
    return None


def _parse_record(
    record, batch: Sequence[Sentence]
) -> tuple[Annotation | None, str | None]:
    if not isinstance(record, dict):
        return None, "record is not an object"
    fields = {_key(name): value for name, value in record.items()}
    for name in RECORD_FIELDS:
        if name not in fields or fields[name] in (None, ""):
            return None, f"missing field: {name}"
    kind = parse_kind(fields["type"])
    if kind is None:
        return None, f"unknown type: {fields['type']}"
    text = str(fields["annotation sentence"])
    if batch:
        sentence = _find_sentence(text, batch)
        if sentence is None:
            return None, "sentence not in batch"
    else:
        text = text.strip()
        tokens = tuple(tokenize(text))
        if not tokens:
            return None, "sentence is empty"
        sentence = Sentence("", 0, 0, tokens, text)
    groups = _token_groups(fields["annotation token"])
    if not groups or len(groups) > 2:  # noqa: PLR2004
        return None, "span not locatable"
    spans = locate_spans(sentence, groups)
    if spans is None:
        return None, "span not locatable"
    try:
        annotation = Annotation(
            kind=kind,
            sentence_ref=SentenceRef(
                dialogue_id=sentence.dialogue_id,
                turn_index=sentence.turn_index,
                sentence_index=sentence.sentence_index,
            ),
            spans=spans,
            tokens=[
                sentence.tokens[index].text
                for start, end in spans
                for index in range(start, end)
            ],
            sentence=sentence.raw,
            rationale=str(fields["rationale"]),
            correctness=parse_correctness(fields["grammar correctness"]),
        )
    except pydantic_core.ValidationError as exc:
        return None, f"invalid record: {exc.errors()[0]['msg']}"
    return annotation, None


def parse_annotation_response(
    raw: str, batch: Sequence[Sentence] = ()
) -> tuple[list[Annotation], list[RejectedRecord]]:
    """Validate every record; failures are returned, never dropped.

    With a batch, each record's sentence must be one of the batch
    sentences and the annotation refers to it; without one, the record's
    own sentence is tokenized.
    """
    block = extract_structured_block(raw)
    accepted = []
    rejected = []
    for index, record in enumerate(_records(block)):
        annotation, reason = _parse_record(record, batch)
        if annotation is None:
            rejected.append(
                RejectedRecord(index=index, reason=reason, record=record)
            )
        else:
            accepted.append(annotation)
    return accepted, rejected


def load_shots(
    version: str | None = None, directory: Path | None = None
) -> dict[ConstructKind, list[AnnotationRecord]]:
    version = version or settings.L1LENS["PROMPT_VERSION"]
    directory = directory or Path(settings.L1LENS["SHOT_DIR"])
    path = directory / f"{version}.json"
    if not path.is_file():
        raise PromptError(f"no annotation examples for version {version!r}")
    data = json.loads(path.read_text(encoding="utf-8"))
    shots = {}
    for name, records in data.items():
        kind = parse_kind(name)
        if kind is None:
            raise PromptError(f"{path}: unknown construct {name!r}")
        shots[kind] = [AnnotationRecord(**record) for record in records]
    return shots


def annotate_with_llm(
    dialogue: Dialogue,
    shots: dict[ConstructKind, list[AnnotationRecord]],
    cfg: GenerationConfig,
    transport: Transport,
    kinds: Sequence[ConstructKind] = tuple(ConstructKind),
    version: str | None = None,
    sleep: Callable[[float], None] = time.sleep,
    limiter: TokenBucket | None = None,
    audit: AuditLog | None = None,
) -> tuple[list[Annotation], list[RejectedRecord]]:
    """One prompt per construct over all sentences of the dialogue."""
    sentences = segment(dialogue)
    accepted: list[Annotation] = []
    rejected: list[RejectedRecord] = []
    if not sentences:
        return accepted, rejected
    for kind in kinds:
        bundle = build_annotation_prompt(
            sentences, kind, shots.get(kind, []), version=version
        )
        raw = call_with_retries(
            transport, build_request(bundle, cfg), cfg, sleep, limiter
        )
        if audit is not None:
            audit.append(
                cfg.model_name,
                bundle.prompt_version,
                kind.value,
                raw,
                dialogue_id=dialogue.id,
            )
        good, bad = parse_annotation_response(raw, sentences)
        accepted.extend(good)
        rejected.extend(bad)
    if rejected:
        logger.warning(
            "%s: %d annotation records rejected", dialogue.id, len(rejected)
        )
    return sorted(accepted, key=Annotation.sort_key), rejected
