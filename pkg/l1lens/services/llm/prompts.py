"""Prompt assembly from the versioned templates.

Prompt text lives in ``templates/l1lens/prompts/<version>/``; a refined
prompt is a new version directory, never an edit in place.
"""

import json
import re

from django.conf import settings
from django.template import TemplateDoesNotExist
from django.template.loader import render_to_string

from l1lens.errors import PromptError
from l1lens.schemas.annotation import (
    CONSTRUCT_DEFINITIONS,
    AnnotationRecord,
    ConstructKind,
)
from l1lens.schemas.corpus import Condition, LanguageCode
from l1lens.schemas.llm import (
    ChatMessage,
    L1KnowledgeCard,
    PromptBundle,
    Role,
)
from l1lens.services.segment import Sentence

DEFAULT_TURNS = 20
_BLANK_RUN_RE = re.compile(r"\n{3,}")


def render_prompt(version: str, name: str, context: dict) -> str:
    try:
        text = render_to_string(f"l1lens/prompts/{version}/{name}", context)
    except TemplateDoesNotExist as exc:
        raise PromptError(
            f"prompt {name!r} not found for version {version!r}"
        ) from exc
    return _BLANK_RUN_RE.sub("\n\n", text).strip() + "\n"


def build_generation_prompt(
    l1: LanguageCode,
    topic: str,
    card: L1KnowledgeCard | None,
    condition: Condition,
    turns: int = DEFAULT_TURNS,
    version: str | None = None,
) -> PromptBundle:
    version = version or settings.L1LENS["PROMPT_VERSION"]
    if condition == Condition.NOT_APPLICABLE:
        raise PromptError("generation needs the bi or mono condition")
    if condition == Condition.BI:
        if card is None:
            raise PromptError(f"the bi condition needs a {l1.value} card")
        if card.l1 != l1:
            raise PromptError(
                f"card language {card.l1.value} does not match {l1.value}"
            )
    elif card is not None:
        raise PromptError("the mono condition takes no knowledge card")
    if not topic.strip():
        raise PromptError("topic is empty")
    if turns < 2:  # noqa: PLR2004
        raise PromptError("a dialogue needs at least 2 turns")

    context = {
        "card": card,
        "language": l1.display_name if condition == Condition.BI else None,
        "topic": topic.strip(),
        "turns": turns,
    }
    return PromptBundle(
        messages=[
            ChatMessage(
                role=Role.SYSTEM,
                content=render_prompt(
                    version, "generation_system.txt", context
                ),
            ),
            ChatMessage(
                role=Role.USER,
                content=render_prompt(version, "generation.txt", context),
            ),
        ],
        condition=condition,
        l1=l1,
        topic=topic.strip(),
        prompt_version=version,
        turns=turns,
    )


def build_annotation_prompt(
    sentence_batch: list[Sentence],
    kind: ConstructKind,
    shots: list[AnnotationRecord],
    shot_count: int | None = None,
    version: str | None = None,
) -> PromptBundle:
    version = version or settings.L1LENS["PROMPT_VERSION"]
    if shot_count is None:
        shot_count = settings.L1LENS["ANNOTATION_SHOTS"]
    if not sentence_batch:
        raise PromptError("annotation batch is empty")
    if len(shots) != shot_count:
        raise PromptError(
            f"{kind.display_name} needs {shot_count} examples, "
            f"got {len(shots)}"
        )
    context = {
        "construct": kind.display_name,
        "definition": CONSTRUCT_DEFINITIONS[kind],
        "shots": [
            json.dumps(shot.as_prompt_dict(), ensure_ascii=False)
            for shot in shots
        ],
        "sentences": [sentence.raw for sentence in sentence_batch],
    }
    return PromptBundle(
        messages=[
            ChatMessage(
                role=Role.SYSTEM,
                content=render_prompt(version, "annotation_system.txt", {}),
            ),
            ChatMessage(
                role=Role.USER,
                content=render_prompt(version, "annotation.txt", context),
            ),
        ],
        condition=Condition.NOT_APPLICABLE,
        prompt_version=version,
    )
