import logging
from collections.abc import Iterable
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path

import pydantic_core

from l1lens.errors import MalformedRecordError, MissingAnnotationsError
from l1lens.schemas.annotation import (
    Annotation,
    ConstructKind,
    Correctness,
    SentenceRef,
)
from l1lens.schemas.corpus import Corpus, Dialogue
from l1lens.services.annotators import annotate_sentence
from l1lens.services.lexicons import Lexicons
from l1lens.services.records import read_records, write_records
from l1lens.services.segment import segment

logger = logging.getLogger("l1lens")

EMPTY_MARKER = "unannotated_dialogue"
RECORD_CORRECTNESS = {
    Correctness.NATIVE_LIKE: "correct",
    Correctness.NON_NATIVE_LIKE: "incorrect",
    Correctness.UNJUDGED: "unjudged",
}


def annotate_all(dialogue: Dialogue, lex: Lexicons) -> list[Annotation]:
    annotations = []
    for sentence in segment(dialogue):
        annotations.extend(annotate_sentence(sentence, lex))
    return sorted(annotations, key=Annotation.sort_key)


def annotate_corpus(
    corpus: Corpus, lex: Lexicons, workers: int = 1
) -> list[Annotation]:
    """Annotate every dialogue; results follow corpus order."""
    task = partial(annotate_all, lex=lex)
    if workers > 1 and len(corpus) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            per_dialogue = list(executor.map(task, corpus.dialogues))
    else:
        per_dialogue = [task(dialogue) for dialogue in corpus.dialogues]
    annotations = [item for batch in per_dialogue for item in batch]
    logger.info(
        "Annotated %d dialogues: %d annotations",
        len(corpus),
        len(annotations),
    )
    return annotations


def to_five_field_record(annotation: Annotation) -> dict:
    """The five-field record: type, sentence, tokens, rationale, verdict."""
    groups = [
        " ".join(annotation.tokens[offset : offset + end - start])
        for offset, (start, end) in zip(
            _offsets(annotation.spans), annotation.spans, strict=True
        )
    ]
    return {
        "type": annotation.kind.display_name,
        "annotation sentence": annotation.sentence,
        "annotation token": ", ".join(groups),
        "rationale": annotation.rationale,
        "grammar correctness": RECORD_CORRECTNESS[annotation.correctness],
    }


def _offsets(spans: list[tuple[int, int]]) -> list[int]:
    offsets = []
    total = 0
    for start, end in spans:
        offsets.append(total)
        total += end - start
    return offsets


def annotation_to_record(annotation: Annotation) -> dict:
    ref = annotation.sentence_ref
    record = {
        "type": annotation.kind.value,
        "annotation sentence": annotation.sentence,
        "annotation token": list(annotation.tokens),
        "rationale": annotation.rationale,
        "grammar correctness": annotation.correctness.value,
        "sentence_ref": {
            "dialogue_id": ref.dialogue_id,
            "turn_index": ref.turn_index,
            "sentence_index": ref.sentence_index,
        },
        "spans": [[start, end] for start, end in annotation.spans],
    }
    if annotation.label is not None:
        record["label"] = annotation.label.value
    return record


def annotation_from_record(record: dict) -> Annotation:
    return Annotation(
        kind=ConstructKind(record["type"]),
        sentence_ref=SentenceRef(**record["sentence_ref"]),
        spans=[tuple(span) for span in record["spans"]],
        tokens=record["annotation token"],
        sentence=record["annotation sentence"],
        rationale=record["rationale"],
        correctness=Correctness(record["grammar correctness"]),
        label=record.get("label"),
    )


def save_annotations(
    annotations: Iterable[Annotation],
    path: Path,
    dialogue_ids: Iterable[str] = (),
) -> int:
    """Write the store; listed dialogues without annotations get a marker.

    The marker keeps "annotated, nothing found" apart from "never
    annotated" when the store is loaded again.
    """
    annotations = list(annotations)
    annotated = {a.sentence_ref.dialogue_id for a in annotations}
    empty = [i for i in dialogue_ids if i not in annotated]
    records = [annotation_to_record(item) for item in annotations]
    records.extend({EMPTY_MARKER: dialogue_id} for dialogue_id in empty)
    write_records(path, records)
    logger.info(
        "Wrote %d annotations to %s (%d dialogues without any)",
        len(annotations),
        path,
        len(empty),
    )
    return len(annotations)


def read_store(path: Path) -> tuple[list[Annotation], list[str]]:
    annotations = []
    empty = []
    for number, record in read_records(path):
        if EMPTY_MARKER in record:
            empty.append(record[EMPTY_MARKER])
            continue
        try:
            annotations.append(annotation_from_record(record))
        except (
            KeyError,
            TypeError,
            ValueError,
            pydantic_core.ValidationError,
        ) as exc:
            raise MalformedRecordError(
                f"invalid annotation record: {exc}", path=path, line=number
            ) from exc
    return annotations, empty


def load_annotations(path: Path) -> list[Annotation]:
    return read_store(path)[0]


class AnnotationStore:
    """Annotations grouped by dialogue id."""

    def __init__(
        self,
        annotations: Iterable[Annotation] = (),
        dialogue_ids: Iterable[str] = (),
    ):
        self._by_dialogue: dict[str, list[Annotation]] = {
            dialogue_id: [] for dialogue_id in dialogue_ids
        }
        for annotation in annotations:
            self._by_dialogue.setdefault(
                annotation.sentence_ref.dialogue_id, []
            ).append(annotation)

    @classmethod
    def load(cls, path: Path) -> "AnnotationStore":
        annotations, empty = read_store(path)
        return cls(annotations, empty)

    def __contains__(self, dialogue_id: str) -> bool:
        return dialogue_id in self._by_dialogue

    def __len__(self) -> int:
        return sum(len(items) for items in self._by_dialogue.values())

    def dialogue_ids(self) -> list[str]:
        return list(self._by_dialogue)

    def annotations(self) -> list[Annotation]:
        return [
            annotation
            for items in self._by_dialogue.values()
            for annotation in items
        ]

    def for_dialogue(self, dialogue_id: str) -> list[Annotation]:
        if dialogue_id not in self._by_dialogue:
            raise MissingAnnotationsError([dialogue_id])
        return self._by_dialogue[dialogue_id]

    def require(self, dialogue_ids: Iterable[str]):
        missing = [i for i in dialogue_ids if i not in self._by_dialogue]
        if missing:
            raise MissingAnnotationsError(missing)
