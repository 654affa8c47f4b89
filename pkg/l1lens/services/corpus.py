import csv
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pydantic_core

from l1lens.errors import (
    CorpusError,
    EmptyTranscriptError,
    MalformedRecordError,
    ParseError,
    TranscriptDecodeError,
    UnknownLanguageError,
)
from l1lens.schemas.corpus import (
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
from l1lens.services.records import read_records, write_records
from l1lens.services.segment import dialogue_token_count

logger = logging.getLogger("l1lens")

_FILENAME_RE = re.compile(r"^(?P<l1>[A-Za-z]+)_(?P<speaker>.+)\.txt$")
_PREFIX_RE = re.compile(r"^(?P<prefix>NS|L2)\s*:\s*(?P<text>.*)$", re.I)
MANIFEST_HEADER = ("filename", "l1", "speaker_id", "topic")


def parse_language(code: str, path=None, line: int | None = None):
    try:
        return LanguageCode(code.strip().lower())
    except ValueError:
        raise UnknownLanguageError(
            f"unknown language code {code!r}", path=path, line=line
        ) from None


def load_manifest(path: Path) -> dict[str, ManifestRow]:
    rows = {}
    with path.open("r", encoding="utf-8", newline="") as f:
        for number, fields in enumerate(
            csv.reader(f, delimiter="\t"), start=1
        ):
            if not fields or not any(cell.strip() for cell in fields):
                continue
            cells = [cell.strip() for cell in fields]
            if number == 1 and tuple(cells[:4]) == MANIFEST_HEADER:
                continue
            if len(cells) < 3:  # noqa: PLR2004
                raise ParseError(
                    "manifest rows need filename, l1 and speaker_id",
                    path=path,
                    line=number,
                )
            topic = cells[3] if len(cells) > 3 else ""  # noqa: PLR2004
            rows[cells[0]] = ManifestRow(
                filename=cells[0],
                l1=parse_language(cells[1], path, number),
                speaker_id=cells[2],
                topic=topic or None,
            )
    return rows


def _decode_lines(path: Path) -> list[tuple[int, str]]:
    data = path.read_bytes()
    lines = []
    for number, raw in enumerate(data.splitlines(), start=1):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TranscriptDecodeError(
                f"undecodable bytes at offset {exc.start}",
                path=path,
                line=number,
            ) from None
        if number == 1:
            text = text.lstrip("﻿")
        lines.append((number, text))
    return lines


def _identity(path: Path, manifest: dict[str, ManifestRow] | None):
    row = (manifest or {}).get(path.name)
    if row is not None:
        dialogue_id = f"{row.l1.value}_{row.speaker_id}"
        if dialogue_id != path.stem:
            dialogue_id = f"{dialogue_id}-{path.stem}"
        return dialogue_id, row.l1, row.topic
    match = _FILENAME_RE.match(path.name)
    if match is None:
        raise ParseError(
            "file name does not follow <l1>_<id>.txt and has no manifest row",
            path=path,
        )
    return path.stem, parse_language(match.group("l1"), path), None


def parse_transcript(
    path: Path, manifest: dict[str, ManifestRow] | None = None
) -> Dialogue:
    path = Path(path)
    dialogue_id, l1, topic = _identity(path, manifest)
    turns = []
    for number, line in _decode_lines(path):
        text = line.strip()
        if not text:
            continue
        speaker = Speaker.L2_SPEAKER
        prefixed = _PREFIX_RE.match(text)
        if prefixed is not None:
            if prefixed.group("prefix").upper() == "NS":
                speaker = Speaker.NATIVE_SPEAKER
            text = prefixed.group("text").strip()
            if not text:
                logger.warning("%s:%d: empty prefixed line", path, number)
                continue
        turns.append(Turn(speaker=speaker, text=text))
    if not turns:
        raise EmptyTranscriptError("empty file", path=path, line=1)
    return Dialogue(
        id=dialogue_id,
        l1=l1,
        source=SourceTag.human(),
        condition=Condition.NOT_APPLICABLE,
        topic=topic,
        turns=turns,
    )


def build_corpus(dialogues: list[Dialogue]) -> Corpus:
    seen = set()
    for dialogue in dialogues:
        if dialogue.id in seen:
            raise CorpusError(f"duplicate dialogue id {dialogue.id}")
        seen.add(dialogue.id)
    return Corpus(dialogues=dialogues)


def transcript_paths(directory: Path) -> list[Path]:
    return sorted(Path(directory).glob("*.txt"))


def ingest_directory(
    directory: Path, manifest: Path | None = None, workers: int = 1
) -> Corpus:
    rows = load_manifest(manifest) if manifest is not None else None
    paths = transcript_paths(directory)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        dialogues = list(pool.map(lambda p: parse_transcript(p, rows), paths))
    logger.info("ingested %d transcripts from %s", len(dialogues), directory)
    return build_corpus(dialogues)


def merge_corpora(corpora: list[Corpus]) -> Corpus:
    return build_corpus([d for corpus in corpora for d in corpus.dialogues])


def dialogue_to_record(dialogue: Dialogue) -> dict:
    record = {
        "id": dialogue.id,
        "l1": dialogue.l1.value,
        "source": dialogue.source.origin.value,
    }
    if dialogue.source.model_name is not None:
        record["model_name"] = dialogue.source.model_name
    record["condition"] = dialogue.condition.value
    if dialogue.topic is not None:
        record["topic"] = dialogue.topic
    record["turns"] = [
        {"speaker": turn.speaker.value, "text": turn.text}
        for turn in dialogue.turns
    ]
    return record


def dialogue_from_record(record: dict, path=None, line=None) -> Dialogue:
    try:
        return Dialogue(
            id=record["id"],
            l1=record["l1"],
            source=SourceTag(
                origin=record["source"],
                model_name=record.get("model_name"),
            ),
            condition=record["condition"],
            topic=record.get("topic"),
            turns=[
                Turn(speaker=turn["speaker"], text=turn["text"])
                for turn in record["turns"]
            ],
        )
    except KeyError as exc:
        raise MalformedRecordError(
            f"missing field {exc.args[0]}", path=path, line=line
        ) from None
    except (TypeError, pydantic_core.ValidationError) as exc:
        raise MalformedRecordError(str(exc), path=path, line=line) from None


def save_corpus(corpus: Corpus, path: Path) -> None:
    count = write_records(
        Path(path), (dialogue_to_record(d) for d in corpus.dialogues)
    )
    logger.info("wrote %d dialogues to %s", count, path)


def load_corpus(path: Path) -> Corpus:
    path = Path(path)
    dialogues = [
        dialogue_from_record(record, path, number)
        for number, record in read_records(path)
    ]
    try:
        return build_corpus(dialogues)
    except CorpusError as exc:
        raise MalformedRecordError(str(exc), path=path) from None


def filter_slice(corpus: Corpus, corpus_slice: CorpusSlice) -> Corpus:
    return Corpus(
        dialogues=[d for d in corpus.dialogues if corpus_slice.matches(d)]
    )


def filter_corpus(
    corpus: Corpus,
    l1: LanguageCode | None = None,
    source: SourceTag | Origin | None = None,
    condition: Condition | None = None,
) -> Corpus:
    origin = model_name = None
    if isinstance(source, SourceTag):
        origin, model_name = source.origin, source.model_name
    elif source is not None:
        origin = Origin(source)
    return filter_slice(
        corpus,
        CorpusSlice(
            l1=l1, origin=origin, model_name=model_name, condition=condition
        ),
    )


def corpus_stats(corpus: Corpus) -> CorpusStats:
    humans = {
        d.speaker_key
        for d in corpus.dialogues
        if d.source.origin == Origin.HUMAN
    }
    participants = len(humans) if humans or not corpus.dialogues else None
    return CorpusStats(
        dialogues=len(corpus.dialogues),
        tokens=sum(dialogue_token_count(d) for d in corpus.dialogues),
        participants=participants,
    )
