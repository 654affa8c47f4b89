"""Plain-text word lists that drive the rule-based annotators.

Each list is a UTF-8 file with one lowercase entry per line and ``#``
comments. Pair files (``irregular_past``, ``collocation_pairs``) hold two
tab-separated columns. A user lexicon directory only needs the files it
overrides; the rest come from the bundled set.
"""

import functools
import hashlib
import logging
from dataclasses import dataclass, fields
from functools import cached_property
from pathlib import Path

from django.conf import settings

from l1lens.errors import ConfigError
from l1lens.services.segment import tokenize

logger = logging.getLogger("l1lens")

Phrase = tuple[str, ...]

PHRASE_LISTS = (
    "modals",
    "quantifiers",
    "number_words",
    "pronouns_referential",
    "temporal_past",
    "temporal_nonpast",
    "light_verbs",
    "imperative_verbs",
    "determiners",
    "function_words",
    "verbs",
)
PHRASE_TUPLES = frozenset(
    {"modals", "quantifiers", "temporal_past", "temporal_nonpast"}
)


@dataclass(frozen=True)
class Lexicons:
    modals: tuple[Phrase, ...]
    quantifiers: tuple[Phrase, ...]
    number_words: frozenset[str]
    pronouns_referential: frozenset[str]
    temporal_past: tuple[Phrase, ...]
    temporal_nonpast: tuple[Phrase, ...]
    irregular_past: dict[str, str]
    light_verbs: frozenset[str]
    collocation_pairs: frozenset[tuple[str, str]]
    imperative_verbs: frozenset[str]
    determiners: frozenset[str]
    function_words: frozenset[str]
    verbs: frozenset[str]

    @cached_property
    def modal_index(self) -> dict[str, tuple[Phrase, ...]]:
        return phrase_index(self.modals)

    @cached_property
    def quantifier_index(self) -> dict[str, tuple[Phrase, ...]]:
        words = tuple((word,) for word in sorted(self.number_words))
        return phrase_index(self.quantifiers + words)

    @cached_property
    def temporal_index(self) -> dict[str, tuple[Phrase, ...]]:
        return phrase_index(self.temporal_past + self.temporal_nonpast)

    @cached_property
    def past_phrases(self) -> frozenset[Phrase]:
        return frozenset(self.temporal_past)

    @cached_property
    def modal_words(self) -> frozenset[str]:
        return frozenset(
            phrase[0] for phrase in self.modals if len(phrase) == 1
        )

    @cached_property
    def quantifier_words(self) -> frozenset[str]:
        return frozenset(
            word for phrase in self.quantifiers for word in phrase
        )

    @cached_property
    def verb_bases(self) -> frozenset[str]:
        """Every verb known in base form."""
        return (
            self.verbs
            | self.light_verbs
            | self.imperative_verbs
            | frozenset(self.irregular_past.values())
            | frozenset(verb for verb, _ in self.collocation_pairs)
        )

    @cached_property
    def collocation_verbs(self) -> frozenset[str]:
        return self.light_verbs | frozenset(
            verb for verb, _ in self.collocation_pairs
        )

    @cached_property
    def collocation_nouns(self) -> dict[str, frozenset[str]]:
        """Noun lemma -> verbs it is listed with."""
        nouns: dict[str, set[str]] = {}
        for verb, noun in self.collocation_pairs:
            nouns.setdefault(noun, set()).add(verb)
        return {noun: frozenset(verbs) for noun, verbs in nouns.items()}


def phrase_index(
    phrases: tuple[Phrase, ...],
) -> dict[str, tuple[Phrase, ...]]:
    """Group phrases by first word, longest first."""
    index: dict[str, list[Phrase]] = {}
    for phrase in set(phrases):
        index.setdefault(phrase[0], []).append(phrase)
    return {
        first: tuple(sorted(group, key=lambda p: (-len(p), p)))
        for first, group in index.items()
    }


def _entries(path: Path) -> list[tuple[int, str]]:
    entries = []
    with path.open("r", encoding="utf-8") as f:
        for number, line in enumerate(f, start=1):
            text = line.strip()
            if text and not text.startswith("#"):
                entries.append((number, text))
    return entries


def _check_lowercase(path: Path, number: int, entry: str):
    if entry != entry.lower():
        raise ConfigError(
            f"{path}:{number}: entry {entry!r} is not lowercase"
        )


def _read_phrases(path: Path) -> tuple[Phrase, ...]:
    phrases = []
    for number, entry in _entries(path):
        _check_lowercase(path, number, entry)
        phrase = tuple(token.lowercase for token in tokenize(entry))
        if phrase:
            phrases.append(phrase)
    if not phrases:
        raise ConfigError(f"{path}: lexicon is empty")
    return tuple(dict.fromkeys(phrases))


def _read_pairs(path: Path) -> list[tuple[str, str]]:
    pairs = []
    for number, entry in _entries(path):
        _check_lowercase(path, number, entry)
        cells = [cell.strip() for cell in entry.split("\t")]
        if len(cells) != 2 or not all(cells):  # noqa: PLR2004
            raise ConfigError(
                f"{path}:{number}: expected two tab-separated columns"
            )
        pairs.append((cells[0], cells[1]))
    if not pairs:
        raise ConfigError(f"{path}: lexicon is empty")
    return pairs


def _resolve(name: str, directory: Path | None) -> Path:
    if directory is not None:
        candidate = directory / f"{name}.txt"
        if candidate.is_file():
            return candidate
    return Path(settings.L1LENS["LEXICON_DIR"]) / f"{name}.txt"


def load_lexicons(directory: Path | None = None) -> Lexicons:
    if directory is not None and not directory.is_dir():
        raise ConfigError(f"{directory}: lexicon directory not found")
    values = {}
    for name in PHRASE_LISTS:
        phrases = _read_phrases(_resolve(name, directory))
        if name in PHRASE_TUPLES:
            values[name] = phrases
        else:
            values[name] = frozenset(" ".join(phrase) for phrase in phrases)
    values["irregular_past"] = dict(
        _read_pairs(_resolve("irregular_past", directory))
    )
    values["collocation_pairs"] = frozenset(
        _read_pairs(_resolve("collocation_pairs", directory))
    )
    logger.debug("Loaded lexicons (override directory: %s)", directory)
    return Lexicons(**values)


@functools.cache
def bundled_lexicons() -> Lexicons:
    return load_lexicons()


def lexicon_digest(lexicons: Lexicons) -> str:
    """sha256 over a canonical rendering of every list."""
    digest = hashlib.sha256()
    for field in fields(lexicons):
        value = getattr(lexicons, field.name)
        if isinstance(value, dict):
            entries = sorted(f"{k}\t{v}" for k, v in value.items())
        elif field.name == "collocation_pairs":
            entries = sorted("\t".join(pair) for pair in value)
        elif isinstance(value, tuple):
            entries = sorted(" ".join(phrase) for phrase in value)
        else:
            entries = sorted(value)
        digest.update(field.name.encode("utf-8"))
        digest.update(b"\n")
        digest.update("\n".join(entries).encode("utf-8"))
        digest.update(b"\n\n")
    return digest.hexdigest()
