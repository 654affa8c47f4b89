"""Deterministic tokenizer and sentence splitter.

Tokens are words (apostrophe-internal words kept whole, so ``don't`` is
one token), numbers with an optional sign and decimal part, ellipses, and
single punctuation marks. Offsets are character positions in the turn
text. Disfluency fillers are ordinary tokens.
"""

import re
from typing import NamedTuple

from l1lens.schemas.corpus import Dialogue

_TOKEN_RE = re.compile(
    r"(?:(?<![\w.])[+-])?\d+(?:\.\d+)?"
    r"|[^\W_]+(?:['’][^\W_]+)*"
    r"|\.{2,}|…"
    r"|[^\w\s]|_"
)

TERMINATORS = frozenset({".", "!", "?"})

ABBREVIATIONS = frozenset(
    {
        "mr",
        "mrs",
        "ms",
        "dr",
        "prof",
        "sr",
        "jr",
        "st",
        "vs",
        "etc",
        "e.g",
        "i.e",
        "a.m",
        "p.m",
        "u.s",
        "u.k",
    }
)


class Token(NamedTuple):
    text: str
    start: int
    end: int
    lowercase: str


class Sentence(NamedTuple):
    dialogue_id: str
    turn_index: int
    sentence_index: int
    tokens: tuple[Token, ...]
    raw: str

    @property
    def lowered(self) -> list[str]:
        return [token.lowercase for token in self.tokens]


def tokenize(text: str) -> list[Token]:
    return [
        Token(match.group(), match.start(), match.end(), match.group().lower())
        for match in _TOKEN_RE.finditer(text)
    ]


def count_tokens(text: str) -> int:
    return len(_TOKEN_RE.findall(text))


def _abbreviated(text: str, period: Token) -> bool:
    chunk_start = period.start
    while chunk_start > 0 and not text[chunk_start - 1].isspace():
        chunk_start -= 1
    chunk = text[chunk_start : period.start].lower().lstrip("([\"'“‘")
    return chunk in ABBREVIATIONS


def _is_boundary(text: str, tokens: list[Token], index: int) -> bool:
    token = tokens[index]
    if token.text not in TERMINATORS:
        return False
    if index + 1 < len(tokens) and tokens[index + 1].start == token.end:
        return False
    return not (token.text == "." and _abbreviated(text, token))


def split_sentences(text: str) -> list[list[Token]]:
    tokens = tokenize(text)
    sentences = []
    current = []
    for index, token in enumerate(tokens):
        current.append(token)
        if _is_boundary(text, tokens, index):
            sentences.append(current)
            current = []
    if current:
        sentences.append(current)
    return sentences


def segment_text(
    text: str, dialogue_id: str = "", turn_index: int = 0
) -> list[Sentence]:
    return [
        Sentence(
            dialogue_id=dialogue_id,
            turn_index=turn_index,
            sentence_index=index,
            tokens=tuple(tokens),
            raw=text[tokens[0].start : tokens[-1].end],
        )
        for index, tokens in enumerate(split_sentences(text))
    ]


def segment(dialogue: Dialogue) -> list[Sentence]:
    sentences = []
    for turn_index, turn in enumerate(dialogue.turns):
        sentences.extend(segment_text(turn.text, dialogue.id, turn_index))
    return sentences


def dialogue_token_count(dialogue: Dialogue) -> int:
    return sum(count_tokens(turn.text) for turn in dialogue.turns)
