"""L1 knowledge cards.

A card is a sectioned UTF-8 text file::

    [language]
    tha
    [scene]
    One line describing the scene.
    [dialogue]
    l1 line | romanization | English gloss
    [traits]
    ## Trait name
    Description lines.
    - example line
"""

import logging
from pathlib import Path

import pydantic_core
from django.conf import settings

from l1lens.errors import ParseError
from l1lens.schemas.corpus import LanguageCode
from l1lens.schemas.llm import CardLine, L1KnowledgeCard, Trait
from l1lens.services.corpus import parse_language

logger = logging.getLogger("l1lens")

SECTIONS = ("language", "scene", "dialogue", "traits")


def _split_sections(path: Path) -> dict[str, list[tuple[int, str]]]:
    sections: dict[str, list[tuple[int, str]]] = {}
    current = None
    text = path.read_text(encoding="utf-8")
    for number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or (stripped.startswith("#") and current is None):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            current = stripped[1:-1].strip().lower()
            if current not in SECTIONS:
                raise ParseError(
                    f"unknown card section [{current}]", path=path, line=number
                )
            sections.setdefault(current, [])
            continue
        if current is None:
            raise ParseError(
                "text before the first section header", path=path, line=number
            )
        sections[current].append((number, stripped))
    return sections


def _dialogue(path: Path, lines: list[tuple[int, str]]) -> list[CardLine]:
    dialogue = []
    for number, line in lines:
        cells = [cell.strip() for cell in line.split("|")]
        if len(cells) != 3 or not cells[0] or not cells[2]:  # noqa: PLR2004
            raise ParseError(
                "dialogue lines need 'l1 line | romanization | gloss'",
                path=path,
                line=number,
            )
        dialogue.append(
            CardLine(
                l1_line=cells[0],
                romanization=cells[1] or None,
                english_gloss=cells[2],
            )
        )
    return dialogue


def _traits(path: Path, lines: list[tuple[int, str]]) -> list[Trait]:
    traits = []
    name = None
    description: list[str] = []
    examples: list[str] = []

    def close():
        if name is not None:
            traits.append(
                Trait(
                    name=name,
                    description=" ".join(description),
                    examples=examples,
                )
            )

    for number, line in lines:
        if line.startswith("##"):
            close()
            name = line.lstrip("#").strip()
            description, examples = [], []
        elif name is None:
            raise ParseError(
                "trait text before the first '## name' line",
                path=path,
                line=number,
            )
        elif line.startswith("- "):
            examples.append(line[2:].strip())
        else:
            description.append(line)
    close()
    return traits


def load_knowledge_card(path: Path) -> L1KnowledgeCard:
    sections = _split_sections(path)
    language = sections.get("language")
    if not language:
        raise ParseError("card has no [language] section", path=path)
    number, code = language[0]
    scene = " ".join(line for _, line in sections.get("scene", [])) or None
    try:
        card = L1KnowledgeCard(
            l1=parse_language(code, path, number),
            scene=scene,
            example_dialogue=_dialogue(path, sections.get("dialogue", [])),
            trait_analysis=_traits(path, sections.get("traits", [])),
        )
    except pydantic_core.ValidationError as exc:
        raise ParseError(f"invalid knowledge card: {exc}", path=path) from exc
    logger.debug(
        "Loaded %s card: %d dialogue lines, %d traits",
        card.l1.value,
        len(card.example_dialogue),
        len(card.trait_analysis),
    )
    return card


def bundled_card_path(l1: LanguageCode) -> Path:
    return Path(settings.L1LENS["CARD_DIR"]) / f"{l1.value}.txt"
