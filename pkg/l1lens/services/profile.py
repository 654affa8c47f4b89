import logging
from collections import Counter

from l1lens.errors import MetricError, ZeroTokenDialogueError
from l1lens.schemas.annotation import Annotation, ConstructKind
from l1lens.schemas.corpus import Corpus, CorpusSlice, Dialogue
from l1lens.schemas.metrics import ConstructRate, RateSample
from l1lens.services.annotate import AnnotationStore
from l1lens.services.segment import dialogue_token_count

logger = logging.getLogger("l1lens")


def profile_dialogue(
    dialogue: Dialogue, annotations: list[Annotation]
) -> list[ConstructRate]:
    """Occurrences of each construct per 100 tokens, in construct order."""
    foreign = {
        a.sentence_ref.dialogue_id
        for a in annotations
        if a.sentence_ref.dialogue_id != dialogue.id
    }
    if foreign:
        raise MetricError(
            f"annotations for {', '.join(sorted(foreign))} "
            f"passed with dialogue {dialogue.id}"
        )
    tokens = dialogue_token_count(dialogue)
    if tokens == 0:
        raise ZeroTokenDialogueError(f"dialogue {dialogue.id} has no tokens")
    counts = Counter(a.kind for a in annotations)
    return [
        ConstructRate(
            dialogue_id=dialogue.id,
            kind=kind,
            count=counts[kind],
            tokens=tokens,
            rate=100 * counts[kind] / tokens,
        )
        for kind in ConstructKind
    ]


def profile_corpus(
    corpus: Corpus, store: AnnotationStore
) -> list[ConstructRate]:
    store.require(d.id for d in corpus.dialogues)
    rates = []
    for dialogue in corpus.dialogues:
        annotations = store.for_dialogue(dialogue.id)
        rates.extend(profile_dialogue(dialogue, annotations))
    return rates


def collect_rates(
    corpus: Corpus,
    store: AnnotationStore,
    kind: ConstructKind,
    corpus_slice: CorpusSlice,
) -> RateSample:
    dialogues = [d for d in corpus.dialogues if corpus_slice.matches(d)]
    store.require(d.id for d in dialogues)
    values = []
    for dialogue in dialogues:
        rates = profile_dialogue(dialogue, store.for_dialogue(dialogue.id))
        values.append(rates[kind.order].rate)
    logger.debug(
        "%s %s: %d rates", corpus_slice.label(), kind.value, len(values)
    )
    return RateSample(kind=kind, slice=corpus_slice, values=values)
