"""Synthetic rate samples and corpora with known distributions.

Used as oracles: the estimator is checked against closed-form Gaussian
divergences, and the full profile-and-score pipeline against corpora
whose construct counts are planted.
"""

import itertools
import logging
import math
from collections.abc import Mapping

import numpy as np

from l1lens.errors import SynthError
from l1lens.schemas.annotation import (
    Annotation,
    ConstructKind,
    SentenceRef,
)
from l1lens.schemas.corpus import (
    Condition,
    Corpus,
    CorpusSlice,
    Dialogue,
    LanguageCode,
    Origin,
    SourceTag,
    Speaker,
    Turn,
)
from l1lens.schemas.metrics import RateSample
from l1lens.schemas.synth import Distribution, OracleCase, SyntheticSpec
from l1lens.services.annotate import AnnotationStore
from l1lens.services.corpus import merge_corpora
from l1lens.services.divergence import divergence, score_conditions
from l1lens.services.profile import collect_rates, profile_corpus
from l1lens.services.report import render_divergence_table

logger = logging.getLogger("l1lens")

FILLER = "la"
MAX_TURN_TOKENS = 100
ORACLE_MODEL = "synthetic"
PLANT_RATIONALE = "planted occurrence"


def draw(spec: SyntheticSpec) -> np.ndarray:
    """``spec.n`` raw draws, negative values included."""
    rng = np.random.default_rng(spec.seed)
    match spec.distribution:
        case Distribution.NORMAL:
            values = rng.normal(spec.mu, spec.sigma, spec.n)
        case Distribution.LOGNORMAL:
            values = rng.lognormal(spec.mu, spec.sigma, spec.n)
        case Distribution.MIXTURE:
            first = rng.random(spec.n) < spec.weight
            values = np.where(
                first,
                rng.normal(spec.mu, spec.sigma, spec.n),
                rng.normal(spec.mu2, spec.sigma2, spec.n),
            )
        case Distribution.CONSTANT:
            values = np.full(spec.n, float(spec.mu))
    return values


def sample_rates(
    spec: SyntheticSpec,
    kind: ConstructKind = ConstructKind.MODAL_EXPRESSION,
    corpus_slice: CorpusSlice | None = None,
) -> RateSample:
    """Draw ``spec.n`` rates; negative draws are truncated to 0."""
    values = draw(spec)
    truncated = int(np.count_nonzero(values < 0))
    return RateSample(
        kind=kind,
        slice=corpus_slice or CorpusSlice(),
        values=np.maximum(values, 0.0).tolist(),
        truncated=truncated,
    )


def analytic_kl_normal(
    mu1: float, sigma1: float, mu2: float, sigma2: float
) -> float:
    """KL(N(mu1, sigma1^2) || N(mu2, sigma2^2)) in nats."""
    if sigma1 <= 0 or sigma2 <= 0:
        raise SynthError("standard deviations must be positive")
    return (
        math.log(sigma2 / sigma1)
        + (sigma1**2 + (mu1 - mu2) ** 2) / (2 * sigma2**2)
        - 0.5
    )


def plant_word(kind: ConstructKind) -> str:
    return kind.value.replace("_", "")


_PLANTS = {plant_word(kind): kind for kind in ConstructKind}


def _turn_sizes(tokens: int) -> list[int]:
    turns = max(2, math.ceil(tokens / MAX_TURN_TOKENS))
    base, extra = divmod(tokens, turns)
    return [base + 1 if i < extra else base for i in range(turns)]


def _plant_dialogue(
    dialogue_id: str,
    counts: dict[ConstructKind, int],
    tokens: int,
) -> tuple[list[Turn], list[Annotation]]:
    words = [FILLER] * tokens
    planted = [kind for kind in ConstructKind for _ in range(counts[kind])]
    if planted:
        positions = np.arange(len(planted)) * tokens // len(planted)
        for position, kind in zip(positions, planted, strict=True):
            words[int(position)] = plant_word(kind)

    turns = []
    annotations = []
    offset = 0
    for turn_index, size in enumerate(_turn_sizes(tokens)):
        chunk = words[offset : offset + size]
        text = " ".join(chunk)
        speaker = (
            Speaker.NATIVE_SPEAKER if turn_index % 2 else Speaker.L2_SPEAKER
        )
        turns.append(Turn(speaker=speaker, text=text))
        for index, word in enumerate(chunk):
            if word == FILLER:
                continue
            annotations.append(
                Annotation(
                    kind=_PLANTS[word],
                    sentence_ref=SentenceRef(
                        dialogue_id=dialogue_id,
                        turn_index=turn_index,
                        sentence_index=0,
                    ),
                    spans=[(index, index + 1)],
                    tokens=[word],
                    sentence=text,
                    rationale=PLANT_RATIONALE,
                )
            )
        offset += size
    return turns, annotations


def build_synthetic_corpus(
    l1: LanguageCode,
    construct_rates: Mapping[ConstructKind, SyntheticSpec],
    dialogues: int,
    tokens_per_dialogue: int,
    source: SourceTag | None = None,
    condition: Condition | None = None,
    id_prefix: str = "synth",
) -> tuple[Corpus, list[Annotation]]:
    """Filler dialogues with planted construct occurrences.

    Each dialogue's count for a construct is the sampled rate scaled to
    ``tokens_per_dialogue`` and rounded to the nearest integer, so
    profiling the corpus recovers exactly those counts.
    """
    source = source or SourceTag.human()
    if condition is None:
        condition = (
            Condition.NOT_APPLICABLE
            if source.origin == Origin.HUMAN
            else Condition.BI
        )
    if dialogues < 1:
        raise SynthError("a synthetic corpus needs at least one dialogue")
    if tokens_per_dialogue < 2:  # noqa: PLR2004
        raise SynthError("dialogues need at least 2 tokens")

    counts_by_kind = {}
    for kind, spec in construct_rates.items():
        sample = sample_rates(spec.model_copy(update={"n": dialogues}), kind)
        counts_by_kind[kind] = [
            round(rate * tokens_per_dialogue / 100) for rate in sample.values
        ]

    corpus_dialogues = []
    annotations = []
    for index in range(dialogues):
        counts = {
            kind: counts_by_kind[kind][index] if kind in counts_by_kind else 0
            for kind in ConstructKind
        }
        if sum(counts.values()) > tokens_per_dialogue:
            raise SynthError(
                f"{sum(counts.values())} planted occurrences do not fit in "
                f"{tokens_per_dialogue} tokens"
            )
        dialogue_id = f"{l1.value}_{id_prefix}{index:04d}"
        turns, planted = _plant_dialogue(
            dialogue_id, counts, tokens_per_dialogue
        )
        corpus_dialogues.append(
            Dialogue(
                id=dialogue_id,
                l1=l1,
                source=source,
                condition=condition,
                turns=turns,
            )
        )
        annotations.extend(planted)
    logger.debug(
        "Built %d synthetic dialogues with %d planted occurrences",
        dialogues,
        len(annotations),
    )
    return Corpus(dialogues=corpus_dialogues), annotations


def _oracle_sample(mu: float, sigma: float, n: int, seed: int) -> RateSample:
    # estimator checks use raw draws, negative values included
    values = draw(SyntheticSpec(mu=mu, sigma=sigma, n=n, seed=seed))
    return RateSample(
        kind=ConstructKind.MODAL_EXPRESSION,
        slice=CorpusSlice(l1=LanguageCode.ENGLISH),
        values=values.tolist(),
    )


def _tolerance_case(
    case: str, estimate: float, expected: float, tolerance: float
) -> OracleCase:
    error = abs(estimate - expected)
    return OracleCase(
        case=case,
        estimate=estimate,
        expected=expected,
        tolerance=tolerance,
        passed=error <= tolerance,
        detail=f"|d - expected| = {error:.4f}",
    )


def run_gaussian_oracle(seed: int, n: int = 2000) -> list[OracleCase]:
    """Estimated d against closed-form KL for Gaussian pairs."""
    split = _oracle_sample(0.0, 1.0, 1000, seed)
    halves = [
        split.model_copy(update={"values": part})
        for part in (split.values[:500], split.values[500:])
    ]
    cases = [
        _tolerance_case(
            "split-sample n=500", divergence(*halves).d, 0.0, 0.05
        )
    ]

    human = _oracle_sample(0.0, 1.0, n, seed)
    for label, mu, sigma in (
        ("mean shift 0.5", 0.5, 1.0),
        ("mean shift 1", 1.0, 1.0),
        ("scale 12.2", 0.0, 12.2),
    ):
        model = _oracle_sample(mu, sigma, n, seed + 1)
        cases.append(
            _tolerance_case(
                label,
                divergence(human, model).d,
                analytic_kl_normal(0.0, 1.0, mu, sigma),
                0.1,
            )
        )

    shifts = (0.0, 0.5, 1.0, 2.0)
    estimates = [
        divergence(human, _oracle_sample(mu, 1.0, n, seed + 1)).d
        for mu in shifts
    ]
    cases.append(
        OracleCase(
            case="nondecreasing in |mu|",
            estimate=estimates[-1],
            expected=analytic_kl_normal(0.0, 1.0, shifts[-1], 1.0),
            tolerance=0.0,
            passed=all(a <= b for a, b in itertools.pairwise(estimates)),
            detail=" <= ".join(f"{d:.3f}" for d in estimates),
        )
    )
    return cases


def run_pipeline_oracle(
    seed: int, n: int = 500, tokens_per_dialogue: int = 1000
) -> list[OracleCase]:
    """Plant N(6,1) human, N(6.2,1) bi and N(9,1) mono modal rates.

    The scored cell must come out with d_bi < d_mono and be marked
    improved in the rendered table.
    """
    kind = ConstructKind.MODAL_EXPRESSION
    l1 = LanguageCode.THAI
    model = SourceTag.model(ORACLE_MODEL)
    plans = [
        ("human", 6.0, seed, SourceTag.human(), None),
        ("bi", 6.2, seed + 1, model, Condition.BI),
        ("mono", 9.0, seed + 2, model, Condition.MONO),
        ("self", 6.0, seed + 3, SourceTag.model("self"), Condition.BI),
    ]
    corpora = []
    annotations = []
    expected_counts = []
    for prefix, mu, plan_seed, source, condition in plans:
        spec = SyntheticSpec(mu=mu, sigma=1.0, n=n, seed=plan_seed)
        corpus, planted = build_synthetic_corpus(
            l1,
            {kind: spec},
            n,
            tokens_per_dialogue,
            source=source,
            condition=condition,
            id_prefix=prefix,
        )
        corpora.append(corpus)
        annotations.extend(planted)
        expected_counts.extend(
            round(rate * tokens_per_dialogue / 100)
            for rate in sample_rates(spec).values
        )
    corpus = merge_corpora(corpora)
    store = AnnotationStore(annotations, (d.id for d in corpus.dialogues))

    recovered = [
        rate.count
        for rate in profile_corpus(corpus, store)
        if rate.kind == kind
    ]
    mismatched = sum(
        a != b for a, b in zip(recovered, expected_counts, strict=True)
    )
    cases = [
        OracleCase(
            case="planted counts recovered",
            estimate=float(mismatched),
            expected=0.0,
            tolerance=0.0,
            passed=mismatched == 0,
            detail=f"{len(recovered) - mismatched}/{len(recovered)} match",
        )
    ]

    human = collect_rates(
        corpus, store, kind, CorpusSlice(l1=l1, origin=Origin.HUMAN)
    )
    twin = collect_rates(corpus, store, kind, CorpusSlice(model_name="self"))
    cases.append(
        _tolerance_case(
            "identical specs, different seeds",
            divergence(human, twin).d,
            0.0,
            0.05,
        )
    )

    results = score_conditions(corpus, store, l1, ORACLE_MODEL, kinds=[kind])
    d_bi, d_mono = (result.d for result in results)
    table = render_divergence_table(results)
    cases.append(
        OracleCase(
            case="d_bi < d_mono",
            estimate=d_bi,
            expected=d_mono,
            tolerance=0.0,
            passed=d_bi < d_mono,
            detail=f"d_bi = {d_bi:.3f}, d_mono = {d_mono:.3f}",
        )
    )
    cases.append(
        OracleCase(
            case="cell marked improved",
            estimate=d_bi,
            expected=d_mono,
            tolerance=0.0,
            passed=f"{d_bi:.3f} [improved]" in table,
            detail=next(
                (line for line in table.splitlines() if "[" in line), ""
            ),
        )
    )
    return cases
