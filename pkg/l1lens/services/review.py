"""Manual validation of annotations: sampling, judgment import, accuracy."""

import csv
import io
import logging
from collections import Counter, defaultdict
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np
import pydantic_core

from l1lens.errors import (
    MalformedRecordError,
    MissingJudgmentsError,
    ParseError,
    ReviewError,
)
from l1lens.schemas.annotation import Annotation, ConstructKind
from l1lens.schemas.review import (
    AccuracyDelta,
    AccuracyReport,
    ConstructAccuracy,
    Judgment,
    ReviewBatch,
    ReviewItem,
    StoreAgreement,
    Verdict,
)
from l1lens.services.annotate import to_five_field_record

logger = logging.getLogger("l1lens")

REVIEW_COLUMNS = (
    "annotation_ref",
    "construct",
    "sentence",
    "tokens",
    "rationale",
    "correctness",
    "verdict",
    "reviewer",
)


def review_item(annotation: Annotation) -> ReviewItem:
    record = to_five_field_record(annotation)
    return ReviewItem(
        annotation_ref=annotation.key,
        kind=annotation.kind,
        sentence=record["annotation sentence"],
        tokens=record["annotation token"],
        rationale=record["rationale"],
        correctness=record["grammar correctness"],
    )


def _stratified_quotas(
    groups: dict[ConstructKind, list[int]], target: int
) -> dict[ConstructKind, int]:
    quotas = dict.fromkeys(groups, 0)
    remaining = target
    while remaining:
        for kind, members in groups.items():
            if remaining and quotas[kind] < len(members):
                quotas[kind] += 1
                remaining -= 1
    return quotas


def sample_for_review(
    annotations: Iterable[Annotation],
    fraction: float,
    seed: int,
    stratified: bool = True,
    batch_id: str | None = None,
) -> ReviewBatch:
    """Sample round(fraction * N) annotations without replacement.

    Stratified sampling shares the sample equally across constructs,
    capped at each construct's size, the remainder going round-robin in
    construct order.
    """
    if not 0 < fraction <= 1:
        raise ReviewError(f"fraction must be in (0, 1], got {fraction}")
    population = {}
    for annotation in annotations:
        population.setdefault(annotation.key, annotation)
    items = list(population.values())
    if not items:
        raise ReviewError("no annotations to sample from")
    target = round(fraction * len(items))
    rng = np.random.default_rng(seed)

    if stratified:
        groups: dict[ConstructKind, list[int]] = {}
        for kind in ConstructKind:
            members = [i for i, a in enumerate(items) if a.kind == kind]
            if members:
                groups[kind] = [int(i) for i in rng.permutation(members)]
        quotas = _stratified_quotas(groups, target)
        chosen = [
            index
            for kind, members in groups.items()
            for index in members[: quotas[kind]]
        ]
    else:
        chosen = [
            int(i) for i in rng.choice(len(items), target, replace=False)
        ]

    batch = ReviewBatch(
        batch_id=batch_id or f"review-s{seed}-n{len(items)}",
        sampled=[review_item(items[i]) for i in sorted(chosen)],
        fraction=fraction,
        seed=seed,
        population_size=len(items),
        stratified=stratified,
    )
    logger.info(
        "Sampled %d of %d annotations for review", len(chosen), len(items)
    )
    return batch


def _resolve(verdicts: list[Verdict]) -> bool:
    votes = Counter(verdicts)
    return votes[Verdict.CORRECT] > votes[Verdict.INCORRECT]


def compute_accuracy(
    batch: ReviewBatch, judgments: Iterable[Judgment]
) -> AccuracyReport:
    """Majority verdict per item; a tied vote counts as incorrect."""
    sampled = set(batch.refs)
    verdicts: dict[str, list[Verdict]] = defaultdict(list)
    seen = set()
    for judgment in judgments:
        pair = (judgment.annotation_ref, judgment.reviewer)
        if pair in seen:
            raise ReviewError(
                f"duplicate judgment by {judgment.reviewer} "
                f"for {judgment.annotation_ref}"
            )
        seen.add(pair)
        if judgment.annotation_ref not in sampled:
            logger.warning(
                "Ignoring judgment for unsampled %s", judgment.annotation_ref
            )
            continue
        verdicts[judgment.annotation_ref].append(judgment.verdict)

    missing = [ref for ref in batch.refs if ref not in verdicts]
    if missing:
        raise MissingJudgmentsError(missing)

    correct = Counter()
    total = Counter()
    for item in batch.sampled:
        total[item.kind] += 1
        if _resolve(verdicts[item.annotation_ref]):
            correct[item.kind] += 1
    return AccuracyReport(
        correct=sum(correct.values()),
        total=sum(total.values()),
        per_construct=[
            ConstructAccuracy(
                kind=kind, correct=correct[kind], total=total[kind]
            )
            for kind in ConstructKind
            if total[kind]
        ],
    )


def export_review_csv(batch: ReviewBatch) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(REVIEW_COLUMNS)
    for item in batch.sampled:
        writer.writerow(
            [
                item.annotation_ref,
                item.kind.value,
                item.sentence,
                item.tokens,
                item.rationale,
                item.correctness,
                "",
                "",
            ]
        )
    return buffer.getvalue()


def import_judgments_csv(
    text: str, path: Path | None = None
) -> list[Judgment]:
    """Rows with a blank verdict are skipped; anything else is strict."""
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None or tuple(h.strip() for h in header) != REVIEW_COLUMNS:
        raise ParseError(
            f"expected header {','.join(REVIEW_COLUMNS)}", path=path, line=1
        )
    judgments = []
    for number, row in enumerate(rows, start=2):
        if not any(cell.strip() for cell in row):
            continue
        if len(row) != len(REVIEW_COLUMNS):
            raise ParseError(
                f"expected {len(REVIEW_COLUMNS)} columns, got {len(row)}",
                path=path,
                line=number,
            )
        cells = dict(zip(REVIEW_COLUMNS, row, strict=True))
        verdict = cells["verdict"].strip().lower()
        if not verdict:
            continue
        if verdict not in {v.value for v in Verdict}:
            raise ParseError(
                f"verdict must be correct or incorrect, got {verdict!r}",
                path=path,
                line=number,
            )
        reviewer = cells["reviewer"].strip()
        if not reviewer:
            raise ParseError("reviewer is empty", path=path, line=number)
        judgments.append(
            Judgment(
                annotation_ref=cells["annotation_ref"],
                verdict=Verdict(verdict),
                reviewer=reviewer,
            )
        )
    return judgments


def compare_accuracy(
    before: AccuracyReport, after: AccuracyReport
) -> list[AccuracyDelta]:
    first = {c.kind: c for c in before.per_construct}
    second = {c.kind: c for c in after.per_construct}
    return [
        AccuracyDelta(
            kind=kind,
            before=first[kind].accuracy if kind in first else None,
            after=second[kind].accuracy if kind in second else None,
        )
        for kind in ConstructKind
    ]


def compare_stores(
    first: Sequence[Annotation], second: Sequence[Annotation]
) -> list[StoreAgreement]:
    """Per construct, how many annotation keys both stores share."""
    agreement = []
    for kind in ConstructKind:
        a = {x.key for x in first if x.kind == kind}
        b = {x.key for x in second if x.kind == kind}
        agreement.append(
            StoreAgreement(
                kind=kind,
                both=len(a & b),
                only_first=len(a - b),
                only_second=len(b - a),
            )
        )
    return agreement


def render_accuracy(report: AccuracyReport) -> str:
    lines = [f"accuracy: {report.percent} ({report.correct}/{report.total})"]
    lines.extend(
        f"  {c.kind.display_name}: {100 * c.accuracy:.1f}% "
        f"({c.correct}/{c.total})"
        for c in report.per_construct
    )
    return "\n".join(lines) + "\n"


def render_comparison(
    deltas: Sequence[AccuracyDelta], agreement: Sequence[StoreAgreement] = ()
) -> str:
    def percent(value: float | None) -> str:
        return "—" if value is None else f"{100 * value:.1f}%"

    lines = []
    for delta in deltas:
        change = (
            "—" if delta.delta is None else f"{100 * delta.delta:+.1f} pts"
        )
        lines.append(
            f"{delta.kind.display_name}: {percent(delta.before)} -> "
            f"{percent(delta.after)} ({change})"
        )
    lines.extend(
        f"{a.kind.display_name}: both {a.both}, "
        f"first only {a.only_first}, second only {a.only_second}"
        for a in agreement
    )
    return "\n".join(lines) + "\n"


def save_batch(batch: ReviewBatch, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(batch.model_dump_json(indent=2) + "\n", encoding="utf-8")


def load_batch(path: Path) -> ReviewBatch:
    try:
        return ReviewBatch.model_validate_json(path.read_bytes())
    except pydantic_core.ValidationError as exc:
        raise MalformedRecordError(
            f"invalid review batch: {exc.errors()[0]['msg']}", path=path
        ) from None
