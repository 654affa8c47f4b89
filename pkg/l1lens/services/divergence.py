"""Log-loss divergence between human and model rate distributions.

d = CE - H, in nats. CE scores every human rate under a density fitted
on the model rates; H scores every human rate under a leave-one-out
density fitted on the other human rates. Smaller is better.
"""

import csv
import io
import logging
from collections.abc import Iterable

import numpy as np
from django.conf import settings

from l1lens.errors import MetricError, ParseError
from l1lens.schemas.annotation import ConstructKind
from l1lens.schemas.corpus import (
    Condition,
    Corpus,
    CorpusSlice,
    LanguageCode,
    Origin,
)
from l1lens.schemas.metrics import CellStatus, DivergenceResult, RateSample
from l1lens.services.annotate import AnnotationStore
from l1lens.services.density import (
    fit_density,
    leave_one_out_log_density,
    log_density,
    silverman_bandwidth,
)
from l1lens.services.profile import collect_rates

logger = logging.getLogger("l1lens")

ESTIMATOR_NOTE = (
    "d = CE - H in nats: CE scores human rates under a Gaussian KDE of the "
    "model rates, H under a leave-one-out KDE of the human rates "
    "(Silverman bandwidth, density floor {floor:g}). Rates are occurrences "
    "per 100 tokens; smaller d means closer to the human distribution."
)
RESULT_COLUMNS = (
    "l1",
    "construct",
    "condition",
    "model",
    "status",
    "d",
    "n_human",
    "n_model",
    "bandwidth_human",
    "bandwidth_model",
)
CONDITIONS = (Condition.BI, Condition.MONO)


def _result_identity(human: RateSample, model: RateSample):
    if human.kind != model.kind:
        raise MetricError(
            f"construct mismatch: {human.kind.value} vs {model.kind.value}"
        )
    l1 = model.slice.l1 or human.slice.l1
    if l1 is None:
        raise MetricError("neither sample names an L1")
    return {
        "l1": l1,
        "kind": human.kind,
        "condition": model.slice.condition or Condition.NOT_APPLICABLE,
        "model_name": model.slice.model_name,
    }


def divergence(
    human: RateSample, model: RateSample, floor: float | None = None
) -> DivergenceResult:
    identity = _result_identity(human, model)
    if len(human) < 2 or len(model) < 2:  # noqa: PLR2004
        return DivergenceResult(
            **identity,
            status=CellStatus.INSUFFICIENT_DATA,
            n_human=len(human),
            n_model=len(model),
        )
    if floor is None:
        floor = float(settings.L1LENS["DENSITY_FLOOR"])
    # sorted inputs keep the floating-point sums order independent
    human_values = np.sort(np.asarray(human.values, dtype=float))
    model_density = fit_density(model.values, floor)
    bandwidth_human = silverman_bandwidth(human_values)

    cross = -float(np.mean(log_density(model_density, human_values)))
    self_term = -float(
        np.mean(
            leave_one_out_log_density(human_values, bandwidth_human, floor)
        )
    )
    return DivergenceResult(
        **identity,
        d=cross - self_term,
        n_human=len(human),
        n_model=len(model),
        bandwidth_human=bandwidth_human,
        bandwidth_model=model_density.bandwidth,
    )


def score_conditions(
    corpus: Corpus,
    store: AnnotationStore,
    l1: LanguageCode,
    model_name: str,
    floor: float | None = None,
    kinds: Iterable[ConstructKind] = tuple(ConstructKind),
) -> list[DivergenceResult]:
    """d_bi and d_mono for every construct, ordered (construct, condition)."""
    human_slice = CorpusSlice(l1=l1, origin=Origin.HUMAN)
    results = []
    for kind in kinds:
        human = collect_rates(corpus, store, kind, human_slice)
        for condition in CONDITIONS:
            model_slice = CorpusSlice(
                l1=l1,
                origin=Origin.MODEL,
                model_name=model_name,
                condition=condition,
            )
            model = collect_rates(corpus, store, kind, model_slice)
            results.append(divergence(human, model, floor))
    insufficient = sum(not r.is_ok for r in results)
    logger.info(
        "Scored %s against %s: %d cells, %d with insufficient data",
        model_name,
        l1.value,
        len(results),
        insufficient,
    )
    return results


def score_models(
    corpus: Corpus,
    store: AnnotationStore,
    l1s: Iterable[LanguageCode],
    model_names: Iterable[str],
    floor: float | None = None,
) -> list[DivergenceResult]:
    model_names = list(model_names)
    results = []
    for l1 in l1s:
        for model_name in model_names:
            results.extend(
                score_conditions(corpus, store, l1, model_name, floor)
            )
    return results


def _fixed(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def results_to_csv(results: Iterable[DivergenceResult]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for result in results:
        writer.writerow(
            [
                result.l1.value,
                result.kind.value,
                result.condition.value,
                result.model_name or "",
                result.status.value,
                _fixed(result.d),
                result.n_human,
                result.n_model,
                _fixed(result.bandwidth_human),
                _fixed(result.bandwidth_model),
            ]
        )
    return buffer.getvalue()


def _optional_float(text: str) -> float | None:
    return float(text) if text.strip() else None


def results_from_csv(text: str, path=None) -> list[DivergenceResult]:
    rows = csv.reader(io.StringIO(text))
    header = next(rows, None)
    if header is None or tuple(header) != RESULT_COLUMNS:
        raise ParseError(
            f"expected header {','.join(RESULT_COLUMNS)}", path=path, line=1
        )
    results = []
    for number, row in enumerate(rows, start=2):
        if not row:
            continue
        try:
            cells = dict(zip(RESULT_COLUMNS, row, strict=True))
            results.append(
                DivergenceResult(
                    l1=cells["l1"],
                    kind=cells["construct"],
                    condition=cells["condition"],
                    model_name=cells["model"] or None,
                    status=cells["status"],
                    d=_optional_float(cells["d"]),
                    n_human=int(cells["n_human"]),
                    n_model=int(cells["n_model"]),
                    bandwidth_human=_optional_float(cells["bandwidth_human"]),
                    bandwidth_model=_optional_float(cells["bandwidth_model"]),
                )
            )
        except ValueError as exc:
            raise ParseError(str(exc), path=path, line=number) from None
    return results
