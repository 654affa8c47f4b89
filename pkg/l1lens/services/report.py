"""Text, CSV and SVG renderings of scores and corpus statistics.

Every renderer is a pure function of its inputs; the same inputs give
byte-identical output.
"""

import csv
import io
from collections.abc import Iterable, Sequence
from html import escape

from django.conf import settings

from l1lens.schemas.annotation import ConstructKind
from l1lens.schemas.corpus import Condition, Corpus, LanguageCode
from l1lens.schemas.metrics import DensityModel, DivergenceResult, RateSample
from l1lens.services.corpus import corpus_stats
from l1lens.services.density import density_grid, fit_density
from l1lens.services.divergence import ESTIMATOR_NOTE

MISSING = "—"
L2_GENERATED = "L2-Generated"
ENGLISH_GENERATED = "English-Generated"
L2_HUMANS = "L2-Humans"
ENGLISH_BASELINE = "English (native)"
LINE_COLORS = {
    L2_GENERATED: "#1f77b4",
    ENGLISH_GENERATED: "#ff7f0e",
    L2_HUMANS: "#2ca02c",
    ENGLISH_BASELINE: "#e377c2",
}
FALLBACK_COLORS = ("#9467bd", "#8c564b", "#7f7f7f", "#bcbd22", "#17becf")

SVG_WIDTH = 640
SVG_HEIGHT = 400
PLOT_LEFT = 60
PLOT_RIGHT = 20
PLOT_TOP = 40
PLOT_BOTTOM = 50


def improvement_tag(d_bi: float, d_mono: float) -> str:
    return "improved" if d_bi < d_mono else "regressed"


def _cells(results: Iterable[DivergenceResult]) -> dict:
    return {
        (r.l1, r.model_name, r.kind, r.condition): r
        for r in results
        if r.is_ok
    }


def _row_keys(results: Sequence[DivergenceResult]) -> list:
    keys = []
    for result in results:
        key = (result.l1, result.model_name)
        if key not in keys:
            keys.append(key)
    order = list(LanguageCode)
    return sorted(keys, key=lambda key: order.index(key[0]))


def _cell_text(cells: dict, l1, model_name, kind, condition) -> str:
    result = cells.get((l1, model_name, kind, condition))
    if result is None:
        return MISSING
    text = f"{result.d:.3f}"
    if condition == Condition.BI:
        mono = cells.get((l1, model_name, kind, Condition.MONO))
        if mono is not None:
            text = f"{text} [{improvement_tag(result.d, mono.d)}]"
    return text


def _divergence_rows(results: Sequence[DivergenceResult]) -> list[list[str]]:
    cells = _cells(results)
    rows = []
    for l1, model_name in _row_keys(results):
        for condition in (Condition.BI, Condition.MONO):
            row = [l1.display_name, model_name or "", f"d_{condition.value}"]
            row.extend(
                _cell_text(cells, l1, model_name, kind, condition)
                for kind in ConstructKind
            )
            rows.append(row)
    return rows


def _markdown(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    lines = [
        "| " + " | ".join(header) + " |",
        "|" + "|".join("---" for _ in header) + "|",
    ]
    lines.extend("| " + " | ".join(row) + " |" for row in rows)
    return "\n".join(lines) + "\n"


def _csv(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def estimator_footer(floor: float | None = None) -> str:
    if floor is None:
        floor = settings.L1LENS["DENSITY_FLOOR"]
    return ESTIMATOR_NOTE.format(floor=floor)


def render_divergence_table(
    results: Sequence[DivergenceResult],
    output_format: str = "markdown",
    floor: float | None = None,
) -> str:
    """One row per (L1, model, condition), one column per construct.

    A bi cell is tagged improved when d_bi < d_mono strictly.
    """
    header = ["L1", "Model", "Condition"]
    header.extend(kind.display_name for kind in ConstructKind)
    rows = _divergence_rows(results)
    if output_format == "csv":
        return _csv(header, rows)
    return _markdown(header, rows) + "\n" + estimator_footer(floor) + "\n"


def render_model_comparison(
    results: Sequence[DivergenceResult], kind: ConstructKind
) -> str:
    """One construct across models: rows (L1, condition), a column each."""
    relevant = [r for r in results if r.kind == kind]
    cells = _cells(relevant)
    models = []
    for result in relevant:
        if result.model_name not in models:
            models.append(result.model_name)
    l1s = sorted(
        {r.l1 for r in relevant}, key=lambda l1: list(LanguageCode).index(l1)
    )
    header = ["L1", "Condition"] + [m or "" for m in models]
    rows = []
    for l1 in l1s:
        for condition in (Condition.BI, Condition.MONO):
            row = [l1.display_name, f"d_{condition.value}"]
            row.extend(
                _cell_text(cells, l1, model, kind, condition)
                for model in models
            )
            rows.append(row)
    return f"### {kind.display_name}\n\n" + _markdown(header, rows)


def condition_density_models(
    human: RateSample,
    bi: RateSample,
    mono: RateSample,
    floor: float | None = None,
) -> list[tuple[str, DensityModel]]:
    """Fitted densities in legend order; samples under 2 values are skipped."""
    labeled = []
    for label, sample in (
        (L2_GENERATED, bi),
        (ENGLISH_GENERATED, mono),
        (L2_HUMANS, human),
    ):
        if len(sample) >= 2:  # noqa: PLR2004
            labeled.append((label, fit_density(sample.values, floor)))
    return labeled


def baseline_density_models(
    samples: Sequence[RateSample],
    baseline: RateSample,
    floor: float | None = None,
) -> list[tuple[str, DensityModel]]:
    """Human densities labeled by L1, then the native-English baseline.

    Samples under 2 values are skipped, as for the condition curves.
    """
    labeled = [
        (sample.slice.l1.display_name, sample)
        for sample in samples
        if sample.slice.l1 is not None
    ]
    labeled.append((ENGLISH_BASELINE, baseline))
    return [
        (label, fit_density(sample.values, floor))
        for label, sample in labeled
        if len(sample) >= 2  # noqa: PLR2004
    ]


def _color(label: str, index: int) -> str:
    return LINE_COLORS.get(
        label, FALLBACK_COLORS[index % len(FALLBACK_COLORS)]
    )


def render_density_svg(
    models: Sequence[tuple[str, DensityModel]],
    title: str,
    points: int | None = None,
) -> str:
    grid, densities = density_grid([model for _, model in models], points)
    plot_w = SVG_WIDTH - PLOT_LEFT - PLOT_RIGHT
    plot_h = SVG_HEIGHT - PLOT_TOP - PLOT_BOTTOM
    x_low, x_high = float(grid[0]), float(grid[-1])
    y_high = max(float(values.max()) for values in densities) or 1.0
    base = PLOT_TOP + plot_h

    def sx(x: float) -> float:
        return PLOT_LEFT + (x - x_low) / (x_high - x_low) * plot_w

    def sy(y: float) -> float:
        return base - y / y_high * plot_h

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{SVG_WIDTH}" height="{SVG_HEIGHT}" '
        f'viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">',
        '<rect width="100%" height="100%" fill="#ffffff"/>',
        f'<text x="{PLOT_LEFT}" y="24" font-family="Arial" font-size="16">'
        f"{escape(title)}</text>",
        f'<line x1="{PLOT_LEFT}" y1="{base}" x2="{PLOT_LEFT + plot_w}" '
        f'y2="{base}" stroke="#333333"/>',
        f'<line x1="{PLOT_LEFT}" y1="{PLOT_TOP}" x2="{PLOT_LEFT}" '
        f'y2="{base}" stroke="#333333"/>',
        f'<text x="{PLOT_LEFT}" y="{base + 20}" font-family="Arial" '
        f'font-size="11">{x_low:.2f}</text>',
        f'<text x="{PLOT_LEFT + plot_w}" y="{base + 20}" '
        f'text-anchor="end" font-family="Arial" font-size="11">'
        f"{x_high:.2f}</text>",
        f'<text x="{PLOT_LEFT + plot_w / 2:.1f}" y="{base + 40}" '
        f'text-anchor="middle" font-family="Arial" font-size="12">'
        f"occurrences per 100 tokens</text>",
    ]
    for index, ((label, _), values) in enumerate(
        zip(models, densities, strict=True)
    ):
        coords = " ".join(
            f"{sx(float(x)):.2f},{sy(float(y)):.2f}"
            for x, y in zip(grid, values, strict=True)
        )
        parts.append(
            f'<polyline fill="none" stroke="{_color(label, index)}" '
            f'stroke-width="2" points="{coords}"/>'
        )
    for index, (label, _) in enumerate(models):
        y = PLOT_TOP + 10 + index * 18
        x = PLOT_LEFT + plot_w - 150
        parts.append(
            f'<g class="legend"><rect x="{x}" y="{y - 9}" width="12" '
            f'height="12" fill="{_color(label, index)}"/>'
            f'<text x="{x + 18}" y="{y + 2}" font-family="Arial" '
            f'font-size="12">{escape(label)}</text></g>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render_density_csv(
    models: Sequence[tuple[str, DensityModel]], points: int | None = None
) -> str:
    grid, densities = density_grid([model for _, model in models], points)
    rows = [
        [label, f"{float(x):.6f}", f"{float(y):.6e}"]
        for (label, _), values in zip(models, densities, strict=True)
        for x, y in zip(grid, values, strict=True)
    ]
    return _csv(["label", "x", "density"], rows)


def format_tokens(tokens: int) -> str:
    if tokens < 1000:  # noqa: PLR2004
        return f"{tokens:,}"
    return f"{round(tokens / 1000):,}K"


def render_corpus_stats(corpora: Sequence[tuple[str, Corpus]]) -> str:
    rows = []
    for label, corpus in corpora:
        stats = corpus_stats(corpus)
        participants = (
            "NA" if stats.participants is None else f"{stats.participants:,}"
        )
        rows.append(
            [
                label,
                f"{stats.dialogues:,}",
                format_tokens(stats.tokens),
                participants,
            ]
        )
    return _markdown(["Dataset", "Dialogues", "Tokens", "Participants"], rows)
