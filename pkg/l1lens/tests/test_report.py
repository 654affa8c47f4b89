import numpy as np
from django.test import SimpleTestCase

from l1lens.schemas.annotation import ConstructKind
from l1lens.schemas.corpus import (
    Condition,
    Corpus,
    CorpusSlice,
    LanguageCode,
)
from l1lens.schemas.metrics import CellStatus, DivergenceResult, RateSample
from l1lens.services.report import (
    ENGLISH_BASELINE,
    LINE_COLORS,
    MISSING,
    baseline_density_models,
    condition_density_models,
    format_tokens,
    improvement_tag,
    render_corpus_stats,
    render_density_csv,
    render_density_svg,
    render_divergence_table,
    render_model_comparison,
)

from .utils import human_dialogue, model_dialogue

THAI = LanguageCode.THAI
MODAL = ConstructKind.MODAL_EXPRESSION


def result(kind, condition, d, model_name="gpt-4o", l1=THAI):
    if d is None:
        return DivergenceResult(
            l1=l1,
            kind=kind,
            condition=condition,
            model_name=model_name,
            status=CellStatus.INSUFFICIENT_DATA,
            n_human=10,
            n_model=0,
        )
    return DivergenceResult(
        l1=l1,
        kind=kind,
        condition=condition,
        model_name=model_name,
        d=d,
        n_human=10,
        n_model=10,
    )


def rates(values, l1=None):
    return RateSample(kind=MODAL, slice=CorpusSlice(l1=l1), values=values)


class TestImprovementTag(SimpleTestCase):
    def test_tags(self):
        self.assertEqual(improvement_tag(0.086, 0.12), "improved")
        self.assertEqual(improvement_tag(0.2, 0.12), "regressed")
        # Test equality is not an improvement
        self.assertEqual(improvement_tag(0.12, 0.12), "regressed")


class TestDivergenceTable(SimpleTestCase):
    def setUp(self):
        self.results = [
            result(MODAL, Condition.BI, 0.0857),
            result(MODAL, Condition.MONO, 0.12),
            result(ConstructKind.SPEECH_ACT, Condition.BI, 0.3),
            result(ConstructKind.SPEECH_ACT, Condition.MONO, 0.25),
            result(ConstructKind.REFERENCE_WORD, Condition.BI, 0.1),
            result(ConstructKind.REFERENCE_WORD, Condition.MONO, None),
        ]

    def test_markdown(self):
        table = render_divergence_table(self.results, floor=1e-12)
        lines = table.splitlines()
        self.assertEqual(
            lines[0],
            "| L1 | Model | Condition | Number Agreement | Tense Agreement "
            "| Subject-Verb Agreement | Modal Verbs and Expressions "
            "| Quantifiers and Numerals | Noun-Verb Collocations "
            "| Reference Word | Speech Acts |",
        )
        bi_row = lines[2].split(" | ")
        self.assertEqual(bi_row[:3], ["| Thai", "gpt-4o", "d_bi"])
        self.assertEqual(bi_row[3], MISSING)
        self.assertEqual(bi_row[6], "0.086 [improved]")
        # Test a bi cell without a mono partner carries no tag
        self.assertEqual(bi_row[9], "0.100")
        self.assertEqual(bi_row[10], "0.300 [regressed] |")
        mono_row = lines[3].split(" | ")
        self.assertEqual(mono_row[2], "d_mono")
        self.assertEqual(mono_row[9], MISSING)
        self.assertIn("1e-12", table)

    def test_csv(self):
        text = render_divergence_table(self.results, output_format="csv")
        lines = text.splitlines()
        self.assertEqual(len(lines), 3)  # noqa: PLR2004
        self.assertTrue(lines[1].startswith("Thai,gpt-4o,d_bi,—,"))

    def test_deterministic(self):
        self.assertEqual(
            render_divergence_table(self.results),
            render_divergence_table(list(self.results)),
        )

    def test_rows_follow_language_order(self):
        results = [
            result(MODAL, Condition.BI, 0.1, l1=LanguageCode.URDU),
            result(MODAL, Condition.BI, 0.2, l1=LanguageCode.JAPANESE),
        ]
        text = render_divergence_table(results, output_format="csv")
        names = [line.split(",")[0] for line in text.splitlines()[1:]]
        self.assertEqual(names, ["Japanese", "Japanese", "Urdu", "Urdu"])

    def test_model_comparison(self):
        results = [
            *self.results,
            result(MODAL, Condition.BI, 0.2, model_name="llama"),
        ]
        text = render_model_comparison(results, MODAL)
        lines = text.splitlines()
        self.assertEqual(lines[0], "### Modal Verbs and Expressions")
        self.assertEqual(lines[2], "| L1 | Condition | gpt-4o | llama |")
        self.assertEqual(
            lines[4], "| Thai | d_bi | 0.086 [improved] | 0.200 |"
        )
        self.assertEqual(lines[5], f"| Thai | d_mono | 0.120 | {MISSING} |")


class TestDensityPlot(SimpleTestCase):
    def setUp(self):
        rng = np.random.default_rng(0)
        self.human = rates(rng.normal(5, 1, 50).tolist())
        self.bi = rates(rng.normal(5.5, 1, 50).tolist())
        self.mono = rates(rng.normal(8, 1, 50).tolist())

    def test_three_curves(self):
        models = condition_density_models(self.human, self.bi, self.mono)
        self.assertEqual(
            [label for label, _ in models],
            ["L2-Generated", "English-Generated", "L2-Humans"],
        )
        svg = render_density_svg(models, "Thai: modal & numerals")
        self.assertTrue(svg.startswith("<?xml"))
        self.assertEqual(svg.count("<polyline"), 3)  # noqa: PLR2004
        self.assertEqual(svg.count('class="legend"'), 3)  # noqa: PLR2004
        self.assertIn("Thai: modal &amp; numerals", svg)
        self.assertEqual(
            svg, render_density_svg(models, "Thai: modal & numerals")
        )

    def test_single_model(self):
        models = condition_density_models(
            self.human, rates([]), rates([1.0])
        )
        self.assertEqual([label for label, _ in models], ["L2-Humans"])
        svg = render_density_svg(models, "one")
        self.assertEqual(svg.count("<polyline"), 1)

    def test_density_csv(self):
        models = condition_density_models(self.human, self.bi, self.mono)
        lines = render_density_csv(models, points=16).splitlines()
        self.assertEqual(lines[0], "label,x,density")
        self.assertEqual(len(lines), 1 + 3 * 16)
        self.assertTrue(lines[1].startswith("L2-Generated,"))

    def test_human_baseline(self):
        rng = np.random.default_rng(1)
        samples = [
            rates(rng.normal(4, 1, 40).tolist(), THAI),
            rates(rng.normal(6, 1, 40).tolist(), LanguageCode.URDU),
            rates([2.0], LanguageCode.MALAY),
        ]
        baseline = rates(rng.normal(5, 1, 40).tolist(), LanguageCode.ENGLISH)
        models = baseline_density_models(samples, baseline)
        self.assertEqual(
            [label for label, _ in models],
            ["Thai", "Urdu", ENGLISH_BASELINE],
        )
        svg = render_density_svg(models, "L2-Humans: modal")
        self.assertEqual(svg.count("<polyline"), 3)  # noqa: PLR2004
        self.assertIn(f'stroke="{LINE_COLORS[ENGLISH_BASELINE]}"', svg)


class TestCorpusStats(SimpleTestCase):
    def test_format_tokens(self):
        self.assertEqual(format_tokens(1_600_000), "1,600K")
        self.assertEqual(format_tokens(47_500), "48K")
        self.assertEqual(format_tokens(999), "999")

    def test_table(self):
        human = Corpus(
            dialogues=[
                human_dialogue(f"jpn_{i}", LanguageCode.JAPANESE, "Hi.")
                for i in range(3)
            ]
        )
        generated = Corpus(
            dialogues=[
                model_dialogue("m1", THAI, "gpt-4o", Condition.BI, "A", "B")
            ]
        )
        lines = render_corpus_stats(
            [("Humans", human), ("GPT-4o", generated), ("Empty", Corpus())]
        ).splitlines()
        self.assertEqual(
            lines[0], "| Dataset | Dialogues | Tokens | Participants |"
        )
        self.assertEqual(lines[2], "| Humans | 3 | 6 | 3 |")
        self.assertEqual(lines[3], "| GPT-4o | 1 | 2 | NA |")
        self.assertEqual(lines[4], "| Empty | 0 | 0 | 0 |")
