import numpy as np
from django.test import SimpleTestCase

from l1lens.errors import MetricError, ParseError
from l1lens.schemas.annotation import ConstructKind
from l1lens.schemas.corpus import (
    Condition,
    CorpusSlice,
    LanguageCode,
    Origin,
    SourceTag,
)
from l1lens.schemas.metrics import CellStatus, RateSample
from l1lens.schemas.synth import SyntheticSpec
from l1lens.services.annotate import AnnotationStore
from l1lens.services.corpus import merge_corpora
from l1lens.services.divergence import (
    RESULT_COLUMNS,
    divergence,
    results_from_csv,
    results_to_csv,
    score_conditions,
)
from l1lens.services.synth import build_synthetic_corpus

MODAL = ConstructKind.MODAL_EXPRESSION
HUMAN_SLICE = CorpusSlice(l1=LanguageCode.CANTONESE, origin=Origin.HUMAN)
BI_SLICE = CorpusSlice(
    l1=LanguageCode.CANTONESE,
    origin=Origin.MODEL,
    model_name="gpt-4o",
    condition=Condition.BI,
)


def sample(values, corpus_slice=HUMAN_SLICE, kind=MODAL):
    return RateSample(kind=kind, slice=corpus_slice, values=list(values))


def normal(mu, sigma, n, seed):
    return np.random.default_rng(seed).normal(mu, sigma, n)


class TestDivergence(SimpleTestCase):
    def test_split_sample_near_zero(self):
        values = normal(0, 1, 1000, 11)
        result = divergence(
            sample(values[:500]), sample(values[500:], BI_SLICE)
        )
        self.assertTrue(result.is_ok)
        self.assertLessEqual(abs(result.d), 0.05)

    def test_gaussian_mean_shift(self):
        result = divergence(
            sample(normal(0, 1, 2000, 5)),
            sample(normal(1, 1, 2000, 6), BI_SLICE),
        )
        self.assertLessEqual(abs(result.d - 0.5), 0.1)
        self.assertEqual(result.n_human, 2000)  # noqa: PLR2004
        self.assertEqual(result.condition, Condition.BI)
        self.assertEqual(result.model_name, "gpt-4o")
        self.assertEqual(result.l1, LanguageCode.CANTONESE)

    def test_monotone_in_shift(self):
        human = sample(normal(0, 1, 2000, 5))
        estimates = [
            divergence(human, sample(normal(mu, 1, 2000, 6), BI_SLICE)).d
            for mu in (0.0, 0.5, 1.0, 2.0)
        ]
        self.assertEqual(estimates, sorted(estimates))

    def test_permutation_bit_identical(self):
        human = normal(3, 1, 300, 1)
        model = normal(3.5, 1.2, 300, 2)
        rng = np.random.default_rng(9)
        first = divergence(sample(human), sample(model, BI_SLICE))
        second = divergence(
            sample(rng.permutation(human)),
            sample(rng.permutation(model), BI_SLICE),
        )
        self.assertEqual(first.d, second.d)

    def test_affine_invariance(self):
        human = normal(3, 1, 300, 1)
        model = normal(3.5, 1.2, 300, 2)
        base = divergence(sample(human), sample(model, BI_SLICE))
        moved = divergence(
            sample(2.5 * human + 7), sample(2.5 * model + 7, BI_SLICE)
        )
        self.assertAlmostEqual(base.d, moved.d, delta=1e-9)

    def test_insufficient_data(self):
        result = divergence(sample([1.0]), sample([1.0, 2.0], BI_SLICE))
        self.assertEqual(result.status, CellStatus.INSUFFICIENT_DATA)
        self.assertIsNone(result.d)
        self.assertEqual(result.n_human, 1)

    def test_kind_mismatch(self):
        other = sample([1.0, 2.0], BI_SLICE, ConstructKind.SPEECH_ACT)
        with self.assertRaises(MetricError):
            divergence(sample([1.0, 2.0]), other)


class TestScoreConditions(SimpleTestCase):
    def build(self, conditions):
        l1 = LanguageCode.JAPANESE
        spec = SyntheticSpec(mu=5.0, sigma=1.0, seed=1)
        plans = [("human", SourceTag.human(), None)] + [
            (c.value, SourceTag.model("gpt-4o"), c) for c in conditions
        ]
        corpora = []
        annotations = []
        for offset, (prefix, source, condition) in enumerate(plans):
            corpus, planted = build_synthetic_corpus(
                l1,
                {MODAL: spec.model_copy(update={"seed": offset})},
                20,
                200,
                source=source,
                condition=condition,
                id_prefix=prefix,
            )
            corpora.append(corpus)
            annotations.extend(planted)
        corpus = merge_corpora(corpora)
        store = AnnotationStore(annotations, (d.id for d in corpus.dialogues))
        return score_conditions(corpus, store, l1, "gpt-4o")

    def test_full_grid(self):
        results = self.build([Condition.BI, Condition.MONO])
        self.assertEqual(len(results), 16)  # noqa: PLR2004
        self.assertEqual(
            [(r.kind, r.condition) for r in results[:2]],
            [
                (ConstructKind.NUMBER_AGREEMENT, Condition.BI),
                (ConstructKind.NUMBER_AGREEMENT, Condition.MONO),
            ],
        )
        self.assertTrue(all(r.is_ok for r in results))

    def test_missing_mono(self):
        results = self.build([Condition.BI])
        bi = [r for r in results if r.condition == Condition.BI]
        mono = [r for r in results if r.condition == Condition.MONO]
        self.assertEqual(len(bi), 8)  # noqa: PLR2004
        self.assertTrue(all(r.is_ok for r in bi))
        self.assertTrue(
            all(r.status == CellStatus.INSUFFICIENT_DATA for r in mono)
        )
        self.assertEqual({r.n_model for r in mono}, {0})

    def test_csv_export(self):
        results = self.build([Condition.BI])
        text = results_to_csv(results)
        lines = text.splitlines()
        self.assertEqual(lines[0], ",".join(RESULT_COLUMNS))
        self.assertEqual(len(lines), 17)  # noqa: PLR2004
        self.assertTrue(lines[2].endswith(",insufficient_data,,20,0,,"))
        self.assertEqual(results_to_csv(results_from_csv(text)), text)

    def test_csv_header_checked(self):
        with self.assertRaises(ParseError) as ctx:
            results_from_csv("l1,construct\n")
        self.assertEqual(ctx.exception.line, 1)
