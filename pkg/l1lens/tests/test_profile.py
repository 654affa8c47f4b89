from django.test import SimpleTestCase

from l1lens.errors import MetricError, MissingAnnotationsError
from l1lens.schemas.annotation import Annotation, ConstructKind, SentenceRef
from l1lens.schemas.corpus import (
    Condition,
    Corpus,
    CorpusSlice,
    LanguageCode,
    Origin,
)
from l1lens.services.annotate import AnnotationStore, annotate_all
from l1lens.services.lexicons import bundled_lexicons
from l1lens.services.profile import (
    collect_rates,
    profile_corpus,
    profile_dialogue,
)

from .utils import human_dialogue, model_dialogue

MODAL = ConstructKind.MODAL_EXPRESSION


def modal_at(dialogue_id, index):
    return Annotation(
        kind=MODAL,
        sentence_ref=SentenceRef(
            dialogue_id=dialogue_id, turn_index=0, sentence_index=0
        ),
        spans=[(index, index + 1)],
        tokens=["can"],
        sentence="can",
        rationale="modal lexicon match",
    )


class TestProfileDialogue(SimpleTestCase):
    def test_rate_per_hundred_tokens(self):
        dialogue = human_dialogue(
            "jpn_1", LanguageCode.JAPANESE, " ".join(["can"] * 50)
        )
        rates = profile_dialogue(
            dialogue, [modal_at("jpn_1", 0), modal_at("jpn_1", 7)]
        )
        self.assertEqual(len(rates), 8)  # noqa: PLR2004
        modal = rates[MODAL.order]
        self.assertEqual((modal.count, modal.tokens), (2, 50))
        self.assertEqual(modal.rate, 4.0)
        self.assertEqual(
            [r.kind for r in rates], list(ConstructKind)
        )

    def test_only_speech_acts(self):
        dialogue = human_dialogue(
            "jpn_2", LanguageCode.JAPANESE, "The cat sat."
        )
        rates = profile_dialogue(
            dialogue, annotate_all(dialogue, bundled_lexicons())
        )
        by_kind = {r.kind: r.rate for r in rates}
        self.assertEqual(by_kind.pop(ConstructKind.SPEECH_ACT), 25.0)
        self.assertEqual(set(by_kind.values()), {0.0})

    def test_table_sentence(self):
        dialogue = human_dialogue(
            "jpn_3", LanguageCode.JAPANESE, "She might come to the meeting"
        )
        rates = profile_dialogue(
            dialogue, annotate_all(dialogue, bundled_lexicons())
        )
        self.assertAlmostEqual(rates[MODAL.order].rate, 100 / 6)

    def test_foreign_annotations(self):
        dialogue = human_dialogue("jpn_1", LanguageCode.JAPANESE, "I can.")
        with self.assertRaisesMessage(MetricError, "jpn_9"):
            profile_dialogue(dialogue, [modal_at("jpn_9", 0)])

    def test_duplicated_sentences_keep_rates(self):
        once = human_dialogue("a", LanguageCode.URDU, "I can go. He might.")
        twice = human_dialogue(
            "a", LanguageCode.URDU, "I can go. He might. I can go. He might."
        )
        lex = bundled_lexicons()
        self.assertEqual(
            [r.rate for r in profile_dialogue(once, annotate_all(once, lex))],
            [
                r.rate
                for r in profile_dialogue(twice, annotate_all(twice, lex))
            ],
        )


class TestCollectRates(SimpleTestCase):
    def setUp(self):
        yue = LanguageCode.CANTONESE
        self.corpus = Corpus(
            dialogues=[
                human_dialogue("yue_1", yue, "I can swim."),
                model_dialogue(
                    "m_1", yue, "gpt-4o", Condition.BI, "Hi.", "Yo."
                ),
                human_dialogue("yue_2", yue, "You must go now."),
                human_dialogue("jpn_1", LanguageCode.JAPANESE, "I can."),
                human_dialogue("yue_3", yue, "Hello there."),
            ]
        )
        lex = bundled_lexicons()
        self.store = AnnotationStore(
            [a for d in self.corpus.dialogues for a in annotate_all(d, lex)],
            (d.id for d in self.corpus.dialogues),
        )

    def test_human_slice_in_corpus_order(self):
        corpus_slice = CorpusSlice(
            l1=LanguageCode.CANTONESE, origin=Origin.HUMAN
        )
        rates = collect_rates(self.corpus, self.store, MODAL, corpus_slice)
        self.assertEqual(rates.values, [25.0, 20.0, 0.0])
        self.assertEqual(rates.slice, corpus_slice)

    def test_empty_slice(self):
        rates = collect_rates(
            self.corpus,
            self.store,
            MODAL,
            CorpusSlice(l1=LanguageCode.KOREAN),
        )
        self.assertEqual(len(rates), 0)

    def test_missing_annotations(self):
        store = AnnotationStore([], ["yue_1"])
        with self.assertRaisesMessage(MissingAnnotationsError, "yue_2"):
            collect_rates(
                self.corpus,
                store,
                MODAL,
                CorpusSlice(l1=LanguageCode.CANTONESE, origin=Origin.HUMAN),
            )

    def test_profile_corpus(self):
        rates = profile_corpus(self.corpus, self.store)
        self.assertEqual(len(rates), 8 * 5)
        self.assertEqual(rates[0].dialogue_id, "yue_1")
