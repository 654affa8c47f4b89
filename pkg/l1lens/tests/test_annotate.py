import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from l1lens.errors import MalformedRecordError, MissingAnnotationsError
from l1lens.schemas.corpus import Corpus, LanguageCode
from l1lens.services.annotate import (
    EMPTY_MARKER,
    AnnotationStore,
    annotate_corpus,
    load_annotations,
    save_annotations,
)
from l1lens.services.lexicons import bundled_lexicons

from .utils import human_dialogue


class TestAnnotationStore(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.path = Path(self.tmp.name) / "annotations.jsonl"
        self.corpus = Corpus(
            dialogues=[
                human_dialogue(
                    "kor_1", LanguageCode.KOREAN, "He have a car yesterday."
                ),
                human_dialogue("kor_2", LanguageCode.KOREAN, "Okay."),
            ]
        )

    def tearDown(self):
        self.tmp.cleanup()

    def test_corpus_order_and_workers(self):
        serial = annotate_corpus(self.corpus, bundled_lexicons())
        self.assertEqual(serial[0].sentence_ref.dialogue_id, "kor_1")
        self.assertEqual(serial[-1].sentence_ref.dialogue_id, "kor_2")
        self.assertEqual(
            annotate_corpus(self.corpus, bundled_lexicons(), workers=2),
            serial,
        )

    def test_round_trip_keeps_empty_dialogues(self):
        annotations = [
            a
            for a in annotate_corpus(self.corpus, bundled_lexicons())
            if a.sentence_ref.dialogue_id == "kor_1"
        ]
        save_annotations(annotations, self.path, ["kor_1", "kor_2"])
        last = self.path.read_text(encoding="utf-8").splitlines()[-1]
        self.assertEqual(last, f'{{"{EMPTY_MARKER}": "kor_2"}}')

        self.assertEqual(load_annotations(self.path), annotations)
        store = AnnotationStore.load(self.path)
        self.assertIn("kor_2", store)
        self.assertEqual(store.for_dialogue("kor_2"), [])
        self.assertEqual(len(store), len(annotations))

    def test_missing_dialogue_named(self):
        store = AnnotationStore([], ["kor_1"])
        with self.assertRaisesMessage(MissingAnnotationsError, "kor_9"):
            store.require(["kor_1", "kor_9"])

    def test_bad_record_line(self):
        self.path.write_text('{"type": "modal_expression"}\n', "utf-8")
        with self.assertRaises(MalformedRecordError) as ctx:
            load_annotations(self.path)
        self.assertEqual(ctx.exception.line, 1)
