import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from l1lens.errors import ConfigError
from l1lens.services.lexicons import (
    bundled_lexicons,
    lexicon_digest,
    load_lexicons,
)


class TestLexicons(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_bundled_lists(self):
        lex = bundled_lexicons()
        self.assertIn(("ought", "to"), lex.modals)
        self.assertIn(("a", "few"), lex.quantifiers)
        self.assertEqual(
            lex.light_verbs,
            frozenset({"do", "make", "take", "have", "give", "get"}),
        )
        self.assertEqual(lex.irregular_past["did"], "do")
        self.assertIn(("do", "test"), lex.collocation_pairs)
        self.assertIn("she", lex.pronouns_referential)

    def test_modal_index_longest_first(self):
        lex = bundled_lexicons()
        self.assertEqual(lex.modal_index["have"][0], ("have", "to"))

    def test_override_only_given_files(self):
        (self.dir / "modals.txt").write_text(
            "# custom\nmight\nbe able to\n", encoding="utf-8"
        )
        lex = load_lexicons(self.dir)
        self.assertEqual(lex.modals, (("might",), ("be", "able", "to")))
        # Test untouched lists come from the bundled set
        self.assertEqual(lex.quantifiers, bundled_lexicons().quantifiers)
        self.assertNotEqual(
            lexicon_digest(lex), lexicon_digest(bundled_lexicons())
        )

    def test_digest_is_stable(self):
        self.assertEqual(
            lexicon_digest(load_lexicons()),
            lexicon_digest(bundled_lexicons()),
        )

    def test_uppercase_entry_rejected(self):
        (self.dir / "quantifiers.txt").write_text(
            "some\nMany\n", encoding="utf-8"
        )
        with self.assertRaisesMessage(ConfigError, ":2: entry 'Many'"):
            load_lexicons(self.dir)

    def test_empty_list_rejected(self):
        (self.dir / "light_verbs.txt").write_text(
            "# nothing here\n", encoding="utf-8"
        )
        with self.assertRaisesMessage(ConfigError, "lexicon is empty"):
            load_lexicons(self.dir)

    def test_pairs_need_two_columns(self):
        (self.dir / "collocation_pairs.txt").write_text(
            "do test\n", encoding="utf-8"
        )
        with self.assertRaisesMessage(ConfigError, "two tab-separated"):
            load_lexicons(self.dir)

    def test_missing_directory(self):
        with self.assertRaises(ConfigError):
            load_lexicons(self.dir / "absent")
