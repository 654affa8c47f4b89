import contextlib
import io
import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from l1lens.cli import run
from l1lens.errors import ConfigError, TransportError
from l1lens.schemas.annotation import ConstructKind
from l1lens.schemas.corpus import Condition, Corpus, LanguageCode, SourceTag
from l1lens.schemas.synth import SyntheticSpec
from l1lens.services.annotate import load_annotations, save_annotations
from l1lens.services.config import effective_config, generation_config
from l1lens.services.corpus import load_corpus, merge_corpora, save_corpus
from l1lens.services.llm import (
    RecordingTransport,
    annotate_with_llm,
    bundled_card_path,
    generate_batch,
    load_knowledge_card,
    load_shots,
)
from l1lens.services.manifest import manifest_path
from l1lens.services.synth import build_synthetic_corpus
from l1lens_site.error_handlers import (
    EXIT_DATA,
    EXIT_INPUT,
    EXIT_OK,
    EXIT_PARTIAL,
    EXIT_USAGE,
)

from .utils import FIXTURES, human_dialogue


def llm_fixture(name):
    return (FIXTURES / "llm" / name).read_text(encoding="utf-8")


def quiet_run(argv):
    stdout = io.StringIO()
    with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(
        io.StringIO()
    ):
        status = run(argv)
    return status, stdout.getvalue()


class TestDispatch(SimpleTestCase):
    def test_unknown_subcommand(self):
        self.assertEqual(quiet_run(["bogus"])[0], EXIT_USAGE)
        self.assertEqual(quiet_run([])[0], EXIT_USAGE)

    def test_help(self):
        status, out = quiet_run(["--help"])
        self.assertEqual(status, EXIT_OK)
        self.assertIn("score", out)

    def test_missing_required_flag(self):
        self.assertEqual(quiet_run(["score"])[0], EXIT_USAGE)


class WorkdirTestCase(SimpleTestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.workdir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def l1lens(self, command, *args):
        return quiet_run([command, "--workdir", str(self.workdir), *args])

    def read(self, name):
        return (self.workdir / name).read_text(encoding="utf-8")


class TestPipelineCommands(WorkdirTestCase):
    def write_scored_inputs(self):
        l1 = LanguageCode.JAPANESE
        kind = ConstructKind.MODAL_EXPRESSION
        plans = [
            (l1, "human", 5.0, SourceTag.human(), None),
            (l1, "bi", 5.2, SourceTag.model("gpt-4o"), Condition.BI),
            (l1, "mono", 7.0, SourceTag.model("gpt-4o"), Condition.MONO),
            (LanguageCode.URDU, "human", 6.0, SourceTag.human(), None),
            (LanguageCode.ENGLISH, "human", 4.0, SourceTag.human(), None),
        ]
        corpora = []
        annotations = []
        for seed, (language, prefix, mu, source, condition) in enumerate(
            plans
        ):
            corpus, planted = build_synthetic_corpus(
                language,
                {kind: SyntheticSpec(mu=mu, seed=seed)},
                30,
                200,
                source=source,
                condition=condition,
                id_prefix=prefix,
            )
            corpora.append(corpus)
            annotations.extend(planted)
        corpus = merge_corpora(corpora)
        save_corpus(corpus, self.workdir / "corpus.jsonl")
        save_annotations(
            annotations,
            self.workdir / "annotations.jsonl",
            [d.id for d in corpus.dialogues],
        )

    def score(self, *extra):
        return self.l1lens(
            "score",
            "--corpus",
            "corpus.jsonl",
            "--annotations",
            "annotations.jsonl",
            "--l1",
            "jpn",
            "--model",
            "gpt-4o",
            *extra,
        )

    def test_score(self):
        self.write_scored_inputs()
        status, out = self.score("--output", "out/scores.csv")
        self.assertEqual(status, EXIT_OK)
        self.assertIn("16 cells scored", out)
        output = self.workdir / "out" / "scores.csv"
        lines = output.read_text(encoding="utf-8").splitlines()
        self.assertEqual(len(lines), 17)  # noqa: PLR2004
        manifest = json.loads(manifest_path(output).read_text("utf-8"))
        self.assertEqual(manifest["command"], "score")
        self.assertEqual(
            sorted(manifest["inputs"]), ["annotations0", "corpus0"]
        )
        self.assertEqual(len(manifest["inputs"]["corpus0"]["sha256"]), 64)

    def test_score_rerun_is_byte_identical(self):
        self.write_scored_inputs()
        output = self.workdir / "scores.csv"
        self.score("--output", "scores.csv")
        first = (output.read_bytes(), manifest_path(output).read_bytes())
        self.assertEqual(self.score("--output", "scores.csv")[0], EXIT_OK)
        self.assertEqual(
            (output.read_bytes(), manifest_path(output).read_bytes()), first
        )

    def test_score_to_stdout(self):
        self.write_scored_inputs()
        status, out = self.score()
        self.assertEqual(status, EXIT_OK)
        lines = out.splitlines()
        self.assertEqual(len(lines), 17)  # noqa: PLR2004
        self.assertNotIn("cells scored", out)
        self.assertEqual(list(self.workdir.glob("*.manifest.json")), [])

    def test_report_table(self):
        self.write_scored_inputs()
        self.score("--output", "scores.csv")
        status, _ = self.l1lens(
            "report", "table", "--results", "scores.csv", "--output", "t.md"
        )
        self.assertEqual(status, EXIT_OK)
        lines = self.read("t.md").splitlines()
        self.assertTrue(lines[2].startswith("| Japanese | gpt-4o | d_bi | "))
        self.assertTrue(lines[3].startswith("| Japanese | gpt-4o | d_mono | "))
        self.assertIn("1e-12", self.read("t.md"))

    def test_report_density(self):
        self.write_scored_inputs()
        status, _ = self.l1lens(
            "report",
            "density",
            "--corpus",
            "corpus.jsonl",
            "--annotations",
            "annotations.jsonl",
            "--l1",
            "jpn",
            "--model",
            "gpt-4o",
            "--construct",
            "modal_expression",
            "--output",
            "density.svg",
            "--csv",
            "density.csv",
        )
        self.assertEqual(status, EXIT_OK)
        svg = self.read("density.svg")
        self.assertEqual(svg.count("<polyline"), 3)  # noqa: PLR2004
        self.assertIn("Japanese: Modal Verbs and Expressions", svg)
        self.assertEqual(
            len(self.read("density.csv").splitlines()), 1 + 3 * 256
        )

    def test_report_baseline(self):
        self.write_scored_inputs()
        status, _ = self.l1lens(
            "report",
            "baseline",
            "--corpus",
            "corpus.jsonl",
            "--annotations",
            "annotations.jsonl",
            "--l1",
            "jpn",
            "--l1",
            "urd",
            "--construct",
            "modal_expression",
            "--output",
            "baseline.svg",
        )
        self.assertEqual(status, EXIT_OK)
        svg = self.read("baseline.svg")
        self.assertEqual(svg.count("<polyline"), 3)  # noqa: PLR2004
        for label in ("Japanese", "Urdu", "English (native)"):
            self.assertIn(f">{label}</text>", svg)

    def test_report_stats(self):
        self.write_scored_inputs()
        status, _ = self.l1lens(
            "report",
            "stats",
            "--corpus",
            "All=corpus.jsonl",
            "--output",
            "stats.md",
        )
        self.assertEqual(status, EXIT_OK)
        lines = self.read("stats.md").splitlines()
        self.assertTrue(lines[2].startswith("| All | 150 | "))
        status, _ = self.l1lens(
            "report", "stats", "--corpus", "corpus.jsonl", "--output", "x.md"
        )
        self.assertEqual(status, EXIT_USAGE)

    def test_missing_input(self):
        status, _ = quiet_run(
            [
                "score",
                "--workdir",
                str(self.workdir),
                "--corpus",
                "absent.jsonl",
                "--annotations",
                "absent.jsonl",
                "--l1",
                "jpn",
                "--model",
                "gpt-4o",
                "--output",
                "scores.csv",
            ]
        )
        self.assertEqual(status, EXIT_INPUT)

    def test_gaussian_oracle(self):
        status, out = quiet_run(
            [
                "synth",
                "--workdir",
                str(self.workdir),
                "--oracle",
                "gaussian",
                "--seed",
                "7",
                "--output",
                "oracle.txt",
            ]
        )
        self.assertEqual(status, EXIT_OK)
        self.assertIn("5/5 oracle checks passed", out)
        manifest = json.loads(
            manifest_path(self.workdir / "oracle.txt").read_text("utf-8")
        )
        self.assertEqual(manifest["seeds"], {"oracle": 7})

    def synth_corpus(self, *extra):
        return quiet_run(
            [
                "synth",
                "--workdir",
                str(self.workdir),
                "--seed",
                "3",
                "--corpus-output",
                "synth.jsonl",
                "--l1",
                "kor",
                "--dialogues",
                "5",
                "--tokens-per-dialogue",
                "100",
                *extra,
            ]
        )[0]

    def test_synthetic_corpus(self):
        self.assertEqual(self.synth_corpus(), EXIT_OK)
        corpus = load_corpus(self.workdir / "synth.jsonl")
        self.assertEqual(len(corpus), 5)  # noqa: PLR2004
        self.assertTrue(
            (self.workdir / "synth.annotations.jsonl").is_file()
        )
        manifest_file = manifest_path(self.workdir / "synth.jsonl")
        first = manifest_file.read_bytes()
        self.assertEqual(json.loads(first)["seeds"], {"synth": 3})
        # Test a rerun rewrites the manifest byte for byte
        self.assertEqual(self.synth_corpus(), EXIT_OK)
        self.assertEqual(manifest_file.read_bytes(), first)

    def test_config_precedence(self):
        (self.workdir / "run.json").write_text(
            json.dumps({"workers": 2, "retries": 9}), encoding="utf-8"
        )
        status = self.synth_corpus("--config", "run.json", "--workers", "3")
        self.assertEqual(status, EXIT_OK)
        manifest = json.loads(
            manifest_path(self.workdir / "synth.jsonl").read_text("utf-8")
        )
        self.assertEqual(manifest["config"]["workers"], 3)
        self.assertEqual(manifest["config"]["retries"], 9)
        self.assertEqual(manifest["config"]["model"], "gpt-4o")

    def test_bad_config(self):
        (self.workdir / "bad.json").write_text(
            json.dumps({"colour": "blue"}), encoding="utf-8"
        )
        self.assertEqual(
            self.synth_corpus("--config", "bad.json"), EXIT_DATA
        )


class TestCorpusCommands(WorkdirTestCase):
    def setUp(self):
        super().setUp()
        transcripts = self.workdir / "transcripts"
        transcripts.mkdir()
        (transcripts / "jpn_001.txt").write_text(
            "I can swim. She is my friend.\n", encoding="utf-8"
        )
        (transcripts / "jpn_002.txt").write_text(
            "You must go now.\n", encoding="utf-8"
        )

    def ingest(self):
        return self.l1lens(
            "ingest", "--input", "transcripts", "--output", "corpus.jsonl"
        )

    def annotate(self):
        return self.l1lens(
            "annotate", "--corpus", "corpus.jsonl", "--output", "ann.jsonl"
        )

    def test_ingest(self):
        status, out = self.ingest()
        self.assertEqual(status, EXIT_OK)
        self.assertIn("2 dialogues, 14 tokens", out)
        corpus = load_corpus(self.workdir / "corpus.jsonl")
        self.assertEqual(
            [d.id for d in corpus.dialogues], ["jpn_001", "jpn_002"]
        )
        manifest_file = manifest_path(self.workdir / "corpus.jsonl")
        first = manifest_file.read_bytes()
        self.assertEqual(
            sorted(json.loads(first)["inputs"]),
            ["transcript:jpn_001.txt", "transcript:jpn_002.txt"],
        )
        self.ingest()
        self.assertEqual(manifest_file.read_bytes(), first)
        (self.workdir / "transcripts" / "jpn_002.txt").write_text(
            "You should go now.\n", encoding="utf-8"
        )
        self.ingest()
        self.assertNotEqual(manifest_file.read_bytes(), first)

    def test_annotate_rules(self):
        self.ingest()
        status, _ = self.annotate()
        self.assertEqual(status, EXIT_OK)
        output = self.workdir / "ann.jsonl"
        modals = [
            a.tokens
            for a in load_annotations(output)
            if a.kind == ConstructKind.MODAL_EXPRESSION
        ]
        self.assertEqual(modals, [["can"], ["must"]])
        first = (output.read_bytes(), manifest_path(output).read_bytes())
        self.assertIsNotNone(json.loads(first[1])["lexicon_digest"])
        # Test a rerun rewrites the store and manifest byte for byte
        self.assertEqual(self.annotate()[0], EXIT_OK)
        self.assertEqual(
            (output.read_bytes(), manifest_path(output).read_bytes()), first
        )

    def test_profile(self):
        self.ingest()
        self.annotate()
        status, _ = self.l1lens(
            "profile",
            "--corpus",
            "corpus.jsonl",
            "--annotations",
            "ann.jsonl",
            "--output",
            "rates.csv",
        )
        self.assertEqual(status, EXIT_OK)
        lines = self.read("rates.csv").splitlines()
        self.assertEqual(lines[0], "dialogue_id,construct,count,tokens,rate")
        self.assertEqual(len(lines), 1 + 2 * len(ConstructKind))
        self.assertIn("jpn_002,modal_expression,1,5,20.000000", lines)

    def test_validate_sample_then_accuracy(self):
        self.ingest()
        self.annotate()
        status, out = self.l1lens(
            "validate",
            "sample",
            "--annotations",
            "ann.jsonl",
            "--fraction",
            "1.0",
            "--seed",
            "1",
            "--output",
            "review.csv",
        )
        self.assertEqual(status, EXIT_OK)
        self.assertIn("annotations sampled", out)
        header, *rows = self.read("review.csv").splitlines()
        filled = [header]
        filled.extend(row[: -len(",,")] + ",correct,ana" for row in rows)
        (self.workdir / "judged.csv").write_text(
            "\n".join(filled) + "\n", encoding="utf-8"
        )
        status, out = self.l1lens(
            "validate",
            "accuracy",
            "--batch",
            "review.csv.batch.json",
            "--judgments",
            "judged.csv",
        )
        self.assertEqual(status, EXIT_OK)
        self.assertTrue(out.startswith(f"accuracy: 100.0% ({len(rows)}/"))

    def test_validate_compare_stores(self):
        self.ingest()
        self.annotate()
        status, out = self.l1lens(
            "validate",
            "compare",
            "--first",
            "ann.jsonl",
            "--second",
            "ann.jsonl",
        )
        self.assertEqual(status, EXIT_OK)
        self.assertIn(
            "Modal Verbs and Expressions: both 2, first only 0, "
            "second only 0",
            out,
        )
        status, _ = self.l1lens("validate", "compare")
        self.assertEqual(status, EXIT_USAGE)


class TestModelCommands(WorkdirTestCase):
    """Model-backed commands replaying responses recorded here."""

    def setUp(self):
        super().setUp()
        self.config = effective_config()
        self.cfg = generation_config(self.config)
        self.fixtures = self.workdir / "fixtures"

    def test_annotate_llm_with_fixtures(self):
        dialogue = human_dialogue(
            "tha_001", LanguageCode.THAI, "Can you help me? I must go now."
        )
        save_corpus(Corpus(dialogues=[dialogue]), self.workdir / "c.jsonl")
        version = self.config["prompt_version"]
        annotate_with_llm(
            dialogue,
            load_shots(version),
            self.cfg,
            RecordingTransport(
                lambda request: llm_fixture("annotation_modal.md"),
                self.fixtures,
            ),
            [ConstructKind.MODAL_EXPRESSION],
            version,
        )
        status, _ = self.l1lens(
            "annotate",
            "--engine",
            "llm",
            "--corpus",
            "c.jsonl",
            "--construct",
            "modal_expression",
            "--fixtures",
            "fixtures",
            "--rejected",
            "rejected.jsonl",
            "--output",
            "ann.jsonl",
        )
        self.assertEqual(status, EXIT_OK)
        annotations = load_annotations(self.workdir / "ann.jsonl")
        self.assertEqual([a.tokens for a in annotations], [["Can"], ["must"]])
        self.assertEqual(len(self.read("rejected.jsonl").splitlines()), 2)
        manifest = json.loads(
            manifest_path(self.workdir / "ann.jsonl").read_text("utf-8")
        )
        self.assertEqual(manifest["prompt_version"], version)

    def test_generate_partial_failure(self):
        def respond(request):
            if "second-language" in request["messages"][0]["content"]:
                raise TransportError("no mono response")
            return llm_fixture("thai_market.md")

        topic = "Shopping at a market"
        generate_batch(
            LanguageCode.THAI,
            [topic],
            load_knowledge_card(bundled_card_path(LanguageCode.THAI)),
            [Condition.BI, Condition.MONO],
            1,
            self.cfg.model_copy(update={"retries": 0}),
            RecordingTransport(respond, self.fixtures),
            version=self.config["prompt_version"],
        )
        (self.workdir / "run.json").write_text(
            json.dumps({"retries": 0}), encoding="utf-8"
        )
        status, out = self.l1lens(
            "generate",
            "--config",
            "run.json",
            "--l1",
            "tha",
            "--topic",
            topic,
            "--fixtures",
            "fixtures",
            "--requests-per-minute",
            "6000",
            "--output",
            "generated.jsonl",
        )
        self.assertEqual(status, EXIT_PARTIAL)
        self.assertIn("1 dialogues generated, 1 failed", out)
        corpus = load_corpus(self.workdir / "generated.jsonl")
        self.assertEqual(corpus.dialogues[0].condition, Condition.BI)
        self.assertEqual(len(corpus.dialogues[0].turns), 20)  # noqa: PLR2004
        failures = self.read("generated.jsonl.failures.jsonl").splitlines()
        self.assertEqual(len(failures), 1)

    def test_generate_missing_fixtures(self):
        status, _ = self.l1lens(
            "generate",
            "--l1",
            "tha",
            "--topic",
            "Travel",
            "--fixtures",
            "absent",
            "--output",
            "generated.jsonl",
        )
        self.assertEqual(status, EXIT_USAGE)


class TestEffectiveConfig(SimpleTestCase):
    def test_layers(self):
        self.assertEqual(effective_config()["workers"], 1)
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "config.json"
            path.write_text('{"workers": 4}', encoding="utf-8")
            self.assertEqual(effective_config(path)["workers"], 4)
            self.assertEqual(
                effective_config(path, {"workers": 8})["workers"], 8
            )
            self.assertEqual(
                effective_config(path, {"workers": None})["workers"], 4
            )
            path.write_text("[1, 2]", encoding="utf-8")
            with self.assertRaises(ConfigError):
                effective_config(path)
