from l1lens.errors import PartialGenerationError
from l1lens.management.base import PipelineCommand
from l1lens.schemas.corpus import Condition
from l1lens.services.config import generation_config
from l1lens.services.corpus import parse_language, save_corpus
from l1lens.services.llm.cards import bundled_card_path, load_knowledge_card
from l1lens.services.llm.client import AuditLog, TokenBucket
from l1lens.services.llm.generation import generate_batch
from l1lens.services.llm.prompts import DEFAULT_TURNS
from l1lens.services.records import write_records


class Command(PipelineCommand):
    help = "Generate L2 English dialogues with and without L1 knowledge."

    config_options = (
        "workers",
        "model",
        "prompt_version",
        "requests_per_minute",
        "max_in_flight",
    )

    def add_pipeline_arguments(self, parser):
        parser.add_argument("--l1", required=True)
        topics = parser.add_mutually_exclusive_group(required=True)
        topics.add_argument("--topic", action="append")
        topics.add_argument("--topics", help="File with one topic per line.")
        parser.add_argument(
            "--card", help="Knowledge card; defaults to the bundled one."
        )
        parser.add_argument(
            "--condition",
            action="append",
            choices=[Condition.BI.value, Condition.MONO.value],
            help="Default: both bi and mono.",
        )
        parser.add_argument(
            "--per-cell", dest="per_cell", type=int, default=1
        )
        parser.add_argument("--turns", type=int, default=DEFAULT_TURNS)
        parser.add_argument("--model")
        parser.add_argument("--prompt-version", dest="prompt_version")
        parser.add_argument(
            "--requests-per-minute", dest="requests_per_minute", type=float
        )
        parser.add_argument(
            "--max-in-flight", dest="max_in_flight", type=int
        )
        parser.add_argument("--fixtures")
        parser.add_argument("--record")
        parser.add_argument("--audit-log", dest="audit_log")
        parser.add_argument("--output", required=True)

    def topics(self, options) -> list[str]:
        if options["topic"]:
            return options["topic"]
        path = self.path(options["topics"])
        lines = path.read_text(encoding="utf-8").splitlines()
        return [line.strip() for line in lines if line.strip()]

    def run(self, **options):
        l1 = parse_language(options["l1"])
        conditions = [
            Condition(c) for c in options["condition"] or ("bi", "mono")
        ]
        card_path = None
        card = None
        if Condition.BI in conditions:
            card_path = self.path(options["card"]) or bundled_card_path(l1)
            card = load_knowledge_card(card_path)

        cfg = generation_config(self.config)
        transport = self.chat_transport(cfg, options)

        corpus, failures = generate_batch(
            l1,
            self.topics(options),
            card,
            conditions,
            options["per_cell"],
            cfg,
            transport,
            workers=self.config["workers"],
            max_in_flight=self.config["max_in_flight"],
            turns=options["turns"],
            version=self.config["prompt_version"],
            limiter=TokenBucket(self.config["requests_per_minute"]),
            audit=AuditLog(self.path(options["audit_log"])),
        )
        output = self.path(options["output"])
        save_corpus(corpus, output)
        if failures:
            write_records(
                output.with_name(output.name + ".failures.jsonl"),
                (failure.model_dump(mode="json") for failure in failures),
            )
        self.record_run(
            output,
            {"card": card_path, "topics": self.path(options["topics"])},
            prompt_version=self.config["prompt_version"],
        )
        self.stdout.write(
            f"{len(corpus)} dialogues generated, {len(failures)} failed"
        )
        if failures:
            raise PartialGenerationError(len(corpus), len(failures))
