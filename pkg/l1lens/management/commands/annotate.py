import logging
from concurrent.futures import ThreadPoolExecutor

from l1lens.management.base import PipelineCommand
from l1lens.schemas.annotation import ConstructKind
from l1lens.services.annotate import annotate_corpus, save_annotations
from l1lens.services.config import generation_config
from l1lens.services.corpus import load_corpus
from l1lens.services.lexicons import lexicon_digest, load_lexicons
from l1lens.services.llm.annotation import annotate_with_llm, load_shots
from l1lens.services.llm.client import AuditLog, TokenBucket
from l1lens.services.records import write_records

logger = logging.getLogger("l1lens")


class Command(PipelineCommand):
    help = "Span-annotate a corpus with the rule engine or a chat model."

    config_options = (
        "workers",
        "model",
        "prompt_version",
        "requests_per_minute",
    )

    def add_pipeline_arguments(self, parser):
        parser.add_argument("--corpus", required=True)
        parser.add_argument("--output", required=True)
        parser.add_argument(
            "--engine", choices=("rules", "llm"), default="rules"
        )
        parser.add_argument(
            "--lexicons", help="Directory overriding bundled lexicon files."
        )
        parser.add_argument(
            "--construct",
            action="append",
            choices=[kind.value for kind in ConstructKind],
            help="LLM engine only; default is every construct.",
        )
        parser.add_argument("--model")
        parser.add_argument("--prompt-version", dest="prompt_version")
        parser.add_argument(
            "--requests-per-minute",
            dest="requests_per_minute",
            type=float,
        )
        parser.add_argument(
            "--fixtures", help="Replay recorded responses from a directory."
        )
        parser.add_argument(
            "--record", help="Record every response into a directory."
        )
        parser.add_argument("--audit-log", dest="audit_log")
        parser.add_argument(
            "--rejected", help="Where to write rejected model records."
        )

    def run(self, **options):
        corpus_path = self.path(options["corpus"])
        corpus = load_corpus(corpus_path)
        output = self.path(options["output"])
        if options["engine"] == "rules":
            lex = load_lexicons(self.path(options["lexicons"]))
            annotations = annotate_corpus(corpus, lex, self.config["workers"])
            save_annotations(
                annotations, output, (d.id for d in corpus.dialogues)
            )
            self.record_run(
                output,
                {"corpus": corpus_path},
                lexicon_digest=lexicon_digest(lex),
            )
            return
        self.run_llm(corpus, corpus_path, output, options)

    def run_llm(self, corpus, corpus_path, output, options):
        cfg = generation_config(self.config)
        version = self.config["prompt_version"]
        shots = load_shots(version)
        kinds = [ConstructKind(k) for k in options["construct"] or []]
        transport = self.chat_transport(cfg, options)
        limiter = TokenBucket(self.config["requests_per_minute"])
        audit = AuditLog(self.path(options["audit_log"]))

        def annotate(dialogue):
            return annotate_with_llm(
                dialogue,
                shots,
                cfg,
                transport,
                kinds or tuple(ConstructKind),
                version,
                limiter=limiter,
                audit=audit,
            )

        workers = max(1, self.config["workers"])
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(annotate, corpus.dialogues))
        annotations = [a for accepted, _ in outcomes for a in accepted]
        rejected = [
            {"dialogue_id": dialogue.id, **record.model_dump()}
            for dialogue, (_, bad) in zip(
                corpus.dialogues, outcomes, strict=True
            )
            for record in bad
        ]
        save_annotations(
            annotations, output, (d.id for d in corpus.dialogues)
        )
        if options["rejected"]:
            write_records(self.path(options["rejected"]), rejected)
        logger.info(
            "LLM annotation: %d accepted, %d rejected",
            len(annotations),
            len(rejected),
        )
        self.record_run(
            output,
            {"corpus": corpus_path},
            prompt_version=version,
        )
