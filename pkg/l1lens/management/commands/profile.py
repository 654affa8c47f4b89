import csv
import io

from l1lens.management.base import PipelineCommand
from l1lens.services.annotate import AnnotationStore
from l1lens.services.corpus import load_corpus, merge_corpora
from l1lens.services.profile import profile_corpus

RATE_COLUMNS = ("dialogue_id", "construct", "count", "tokens", "rate")


class Command(PipelineCommand):
    help = "Write per-dialogue construct rates (per 100 tokens) as CSV."

    def add_pipeline_arguments(self, parser):
        parser.add_argument("--corpus", action="append", required=True)
        parser.add_argument("--annotations", required=True)
        parser.add_argument("--output", required=True)

    def run(self, **options):
        corpus_paths = [self.path(p) for p in options["corpus"]]
        corpus = merge_corpora([load_corpus(p) for p in corpus_paths])
        annotations = self.path(options["annotations"])
        rates = profile_corpus(corpus, AnnotationStore.load(annotations))

        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(RATE_COLUMNS)
        writer.writerows(
            [r.dialogue_id, r.kind.value, r.count, r.tokens, f"{r.rate:.6f}"]
            for r in rates
        )
        output = self.path(options["output"])
        self.write_text(output, buffer.getvalue())
        inputs = {f"corpus{i}": p for i, p in enumerate(corpus_paths)}
        inputs["annotations"] = annotations
        self.record_run(output, inputs)
