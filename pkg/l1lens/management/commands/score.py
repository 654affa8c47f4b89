from l1lens.management.base import PipelineCommand
from l1lens.services.annotate import AnnotationStore
from l1lens.services.corpus import load_corpus, merge_corpora, parse_language
from l1lens.services.divergence import results_to_csv, score_models


class Command(PipelineCommand):
    help = "Compute d_bi and d_mono for every construct as a CSV table."

    def add_pipeline_arguments(self, parser):
        parser.add_argument(
            "--corpus",
            action="append",
            required=True,
            help="Corpus file; repeat to combine human and generated ones.",
        )
        parser.add_argument("--annotations", action="append", required=True)
        parser.add_argument("--l1", action="append", required=True)
        parser.add_argument(
            "--model",
            action="append",
            required=True,
            help="Generating model name; may be repeated.",
        )
        parser.add_argument(
            "--output", help="CSV file; the table goes to stdout without it."
        )

    def run(self, **options):
        corpus_paths = [self.path(p) for p in options["corpus"]]
        corpus = merge_corpora([load_corpus(p) for p in corpus_paths])
        store_paths = [self.path(p) for p in options["annotations"]]
        stores = [AnnotationStore.load(p) for p in store_paths]
        store = AnnotationStore(
            [a for s in stores for a in s.annotations()],
            [i for s in stores for i in s.dialogue_ids()],
        )
        results = score_models(
            corpus,
            store,
            [parse_language(code) for code in options["l1"]],
            options["model"],
            self.config["density_floor"],
        )
        output = self.path(options["output"])
        if output is None:
            self.stdout.write(results_to_csv(results), ending="")
            self.stderr.write(f"{len(results)} cells scored")
            return
        self.write_text(output, results_to_csv(results))
        inputs = {f"corpus{i}": p for i, p in enumerate(corpus_paths)}
        inputs.update(
            {f"annotations{i}": p for i, p in enumerate(store_paths)}
        )
        self.record_run(output, inputs)
        self.stdout.write(f"{len(results)} cells scored")
