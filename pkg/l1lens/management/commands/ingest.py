from l1lens.management.base import PipelineCommand
from l1lens.services.corpus import (
    corpus_stats,
    ingest_directory,
    load_corpus,
    merge_corpora,
    save_corpus,
    transcript_paths,
)


class Command(PipelineCommand):
    help = "Parse a directory of transcripts into a line-delimited corpus."

    def add_pipeline_arguments(self, parser):
        parser.add_argument(
            "--input", required=True, help="Directory of <l1>_<id>.txt files."
        )
        parser.add_argument(
            "--manifest", help="Tab-separated filename, l1, speaker, topic."
        )
        parser.add_argument(
            "--merge",
            action="append",
            default=[],
            help="Existing corpus file to merge in; may be repeated.",
        )
        parser.add_argument("--output", required=True)

    def run(self, **options):
        manifest = self.path(options["manifest"])
        directory = self.path(options["input"])
        corpus = ingest_directory(directory, manifest, self.config["workers"])
        merged = [self.path(p) for p in options["merge"]]
        if merged:
            corpus = merge_corpora(
                [corpus, *(load_corpus(path) for path in merged)]
            )
        output = self.path(options["output"])
        save_corpus(corpus, output)
        inputs = {"manifest": manifest}
        inputs.update(
            {f"transcript:{p.name}": p for p in transcript_paths(directory)}
        )
        inputs.update({f"merge{i}": p for i, p in enumerate(merged)})
        self.record_run(output, inputs)
        stats = corpus_stats(corpus)
        self.stdout.write(
            f"{stats.dialogues} dialogues, {stats.tokens} tokens"
        )
