from django.core.management.base import CommandError

from l1lens.management.base import PipelineCommand
from l1lens.services.annotate import load_annotations
from l1lens.services.review import (
    compare_accuracy,
    compare_stores,
    compute_accuracy,
    export_review_csv,
    import_judgments_csv,
    load_batch,
    render_accuracy,
    render_comparison,
    sample_for_review,
    save_batch,
)


class Command(PipelineCommand):
    help = "Sample annotations for manual review and score the judgments."

    config_options = ("workers", "review_fraction")

    def add_pipeline_arguments(self, parser):
        actions = parser.add_subparsers(dest="action", required=True)

        sample = actions.add_parser("sample", help="Export a review sheet.")
        sample.add_argument("--annotations", required=True)
        sample.add_argument(
            "--fraction", dest="review_fraction", type=float
        )
        sample.add_argument("--seed", type=int, required=True)
        sample.add_argument(
            "--no-stratify",
            dest="stratify",
            action="store_false",
            help="Plain uniform sampling instead of per-construct shares.",
        )
        sample.add_argument("--output", required=True, help="Review CSV.")
        sample.add_argument(
            "--batch", help="Batch file; default <output>.batch.json."
        )

        accuracy = actions.add_parser(
            "accuracy", help="Accuracy from a filled review sheet."
        )
        accuracy.add_argument("--batch", required=True)
        accuracy.add_argument("--judgments", required=True)
        accuracy.add_argument("--output")

        compare = actions.add_parser(
            "compare", help="Compare two reviews or two annotation stores."
        )
        compare.add_argument(
            "--before", nargs=2, metavar=("BATCH", "JUDGMENTS")
        )
        compare.add_argument(
            "--after", nargs=2, metavar=("BATCH", "JUDGMENTS")
        )
        compare.add_argument("--first", help="Annotation store.")
        compare.add_argument("--second", help="Annotation store.")
        compare.add_argument("--output")

    def run(self, **options):
        getattr(self, f"run_{options['action']}")(options)

    def finish(self, text: str, options, inputs: dict):
        self.stdout.write(text, ending="")
        if options["output"]:
            output = self.path(options["output"])
            self.write_text(output, text)
            self.record_run(output, inputs)

    def run_sample(self, options):
        annotations_path = self.path(options["annotations"])
        batch = sample_for_review(
            load_annotations(annotations_path),
            self.config["review_fraction"],
            options["seed"],
            stratified=options["stratify"],
        )
        output = self.path(options["output"])
        batch_path = self.path(options["batch"]) or output.with_name(
            output.name + ".batch.json"
        )
        self.write_text(output, export_review_csv(batch))
        save_batch(batch, batch_path)
        self.record_run(
            output,
            {"annotations": annotations_path},
            seeds={"review": options["seed"]},
        )
        self.stdout.write(
            f"{len(batch.sampled)} of {batch.population_size} "
            f"annotations sampled"
        )

    def accuracy(self, batch_value, judgments_value):
        batch_path = self.path(batch_value)
        judgments_path = self.path(judgments_value)
        judgments = import_judgments_csv(
            judgments_path.read_text(encoding="utf-8"), judgments_path
        )
        report = compute_accuracy(load_batch(batch_path), judgments)
        return report, {"batch": batch_path, "judgments": judgments_path}

    def run_accuracy(self, options):
        report, inputs = self.accuracy(options["batch"], options["judgments"])
        self.finish(render_accuracy(report), options, inputs)

    def run_compare(self, options):
        deltas = []
        agreement = []
        inputs = {}
        if options["before"] and options["after"]:
            before, first_inputs = self.accuracy(*options["before"])
            after, second_inputs = self.accuracy(*options["after"])
            deltas = compare_accuracy(before, after)
            inputs.update({f"before_{k}": v for k, v in first_inputs.items()})
            inputs.update({f"after_{k}": v for k, v in second_inputs.items()})
        if options["first"] and options["second"]:
            first = self.path(options["first"])
            second = self.path(options["second"])
            agreement = compare_stores(
                load_annotations(first), load_annotations(second)
            )
            inputs.update({"first": first, "second": second})
        if not inputs:
            raise CommandError(
                "nothing to compare: give --before and --after, "
                "or --first and --second",
                returncode=2,
            )
        self.finish(render_comparison(deltas, agreement), options, inputs)
