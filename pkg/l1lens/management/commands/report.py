from django.core.management.base import CommandError

from l1lens.management.base import PipelineCommand
from l1lens.schemas.annotation import ConstructKind
from l1lens.schemas.corpus import Condition, CorpusSlice, Origin
from l1lens.services.annotate import AnnotationStore
from l1lens.services.corpus import load_corpus, merge_corpora, parse_language
from l1lens.services.divergence import results_from_csv
from l1lens.services.profile import collect_rates
from l1lens.services.report import (
    baseline_density_models,
    condition_density_models,
    render_corpus_stats,
    render_density_csv,
    render_density_svg,
    render_divergence_table,
    render_model_comparison,
)

CONSTRUCTS = [kind.value for kind in ConstructKind]


class Command(PipelineCommand):
    help = "Render divergence tables, density curves and corpus statistics."

    def add_pipeline_arguments(self, parser):
        actions = parser.add_subparsers(dest="action", required=True)

        table = actions.add_parser("table", help="Divergence table.")
        table.add_argument("--results", required=True)
        table.add_argument(
            "--format", choices=("markdown", "csv"), default="markdown"
        )
        table.add_argument("--output", required=True)

        compare = actions.add_parser(
            "compare", help="One construct across models."
        )
        compare.add_argument("--results", required=True)
        compare.add_argument("--construct", choices=CONSTRUCTS, required=True)
        compare.add_argument("--output", required=True)

        density = actions.add_parser("density", help="Rate density curves.")
        density.add_argument("--corpus", action="append", required=True)
        density.add_argument("--annotations", action="append", required=True)
        density.add_argument("--l1", required=True)
        density.add_argument("--model", required=True)
        density.add_argument("--construct", choices=CONSTRUCTS, required=True)
        density.add_argument("--title")
        density.add_argument("--output", required=True, help="SVG file.")
        density.add_argument("--csv", help="Also write the curves as CSV.")

        baseline = actions.add_parser(
            "baseline", help="Human densities per L1 against English."
        )
        baseline.add_argument("--corpus", action="append", required=True)
        baseline.add_argument(
            "--annotations", action="append", required=True
        )
        baseline.add_argument("--l1", action="append", required=True)
        baseline.add_argument("--baseline", default="eng")
        baseline.add_argument(
            "--construct", choices=CONSTRUCTS, required=True
        )
        baseline.add_argument("--title")
        baseline.add_argument("--output", required=True, help="SVG file.")
        baseline.add_argument("--csv", help="Also write the curves as CSV.")

        stats = actions.add_parser("stats", help="Corpus statistics table.")
        stats.add_argument(
            "--corpus",
            action="append",
            required=True,
            metavar="LABEL=PATH",
        )
        stats.add_argument("--output", required=True)

    def run(self, **options):
        getattr(self, f"run_{options['action']}")(options)

    def run_table(self, options):
        results_path = self.path(options["results"])
        results = results_from_csv(
            results_path.read_text(encoding="utf-8"), results_path
        )
        output = self.path(options["output"])
        self.write_text(
            output,
            render_divergence_table(
                results, options["format"], self.config["density_floor"]
            ),
        )
        self.record_run(output, {"results": results_path})

    def run_compare(self, options):
        results_path = self.path(options["results"])
        results = results_from_csv(
            results_path.read_text(encoding="utf-8"), results_path
        )
        output = self.path(options["output"])
        self.write_text(
            output,
            render_model_comparison(
                results, ConstructKind(options["construct"])
            ),
        )
        self.record_run(output, {"results": results_path})

    def load_annotated(self, options):
        corpus_paths = [self.path(p) for p in options["corpus"]]
        corpus = merge_corpora([load_corpus(p) for p in corpus_paths])
        store_paths = [self.path(p) for p in options["annotations"]]
        stores = [AnnotationStore.load(p) for p in store_paths]
        store = AnnotationStore(
            [a for s in stores for a in s.annotations()],
            [i for s in stores for i in s.dialogue_ids()],
        )
        inputs = {f"corpus{i}": p for i, p in enumerate(corpus_paths)}
        inputs.update(
            {f"annotations{i}": p for i, p in enumerate(store_paths)}
        )
        return corpus, store, inputs

    def write_curves(self, models, title, options, inputs):
        if not models:
            raise CommandError(
                "no slice has the two rates a density needs", returncode=2
            )
        points = self.config["density_grid_points"]
        output = self.path(options["output"])
        self.write_text(output, render_density_svg(models, title, points))
        if options["csv"]:
            self.write_text(
                self.path(options["csv"]), render_density_csv(models, points)
            )
        self.record_run(output, inputs)

    def run_density(self, options):
        corpus, store, inputs = self.load_annotated(options)
        l1 = parse_language(options["l1"])
        kind = ConstructKind(options["construct"])

        def rates(**filters):
            return collect_rates(
                corpus, store, kind, CorpusSlice(l1=l1, **filters)
            )

        generated = {"origin": Origin.MODEL, "model_name": options["model"]}
        models = condition_density_models(
            rates(origin=Origin.HUMAN),
            rates(condition=Condition.BI, **generated),
            rates(condition=Condition.MONO, **generated),
            self.config["density_floor"],
        )
        title = options["title"] or f"{l1.display_name}: {kind.display_name}"
        self.write_curves(models, title, options, inputs)

    def run_baseline(self, options):
        corpus, store, inputs = self.load_annotated(options)
        kind = ConstructKind(options["construct"])

        def human_rates(l1):
            return collect_rates(
                corpus,
                store,
                kind,
                CorpusSlice(l1=l1, origin=Origin.HUMAN),
            )

        models = baseline_density_models(
            [human_rates(parse_language(code)) for code in options["l1"]],
            human_rates(parse_language(options["baseline"])),
            self.config["density_floor"],
        )
        title = options["title"] or f"L2-Humans: {kind.display_name}"
        self.write_curves(models, title, options, inputs)

    def run_stats(self, options):
        labeled = []
        for value in options["corpus"]:
            label, sep, path = value.partition("=")
            if not sep or not label or not path:
                raise CommandError(
                    f"expected LABEL=PATH, got {value!r}", returncode=2
                )
            labeled.append((label, self.path(path)))
        corpora = [(label, load_corpus(path)) for label, path in labeled]
        output = self.path(options["output"])
        self.write_text(output, render_corpus_stats(corpora))
        self.record_run(output, dict(labeled))
