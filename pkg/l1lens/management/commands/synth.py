from l1lens.errors import OracleFailure
from l1lens.management.base import PipelineCommand
from l1lens.schemas.annotation import ConstructKind
from l1lens.schemas.synth import Distribution, SyntheticSpec
from l1lens.services.annotate import save_annotations
from l1lens.services.corpus import parse_language, save_corpus
from l1lens.services.synth import (
    build_synthetic_corpus,
    run_gaussian_oracle,
    run_pipeline_oracle,
)


def render_oracle_report(cases) -> str:
    lines = []
    for case in cases:
        status = "PASS" if case.passed else "FAIL"
        lines.append(
            f"{status} {case.case}: estimate {case.estimate:.4f}, "
            f"expected {case.expected:.4f}, tolerance {case.tolerance:g}"
            f" ({case.detail})"
        )
    passed = sum(case.passed for case in cases)
    lines.append(f"{passed}/{len(cases)} oracle checks passed")
    return "\n".join(lines) + "\n"


class Command(PipelineCommand):
    help = "Run estimator oracles or write a synthetic corpus."

    def add_pipeline_arguments(self, parser):
        parser.add_argument(
            "--oracle",
            choices=("gaussian", "pipeline", "all"),
            default="all",
        )
        parser.add_argument("--seed", type=int, required=True)
        parser.add_argument(
            "--n", type=int, help="Sample size; default depends on oracle."
        )
        parser.add_argument("--output", help="Write the oracle report here.")

        corpus = parser.add_argument_group("synthetic corpus")
        corpus.add_argument(
            "--corpus-output",
            dest="corpus_output",
            help="Write a planted corpus instead of running oracles.",
        )
        corpus.add_argument(
            "--annotations-output", dest="annotations_output"
        )
        corpus.add_argument("--l1", default="eng")
        corpus.add_argument(
            "--construct",
            choices=[kind.value for kind in ConstructKind],
            default=ConstructKind.MODAL_EXPRESSION.value,
        )
        corpus.add_argument(
            "--distribution",
            choices=[d.value for d in Distribution],
            default=Distribution.NORMAL.value,
        )
        corpus.add_argument("--mu", type=float, default=6.0)
        corpus.add_argument("--sigma", type=float, default=1.0)
        corpus.add_argument("--dialogues", type=int, default=500)
        corpus.add_argument(
            "--tokens-per-dialogue",
            dest="tokens_per_dialogue",
            type=int,
            default=1000,
        )

    def run(self, **options):
        if options["corpus_output"]:
            self.write_corpus(options)
            return
        cases = []
        if options["oracle"] in {"gaussian", "all"}:
            cases.extend(
                run_gaussian_oracle(options["seed"], options["n"] or 2000)
            )
        if options["oracle"] in {"pipeline", "all"}:
            cases.extend(
                run_pipeline_oracle(options["seed"], options["n"] or 500)
            )
        report = render_oracle_report(cases)
        self.stdout.write(report, ending="")
        if options["output"]:
            output = self.path(options["output"])
            self.write_text(output, report)
            self.record_run(output, {}, seeds={"oracle": options["seed"]})
        failed = [case.case for case in cases if not case.passed]
        if failed:
            raise OracleFailure(f"oracle checks failed: {', '.join(failed)}")

    def write_corpus(self, options):
        spec = SyntheticSpec(
            distribution=options["distribution"],
            mu=options["mu"],
            sigma=options["sigma"],
            n=max(2, options["dialogues"]),
            seed=options["seed"],
        )
        corpus, annotations = build_synthetic_corpus(
            parse_language(options["l1"]),
            {ConstructKind(options["construct"]): spec},
            options["dialogues"],
            options["tokens_per_dialogue"],
        )
        output = self.path(options["corpus_output"])
        save_corpus(corpus, output)
        annotations_output = self.path(
            options["annotations_output"]
        ) or output.with_name(output.stem + ".annotations.jsonl")
        save_annotations(
            annotations, annotations_output, (d.id for d in corpus.dialogues)
        )
        self.record_run(output, {}, seeds={"synth": options["seed"]})
