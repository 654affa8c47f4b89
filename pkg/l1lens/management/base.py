import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from l1lens.schemas.llm import GenerationConfig
from l1lens.services.config import effective_config
from l1lens.services.llm.client import (
    FixtureTransport,
    HttpChatTransport,
    RecordingTransport,
    Transport,
)
from l1lens.services.manifest import build_manifest, write_manifest

logger = logging.getLogger("l1lens")

DJANGO_OPTIONS = frozenset(
    {
        "verbosity",
        "settings",
        "pythonpath",
        "traceback",
        "no_color",
        "force_color",
        "skip_checks",
    }
)


class PipelineCommand(BaseCommand):
    """Common flags, config resolution and run manifests.

    Subclasses implement ``add_pipeline_arguments`` and ``run``. Options
    named in ``config_options`` override the config key of the same name.
    """

    config_options: tuple[str, ...] = ("workers",)
    requires_system_checks = []

    def add_arguments(self, parser):
        parser.add_argument(
            "--workdir",
            default=".",
            help="Directory that relative paths are resolved against.",
        )
        parser.add_argument(
            "--config", help="JSON file overriding the settings defaults."
        )
        parser.add_argument(
            "--workers", type=int, help="Parallel workers for batch stages."
        )
        self.add_pipeline_arguments(parser)

    def add_pipeline_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        self.workdir = Path(options["workdir"])
        self.options = {
            k: v for k, v in options.items() if k not in DJANGO_OPTIONS
        }
        self.config = effective_config(
            self.path(options["config"]),
            {name: options.get(name) for name in self.config_options},
        )
        self.run(**options)

    def run(self, **options):
        raise NotImplementedError

    def path(self, value: str | Path | None) -> Path | None:
        if value is None:
            return None
        return self.workdir / value

    def write_text(self, output: Path, text: str) -> None:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text, encoding="utf-8", newline="\n")
        logger.info("Wrote %s", output)

    def record_run(
        self,
        output: Path,
        inputs: dict,
        seeds: dict | None = None,
        prompt_version: str | None = None,
        lexicon_digest: str | None = None,
    ) -> None:
        manifest = build_manifest(
            command=self.command_name(),
            options=self.options,
            inputs=inputs,
            config=self.config,
            seeds=seeds,
            prompt_version=prompt_version,
            lexicon_digest=lexicon_digest,
        )
        write_manifest(output, manifest)

    def command_name(self) -> str:
        return type(self).__module__.rsplit(".", 1)[-1]

    def chat_transport(self, cfg: GenerationConfig, options) -> Transport:
        """Recorded fixtures when given, else the HTTP endpoint."""
        fixtures = self.path(options["fixtures"])
        if fixtures is not None:
            if not fixtures.is_dir():
                raise CommandError(
                    f"fixture directory {fixtures} does not exist",
                    returncode=2,
                )
            transport = FixtureTransport(fixtures)
        else:
            transport = HttpChatTransport(cfg)
        record = self.path(options["record"])
        if record is not None:
            transport = RecordingTransport(transport, record)
        return transport
