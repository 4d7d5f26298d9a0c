"""Command-line front door: read, corpus, eval, serve, bench.

Exit codes for `read`: 0 all images produced grammar-valid confident
reads, 2 at least one read needs manual review (including blank frames),
1 on decode or IO failure.
"""

from __future__ import annotations

import socket
import sys
import time
from pathlib import Path

import click

from . import imgio
from .consensus import FrameObservation, fuse
from .corpus import generate_corpus, render_frame, sample_spec
from .evaluate import evaluate_manifest
from .gatekeeper.api import create_app
from .gatekeeper.config import DEFAULT_MIN_CONFIDENCE, ConfigError, load_config
from .gatekeeper.service import GateService
from .glyphs import TemplateArchiveError, default_templates, load_templates
from .grammar import GrammarParseError, default_grammar, load_grammar
from .pipeline import STAGE_NAMES, dump_stages, recognize_bytes
from .report import write_report
from .rng import SplitMix64, derive_seed

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_REVIEW = 2


def _load_grammar_opt(path: str | None):
    if path is None:
        return default_grammar()
    try:
        return load_grammar(Path(path).read_text(encoding="utf-8"))
    except (OSError, GrammarParseError) as exc:
        raise click.ClickException(f"grammar {path}: {exc}")


def _load_templates_opt(path: str | None):
    if path is None:
        return default_templates()
    try:
        return load_templates(path)
    except (OSError, TemplateArchiveError) as exc:
        raise click.ClickException(f"templates {path}: {exc}")


@click.group()
def main():
    """License-plate reading pipeline and gate access-control service."""


# ---------------------------------------------------------------------------
# read
# ---------------------------------------------------------------------------

@main.command("read")
@click.argument("paths", nargs=-1, required=True, type=click.Path())
@click.option("--grammar", "grammar_path", default=None, help="Grammar config file.")
@click.option("--templates", "templates_path", default=None, help="Glyph template archive.")
@click.option("--stages-out", "stages_out", default=None,
              help="Directory for per-stage intermediate images.")
def cmd_read(paths, grammar_path, templates_path, stages_out):
    """Read the plate in each image and print string plus confidences."""
    grammar = _load_grammar_opt(grammar_path)
    templates = _load_templates_opt(templates_path)
    needs_review = False

    for path in paths:
        try:
            data = Path(path).read_bytes()
            result = recognize_bytes(data, grammar=grammar, templates=templates)
        except (OSError, imgio.ImageDecodeError) as exc:
            click.echo(f"{path}: error: {exc}", err=True)
            sys.exit(EXIT_FAILURE)

        if stages_out:
            image = imgio.decode_image(data)
            out_dir = Path(stages_out) / Path(path).stem
            dump_stages(image, out_dir, grammar=grammar, templates=templates)

        best = result.best
        if best is None:
            click.echo(f"{path}: NO_PLATE")
            needs_review = True
            continue

        chars = " ".join(f"{c.confidence:.3f}" for c in best.read.chars)
        click.echo(f"{path}: plate={best.plate_string} raw={best.read.raw_string} "
                   f"conf={best.confidence:.3f} valid={'yes' if best.report.valid else 'no'} "
                   f"chars={chars}")
        if not best.report.valid or best.confidence < DEFAULT_MIN_CONFIDENCE:
            needs_review = True

    sys.exit(EXIT_REVIEW if needs_review else EXIT_OK)


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------

@main.group()
def corpus():
    """Synthetic ground-truth corpus tools."""


@corpus.command("generate")
@click.option("--n", default=200, show_default=True, help="Number of frames.")
@click.option("--seed", default=0, show_default=True, help="Master seed.")
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Output directory.")
@click.option("--perturb/--no-perturb", default=False, show_default=True,
              help="Apply the skew/noise/brightness/rails sweep.")
def cmd_corpus_generate(n, seed, out_dir, perturb):
    """Render frames plus a line-delimited JSON manifest."""
    if n < 1:
        raise click.ClickException("need --n >= 1")
    manifest = generate_corpus(out_dir, n, seed, perturb=perturb)
    click.echo(f"wrote {n} frames, manifest {manifest}")


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

@main.command("eval")
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--limit", default=None, type=int, help="Evaluate only the first N records.")
@click.option("--grammar", "grammar_path", default=None, help="Grammar config file.")
@click.option("--templates", "templates_path", default=None, help="Glyph template archive.")
@click.option("--report", "report_dir", default=None, type=click.Path(file_okay=False),
              help="Write report.csv plus figures into this directory.")
def cmd_eval(manifest, limit, grammar_path, templates_path, report_dir):
    """Score the pipeline against a corpus manifest."""
    grammar = _load_grammar_opt(grammar_path)
    templates = _load_templates_opt(templates_path)
    try:
        summary = evaluate_manifest(manifest, limit=limit, grammar=grammar,
                                    templates=templates)
    except (OSError, ValueError) as exc:
        raise click.ClickException(str(exc))

    click.echo(f"frames            {summary.n}")
    click.echo(f"plate_exact_rate  {summary.plate_exact_rate:.4f}")
    click.echo(f"char_accuracy     {summary.char_accuracy:.4f}")
    click.echo(f"iou_mean          {summary.localization_iou_mean:.4f}")
    click.echo(f"latency_mean_ms   {summary.mean_latency_ms:.2f}")
    click.echo(f"latency_p95_ms    {summary.p95_latency_ms:.2f}")
    for stage in STAGE_NAMES:
        click.echo(f"  {stage:<10} mean {summary.stage_mean_ms[stage]:7.2f} ms   "
                   f"p95 {summary.stage_p95_ms[stage]:7.2f} ms")

    if report_dir:
        for path in write_report(summary, report_dir):
            click.echo(f"wrote {path}")


# ---------------------------------------------------------------------------
# serve
# ---------------------------------------------------------------------------

@main.command("serve")
@click.option("--config", "config_path", required=True,
              type=click.Path(exists=True, dir_okay=False), help="Service config file.")
def cmd_serve(config_path):
    """Run the gate access-control HTTP service until signaled."""
    import uvicorn

    try:
        config = load_config(config_path)
    except ConfigError as exc:
        click.echo(f"config: {exc}", err=True)
        sys.exit(EXIT_FAILURE)

    try:
        service = GateService(config)
    except (OSError, TemplateArchiveError, GrammarParseError) as exc:
        click.echo(f"startup: {exc}", err=True)
        sys.exit(EXIT_FAILURE)

    # Probe the listen address up front for a clean single-line failure.
    try:
        probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        probe.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        probe.bind((config.listen_host, config.listen_port))
        probe.close()
    except OSError as exc:
        click.echo(f"cannot bind {config.listen}: {exc}", err=True)
        sys.exit(EXIT_FAILURE)

    app = create_app(service)
    click.echo(f"serving gates {','.join(config.gates)} on http://{config.listen}")
    uvicorn.run(app, host=config.listen_host, port=config.listen_port, log_level="warning")


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

@main.command("bench")
@click.option("--n", default=100, show_default=True, help="Number of frames.")
@click.option("--seed", default=0, show_default=True, help="Master seed.")
def cmd_bench(n, seed):
    """Time the full decode-to-read chain over clean synthetic frames."""
    if n < 1:
        raise click.ClickException("need --n >= 1")
    templates = default_templates()
    grammar = default_grammar()

    frames = []
    for index in range(n):
        spec = sample_spec(SplitMix64(derive_seed(seed, index)), perturb=False)
        frames.append((spec.plate, imgio.encode_pgm(render_frame(spec).image)))

    # Warm caches outside the timed loop.
    recognize_bytes(frames[0][1], templates=templates, grammar=grammar)

    totals = []
    stage_sums = {stage: 0.0 for stage in STAGE_NAMES}
    observations = 0
    start = time.perf_counter()
    for index, (plate, data) in enumerate(frames):
        result = recognize_bytes(data, templates=templates, grammar=grammar)
        totals.append(result.total_ms)
        for stage, ms in result.timings_ms.items():
            stage_sums[stage] += ms
        best = result.best
        if best is not None and best.report.valid:
            observations += 1
            fuse([FrameObservation(read=best.read, frame_id=str(index), timestamp=0)])
    elapsed = time.perf_counter() - start

    totals.sort()
    mean_ms = sum(totals) / len(totals)
    p95_ms = totals[min(len(totals) - 1, int(round(0.95 * (len(totals) - 1))))]
    click.echo(f"frames            {n}")
    click.echo(f"consensus_ready   {observations}")
    click.echo(f"mean_ms           {mean_ms:.2f}")
    click.echo(f"p95_ms            {p95_ms:.2f}")
    click.echo(f"wall_s            {elapsed:.2f}")
    for stage in STAGE_NAMES:
        click.echo(f"  {stage:<10} mean {stage_sums[stage] / n:7.2f} ms")


if __name__ == "__main__":
    main()
