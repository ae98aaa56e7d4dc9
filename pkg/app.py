import functools
import logging
import sys

import click

from core.adversary import TreeAdversary, build_adversary
from core.constants import (
    ADVERSARIES,
    DEFAULT_LEARNER,
    LEARNERS,
    SETTINGS,
    TIE_POLICIES,
)
from core.dimensions import DimensionKind, calculator_for
from core.engine import (
    CLASSIC,
    GameConfig,
    Transcript,
    check_transcript,
    run_classic_game,
    run_game,
    world_for,
)
from core.errors import ImproveError, ResourceLimitError
from core.generator import generate_instance
from core.instance_io import dump_instance, dumps, load_instance, read_json, write_json
from core.learners import SOA, build_learner
from core.model import validate
from core.oracle import MinimaxSolver, certify_dimension
from core.report import verify_corpus, write_report
from core.trees import enumerate_shattered_tree, tree_to_dict
from utils.validators import validate_game_config

EXIT_VIOLATION = 1
EXIT_USAGE = 2


# ============================================================
# Error Boundary
# ============================================================

def _guarded(fn):
    """Map library failures onto exit codes: 2 for bad input, 1 for violations."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, OSError, ResourceLimitError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_USAGE)
        except ImproveError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_VIOLATION)

    return wrapper


def _load_checked(path):
    instance = load_instance(path)
    report = validate(instance.graph, instance.labels, instance.hypotheses)
    if not report.ok:
        for message in report.violations:
            click.echo(f"violation: {message}", err=True)
        sys.exit(EXIT_VIOLATION)
    return instance


# ============================================================
# CLI
# ============================================================

@click.group()
@click.option("-v", "--verbose", count=True, help="-v for INFO, -vv for DEBUG.")
def cli(verbose):
    """Online learning with improving agents."""
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@click.argument("instance_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice([k.value for k in DimensionKind]), default=None)
@click.option("--tree-out", type=click.Path(dir_okay=False), default=None,
              help="Write a witness tree of maximum depth (needs --kind).")
@_guarded
def dim(instance_file, kind, tree_out):
    """Print dimensions of the hypothesis class."""
    instance = _load_checked(instance_file)
    calc = calculator_for(instance)

    if kind is not None:
        kinds = [DimensionKind(kind)]
    else:
        kinds = [k for k in DimensionKind if k is not DimensionKind.IL_BINARY or instance.labels.k == 2]

    for k in kinds:
        click.echo(f"{k.value}={calc.dimension(k, instance.full())}")

    if tree_out is not None:
        if kind is None:
            raise click.UsageError("--tree-out needs --kind")
        depth = calc.dimension(kind, instance.full())
        tree = enumerate_shattered_tree(instance, kind, depth)
        write_json(tree_out, tree_to_dict(tree, instance, kind))


@cli.command()
@click.argument("instance_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--learner", type=click.Choice(LEARNERS), default=None)
@click.option("--adversary", type=click.Choice(ADVERSARIES), default=None)
@click.option("--setting", type=click.Choice(SETTINGS), default=None)
@click.option("--tie-policy", type=click.Choice(TIE_POLICIES), default=None)
@click.option("--horizon", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--literal-type2-update", is_flag=True, default=False)
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Transcript JSON.")
@_guarded
def run(instance_file, config_file, out, **flags):
    """Play one game and print the mistake count."""
    instance = _load_checked(instance_file)

    payload = read_json(config_file) if config_file else {}
    if flags.pop("literal_type2_update"):
        payload["literal_type2_update"] = True
    payload.update({k: v for k, v in flags.items() if v is not None})
    options = validate_game_config(payload)

    setting = options["setting"]
    learner_name = options["learner"] or DEFAULT_LEARNER[setting]
    config = GameConfig(
        setting=setting,
        tie_policy=options["tie_policy"],
        horizon=options["horizon"],
        seed=options["seed"],
    )

    if learner_name == "soa":
        transcript, world = _run_classic(instance, options, config)
    else:
        world = world_for(instance, setting)
        learner = build_learner(learner_name, world, options["literal_type2_update"])
        kind = DimensionKind.LITTLESTONE if learner_name == "baseline" else None
        if options["adversary"] == "tree":
            adversary = TreeAdversary(world, setting, kind=kind)
        else:
            adversary = build_adversary(
                options["adversary"], world, setting, learner,
                tie_policy=config.tie_policy, seed=config.seed,
            )
        transcript = run_game(learner, adversary, config)

    if out is not None:
        write_json(out, transcript.to_dict(world))
    click.echo(
        f"mistakes={transcript.mistakes} rounds={len(transcript.rounds)} "
        f"initial_dim={transcript.initial_dim}"
    )

    violations = check_transcript(transcript, instance)
    for message in violations:
        click.echo(f"violation: {message}", err=True)
    if violations:
        sys.exit(EXIT_VIOLATION)


def _run_classic(instance, options, config):
    if options["adversary"] == "exhaustive":
        raise click.UsageError("soa plays the classic game; use the tree or random adversary")
    if options["setting"] == "multiclass-bandit":
        raise click.UsageError("soa needs full feedback")
    world = world_for(instance, CLASSIC)
    if options["adversary"] == "tree":
        adversary = TreeAdversary(world, options["setting"], kind=DimensionKind.LITTLESTONE)
    else:
        adversary = build_adversary("random", world, options["setting"], seed=config.seed)
    return run_classic_game(SOA(world), adversary, config), world


@cli.command()
@click.argument("instance_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--setting", type=click.Choice(SETTINGS), default="binary", show_default=True)
@_guarded
def solve(instance_file, setting):
    """Exact game value by minimax search."""
    instance = _load_checked(instance_file)
    solver = MinimaxSolver(instance, setting)
    value = solver.value()
    full = instance.full().mask
    per_node = [solver.instance_value(full, x) for x in range(instance.graph.n)]
    click.echo(f"value={value}")
    for name, node_value in zip(instance.graph.nodes, per_node):
        click.echo(f"  {name}: {node_value}")


@cli.command()
@click.argument("instance_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--setting", type=click.Choice(SETTINGS), default="binary", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Print the full verdict as JSON.")
@_guarded
def certify(instance_file, setting, as_json):
    """Check game value against the setting's dimension (exit 0 iff equal)."""
    instance = _load_checked(instance_file)
    verdict = certify_dimension(instance, setting)

    if as_json:
        click.echo(dumps(verdict), nl=False)
    else:
        status = "EQUAL" if verdict["equal"] else "MISMATCH"
        click.echo(f"value={verdict['value']} dim={verdict['dimension']} {status}")
        if verdict["mismatch"]:
            click.echo(f"smallest mismatch: {verdict['mismatch']}")
    if not verdict["equal"]:
        sys.exit(EXIT_VIOLATION)


@cli.command()
@click.option("--nodes", type=int, required=True)
@click.option("--degree", type=int, required=True)
@click.option("--labels", type=int, default=2, show_default=True)
@click.option("--hyps", type=int, required=True)
@click.option("--weighted", is_flag=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@_guarded
def gen(nodes, degree, labels, hyps, weighted, seed, out):
    """Generate a random instance file."""
    instance = generate_instance(nodes, degree, labels, hyps, weighted=weighted, seed=seed)
    text = dump_instance(instance, out)
    if out is None:
        click.echo(text, nl=False)


@cli.command()
@click.argument("corpus", type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="report", show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
@_guarded
def verify(corpus, out_dir, workers):
    """Dimensions, mistakes and oracle values for every corpus instance."""
    rows = verify_corpus(corpus, workers=workers)
    summary = write_report(rows, out_dir)
    totals = summary["totals"]
    click.echo(
        f"instances={totals['instances']} rows={totals['rows']} "
        f"certified={totals['certified']} failures={len(totals['failures'])}"
    )
    for failure in totals["failures"]:
        click.echo(f"violation: {failure}", err=True)
    if totals["failures"]:
        sys.exit(EXIT_VIOLATION)


@cli.command()
@click.argument("instance_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("transcript_file", type=click.Path(exists=True, dir_okay=False))
@_guarded
def check(instance_file, transcript_file):
    """Replay a saved transcript and report protocol violations."""
    instance = _load_checked(instance_file)
    transcript = Transcript.from_dict(read_json(transcript_file), instance)
    violations = check_transcript(transcript, instance)
    for message in violations:
        click.echo(f"violation: {message}")
    click.echo(f"rounds={len(transcript.rounds)} violations={len(violations)}")
    if violations:
        sys.exit(EXIT_VIOLATION)


# ============================================================
# Entrypoint
# ============================================================

if __name__ == "__main__":
    cli()
