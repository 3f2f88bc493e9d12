import logging
import sys

import click

from msic import __version__
from msic.bound import DETERMINISTIC, EXHAUSTIVE, lower_bound, replay, run_algorithm1
from msic.coding import EXACT, GREEDY, code_from_document
from msic.config import Config
from msic.models import GuardError, InstanceError, PreconditionError
from msic.utils import analyze, build_code, build_report, dump_document, load_instance, read_document, render_dot
from msic.verify import oracle_min_linear, rank_decodable, verify_exhaustive

logger = logging.getLogger(__name__)

EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_GUARD = 3


class MsicGroup(click.Group):
    """Maps failures onto the documented exit codes: 1 usage, 2 parse, 3 guard"""

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(args=args, prog_name=prog_name, complete_var=complete_var, standalone_mode=False, **extra)
        except click.UsageError as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(e.exit_code)
        except click.Abort:
            click.echo("Aborted!", err=True)
            sys.exit(EXIT_USAGE)
        except (InstanceError, PreconditionError) as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_PARSE)
        except GuardError as e:
            click.echo(f"Error: {e}", err=True)
            sys.exit(EXIT_GUARD)
        sys.exit(rv if isinstance(rv, int) else 0)


def _emit(document):
    click.echo(dump_document(document))


instance_path = click.argument("path", type=click.Path(dir_okay=False))


@click.group(cls=MsicGroup)
@click.version_option(__version__, prog_name="msic")
@click.option(
    "--jobs",
    type=click.IntRange(min=1),
    default=None,
    help="Worker processes for the oracle search (the bound search always runs in one process).",
)
@click.option("-v", "--verbose", count=True, help="Log INFO (-v) or DEBUG (-vv) to stderr.")
@click.pass_context
def cli(ctx, jobs, verbose):
    """Bounds and codes for multi-sender uniprior index coding."""
    level = {0: Config.LOG_LEVEL, 1: "INFO"}.get(verbose, "DEBUG")
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )
    ctx.obj = {"jobs": jobs if jobs is not None else Config.JOBS}


@cli.command()
@instance_path
def validate(path):
    """Parse an instance and print its summary."""
    _emit(load_instance(path).summary())


@cli.command()
@instance_path
def simplify(path):
    """Drop messages nobody wants from every sender set."""
    analysis = analyze(load_instance(path))
    document = analysis.simplified.to_document()
    document["removed"] = sorted(analysis.removed)
    _emit(document)


@cli.command()
@instance_path
def classify(path):
    """List the SCCs and classify every leaf SCC."""
    _emit(analyze(load_instance(path)).classification.to_document())


@cli.command()
@instance_path
@click.option("--exhaustive", is_flag=True, help="Search every choice sequence for the tightest bound.")
@click.option("--trace", "with_trace", is_flag=True, help="Include the step log.")
def bound(path, exhaustive, with_trace):
    """Lower bound from the leaf-SCC breaking algorithm."""
    analysis = analyze(load_instance(path))
    trace = run_algorithm1(analysis.graphs, EXHAUSTIVE if exhaustive else DETERMINISTIC)
    document = {
        "lower_bound": lower_bound(trace),
        "v_out": analysis.graphs.v_out(),
        "n_connected": trace.n_connected,
        "n_remaining": trace.n_remaining,
        "n_iv": trace.n_iv,
        "mode": trace.mode,
    }
    if with_trace:
        document["trace"] = trace.to_document()
    _emit(document)


@cli.command()
@instance_path
@click.option("--greedy", is_flag=True, help="Maximal instead of maximum connecting-tree family.")
@click.option("--blueprint", "with_blueprint", is_flag=True, help="Print the blueprint instead of the code.")
def code(path, greedy, with_blueprint):
    """Build the connecting-tree XOR code."""
    analysis = analyze(load_instance(path))
    blueprint, linear_code = build_code(analysis, GREEDY if greedy else EXACT)
    _emit(blueprint.to_document() if with_blueprint else linear_code.to_document())


@cli.command()
@instance_path
@click.argument("code_path", type=click.Path(dir_okay=False))
@click.option("--exhaustive", is_flag=True, help="Also simulate every message assignment.")
def verify(path, code_path, exhaustive):
    """Certify that a code lets every receiver decode."""
    inst = load_instance(path)
    try:
        linear_code = code_from_document(read_document(code_path), inst.num_messages)
    except InstanceError as e:
        raise InstanceError(str(e), code_path)
    document = rank_decodable(linear_code, inst).to_document()
    if exhaustive:
        document["exhaustive"] = verify_exhaustive(linear_code, inst)
    _emit(document)


@cli.command()
@instance_path
@click.option("--max-len", type=click.IntRange(min=0), default=None, help="Longest code to try.")
@click.pass_context
def oracle(ctx, path, max_len):
    """Shortest linear code by brute force."""
    analysis = analyze(load_instance(path))
    result = oracle_min_linear(analysis.simplified, max_len=max_len, jobs=ctx.obj["jobs"])
    _emit(result.to_document(lower=lower_bound(run_algorithm1(analysis.graphs))))


@cli.command()
@instance_path
@click.option("--oracle", "with_oracle", is_flag=True, help="Run the linear oracle too.")
@click.option("--exhaustive", is_flag=True, help="Exhaustive mode for the lower bound.")
@click.option("--trace", "with_trace", is_flag=True, help="Include the step log.")
@click.option("--greedy", is_flag=True, help="Greedy connecting-tree search.")
@click.option("--max-len", type=click.IntRange(min=0), default=None, help="Longest code the oracle tries.")
@click.option("--format", "output_format", type=click.Choice(["json", "text"]), default="json")
@click.pass_context
def report(ctx, path, with_oracle, exhaustive, with_trace, greedy, max_len, output_format):
    """Run the whole pipeline and print the report."""
    document = build_report(
        load_instance(path),
        exhaustive=exhaustive,
        with_oracle=with_oracle,
        with_trace=with_trace,
        tree_mode=GREEDY if greedy else EXACT,
        max_len=max_len,
        jobs=ctx.obj["jobs"],
    )
    if output_format == "json":
        _emit(document)
        return
    oracle_doc = document["oracle"]
    rows = [
        ("V_out", document["v_out"]),
        ("N_connected", document["n_connected"]),
        ("N_remaining", document["n_remaining"]),
        ("N_iv", document["n_iv"]),
        ("lower bound", document["lower_bound"]),
        ("N_tree", document["n_tree"]),
        ("upper bound", document["upper_bound"]),
        ("oracle", "-" if oracle_doc is None else oracle_doc["length"]),
        ("certified", "yes" if document["certified"] else "no"),
    ]
    for entry in document["classification"]:
        rows.append((f"leaf SCC {entry['vertices']}", entry["class"]))
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        click.echo(f"{name.ljust(width)}  {value}")


@cli.command()
@instance_path
@click.option("--trace", "with_trace", is_flag=True, help="Render the graphs left after the algorithm ran.")
def dot(path, with_trace):
    """Graphviz drawing of the information-flow digraph and message graph."""
    g = analyze(load_instance(path)).graphs
    if with_trace:
        trace = run_algorithm1(g)
        g = replay(trace.original, trace.log)
    click.echo(render_dot(g), nl=False)
