"""
Command Line Interface for the tangency-lab homoclinic tangency laboratory.

This module runs scenario files, verification suites and the individual
operations (germ, saddle, bidisk and scan commands) from the command line.
"""

import asyncio
import json
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

import click
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from .commands import COMMANDS
from .config import config
from .core.artifacts import dumps, to_plain
from .core.errors import LabError
from .core.models import Scenario, SuiteReport
from .core.scenario_engine import RunResult, ScenarioEngine, build_scenario, load_scenario
from .suites import SUITES, get_suites, run_suites

console = Console()
logger = logging.getLogger(__name__)


def parse_value(text: str) -> Any:
    """A TOML value (number, list, boolean, quoted string) or the raw text."""
    try:
        return tomllib.loads(f"value = {text}")["value"]
    except tomllib.TOMLDecodeError:
        return text


def collect_params(pairs: Tuple[str, ...], **named: Optional[str]) -> Dict[str, Any]:
    """
    Scenario parameters from named options and KEY=VALUE pairs.

    Raises:
        click.BadParameter: a pair without '='
    """
    params = {key: parse_value(value) for key, value in named.items() if value is not None}
    for pair in pairs:
        if "=" not in pair:
            raise click.BadParameter(f"expected KEY=VALUE, got {pair!r}", param_hint="--param")
        key, value = pair.split("=", 1)
        params[key.strip()] = parse_value(value.strip())
    return params


def param_option(func: Any) -> Any:
    return click.option(
        "--param", "-p", "pairs", multiple=True, help="Extra scenario parameter KEY=VALUE (TOML value)"
    )(func)


def family_option(func: Any) -> Any:
    return click.option(
        "--family", type=click.Path(exists=True, dir_okay=False, path_type=Path), help="Family TOML file"
    )(func)


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Enable verbose logging")
@click.option("--seed", type=int, help="Random seed (overrides scenario and environment)")
@click.option("--tol", type=float, help="Relative tolerance")
@click.option("--degree", type=int, help="Default truncation degree for germs")
@click.option("--threads", type=int, help="Worker-pool size")
@click.option("--out", type=click.Path(file_okay=False, path_type=Path), help="Output directory")
@click.pass_context
def main(
    ctx,
    verbose: bool,
    seed: Optional[int],
    tol: Optional[float],
    degree: Optional[int],
    threads: Optional[int],
    out: Optional[Path],
):
    """
    tangency-lab: a desk-scale laboratory for homoclinic tangencies

    Classify tangency germs, compute saddle data and normal forms, and scan
    Hénon families for scaling laws and moduli, from scenario files or the
    individual commands below.
    """
    log_level = config.get_log_level() if not verbose else "DEBUG"
    level = getattr(logging, log_level, logging.INFO)
    logging.basicConfig(level=level, format="%(asctime)s - %(name)s - %(levelname)s - %(message)s")

    if tol is not None and tol <= 0:
        raise click.BadParameter("tolerance must be positive", param_hint="--tol")
    config.reset_overrides()
    config.override(degree=degree, threads=threads)

    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed
    ctx.obj["tol"] = tol
    ctx.obj["out"] = out
    ctx.obj["threads"] = threads
    ctx.obj["verbose"] = verbose or config.is_debug_mode()


def _execute(ctx, scenario: Scenario, quiet: bool = False) -> RunResult:
    engine = ScenarioEngine(ctx.obj["threads"])
    if quiet:
        return asyncio.run(engine.run(scenario))
    columns = (SpinnerColumn(), TextColumn("[progress.description]{task.description}"))
    with Progress(*columns, console=console) as progress:
        task = progress.add_task(f"Running {scenario.command}...", total=None)
        result = asyncio.run(engine.run(scenario))
        progress.update(task, description=f"{scenario.command} complete!")
    return result


def _show_result(result: RunResult) -> None:
    """Print the artifact table, warnings and item errors of a run."""
    table = Table(title=f"🧪 {result.scenario.command} → {result.scenario.output_dir}")
    table.add_column("File", style="cyan", no_wrap=True)
    table.add_column("Size", justify="right")
    table.add_column("sha256", style="magenta")
    for entry in result.manifest.entries:
        table.add_row(entry.path, str(entry.size), entry.sha256[:16])
    console.print(table)

    if isinstance(result.summary, dict):
        text = json.dumps(to_plain(result.summary), indent=2)[:2000]
        console.print(Panel(text, title="Summary", border_style="blue"))
    for warning in result.warnings:
        console.print(f"⚠️  {warning}", style="yellow")
    for error in result.errors:
        console.print(f"❌ {error.get('error')}: {error.get('message')}", style="red")

    ok = sum(1 for o in result.outcomes if o.ok)
    style = "green" if result.exit_code == 0 else "red"
    console.print(f"✅ {ok}/{len(result.outcomes)} work items completed", style=style)


def _run_operation(ctx, command: str, params: Dict[str, Any], family: Optional[Path] = None) -> None:
    try:
        scenario = build_scenario(command, params, family, ctx.obj["out"], ctx.obj["seed"], ctx.obj["tol"])
        result = _execute(ctx, scenario)
    except LabError as e:
        console.print(f"❌ {type(e).__name__}: {e.message}", style="red")
        ctx.exit(e.exit_code)
    except Exception as e:
        console.print(f"❌ {command} failed: {str(e)}", style="red")
        raise click.Abort()
    _show_result(result)
    ctx.exit(result.exit_code)


@main.command()
@click.argument("scenario_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.pass_context
def run(ctx, scenario_file: Path):
    """
    Run a scenario file.

    SCENARIO_FILE: TOML file with command, family, seed, tol, output and [params]
    """
    try:
        scenario = load_scenario(scenario_file, ctx.obj["seed"], ctx.obj["tol"], ctx.obj["out"])
        console.print(f"🔍 Running scenario {scenario_file} ({scenario.command}, seed {scenario.seed})")
        result = _execute(ctx, scenario)
    except LabError as e:
        console.print(f"❌ {type(e).__name__}: {e.message}", style="red")
        ctx.exit(e.exit_code)
    except Exception as e:
        console.print(f"❌ Scenario failed: {str(e)}", style="red")
        raise click.Abort()
    _show_result(result)
    ctx.exit(result.exit_code)


def _report_table(report: SuiteReport) -> Table:
    status = "[green]PASS[/green]" if report.passed else "[red]FAIL[/red]"
    table = Table(title=f"{report.suite} {status} ({report.duration:.1f}s, seed {report.seed})")
    table.add_column("Criterion", style="cyan")
    table.add_column("Measured", justify="right")
    table.add_column("Tolerance", justify="right")
    table.add_column("Verdict", justify="center")
    table.add_column("Detail", style="yellow")
    for line in report.criteria:
        verdict = "[green]✓[/green]" if line.passed else "[red]✗[/red]"
        measured = f"{line.measured:.6g}" if isinstance(line.measured, float) else str(line.measured)
        detail = line.detail[:60] + "..." if len(line.detail) > 60 else line.detail
        table.add_row(line.name, measured, str(line.tolerance), verdict, detail)
    return table


@main.command()
@click.argument("suite")
@click.option("--json", "as_json", is_flag=True, help="One JSON object per criterion instead of tables")
@click.pass_context
def verify(ctx, suite: str, as_json: bool):
    """
    Run a verification suite (or "all").

    SUITE: Registered suite name, see `tangency-lab suites`
    """
    try:
        selected = get_suites(suite)
    except LabError as e:
        console.print(f"❌ {e.message}", style="red")
        ctx.exit(e.exit_code)

    with config.scoped(rel_tol=ctx.obj["tol"]):
        reports = asyncio.run(run_suites(selected, seed=ctx.obj["seed"], threads=ctx.obj["threads"]))

    for report in reports:
        if as_json:
            for line in report.criteria:
                payload = {"suite": report.suite, "seed": report.seed, **line.model_dump(mode="json")}
                click.echo(json.dumps(to_plain(payload), sort_keys=True))
        else:
            console.print(_report_table(report))

    failed = [r.suite for r in reports if not r.passed]
    if failed:
        if not as_json:
            console.print(f"❌ Failed suites: {', '.join(failed)}", style="red")
        ctx.exit(1)
    if not as_json:
        console.print(f"✅ {len(reports)} suite(s) passed")


@main.command()
def suites():
    """Show the registered verification suites and scenario commands."""
    table = Table(title="🧪 Verification Suites")
    table.add_column("Suite", style="cyan", no_wrap=True)
    table.add_column("Checks", style="green")
    for name, suite in SUITES.items():
        table.add_row(name, suite.description)
    console.print(table)

    console.print("\n📋 Scenario commands:", style="bold blue")
    for name, command in COMMANDS.items():
        console.print(f"  • {name}: {command.description}")


# germ


@main.group()
def germ():
    """Tangency germ classification."""


@germ.command("classify")
@click.argument("expression", required=False)
@click.option(
    "--input",
    "source",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Germ JSON file",
)
@click.option("--speed/--no-speed", default=True, help="Compute speed-exponent blocks")
@click.pass_context
def germ_classify(ctx, expression: Optional[str], source: Optional[Path], speed: bool):
    """
    Classify one germ and print its TangencyRecord as JSON.

    EXPRESSION: Polynomial in lam and t, e.g. "t**3 + lam**2" (or use --input)
    """
    if expression is None and source is None:
        raise click.UsageError("give an EXPRESSION or --input")
    params: Dict[str, Any] = {"speed": speed}
    if source is not None:
        params["input"] = str(source)
    else:
        params["expression"] = expression
    try:
        scenario = build_scenario(
            "germ classify", params, None, ctx.obj["out"], ctx.obj["seed"], ctx.obj["tol"]
        )
        result = _execute(ctx, scenario, quiet=True)
    except LabError as e:
        click.echo(dumps(e.to_dict()), nl=False)
        ctx.exit(e.exit_code)
    click.echo(dumps(result.summary), nl=False)
    ctx.exit(result.exit_code)


# saddle


@main.group()
def saddle():
    """Saddle points, resonances and normal forms."""


@saddle.command("find")
@family_option
@click.option("--parameter", help="Family parameter, e.g. [0.1, -6]")
@click.option("--period", help="Period or range, e.g. 1..4")
@click.option("--point", help="Newton seed [z, w]; without it a grid census is used")
@click.option("--manifold-degree", help="Degree of the manifold germs to attach")
@param_option
@click.pass_context
def saddle_find(ctx, family, parameter, period, point, manifold_degree, pairs):
    """Find and classify periodic points."""
    params = collect_params(
        pairs, parameter=parameter, period=period, seed=point, manifold_degree=manifold_degree
    )
    _run_operation(ctx, "saddle find", params, family)


@saddle.command("resonance")
@click.option("--u", "u", required=True, help="Unstable multiplier")
@click.option("--s", "s", required=True, help="Stable multiplier")
@click.option("--k", "k", help="Maximal order a + b")
@param_option
@click.pass_context
def saddle_resonance(ctx, u, s, k, pairs):
    """Scan u^a s^b = 1 up to order k."""
    _run_operation(ctx, "saddle resonance", collect_params(pairs, u=u, s=s, k=k))


@saddle.command("normal-form")
@family_option
@click.option("--parameter", help="Family parameter")
@click.option("--point", help="Saddle seed [z, w] for Hénon families")
@click.option("--period", help="Saddle period")
@click.option("--k", "k", help="Normal form order")
@param_option
@click.pass_context
def saddle_normal_form(ctx, family, parameter, point, period, k, pairs):
    """Normal form and zero-slope section of a saddle germ."""
    params = collect_params(pairs, parameter=parameter, seed=point, period=period, k=k)
    _run_operation(ctx, "saddle normal-form", params, family)


# bidisk


@main.group()
def bidisk():
    """Riemann-Hurwitz checks and horseshoe charts."""


@bidisk.command("rh-check")
@click.option("--trials", help="Number of random trials")
@click.option("--max-degree", help="Largest horizontal degree")
@param_option
@click.pass_context
def bidisk_rh_check(ctx, trials, max_degree, pairs):
    """Randomized tangency-count bound d - 1."""
    _run_operation(ctx, "bidisk rh-check", collect_params(pairs, trials=trials, max_degree=max_degree))


@bidisk.command("horseshoe")
@click.option("--a", "a", help="Jacobian parameter a")
@click.option("--c", "c", help="Parameter c")
@click.option("--radius", help="Bidisk radius")
@click.option("--length", help="Itinerary length of the stable graphs")
@click.option("--periods", help="Census periods, e.g. 1..4")
@param_option
@click.pass_context
def bidisk_horseshoe(ctx, a, c, radius, length, periods, pairs):
    """Stable-graph chart and periodic census of f_{a,c}."""
    params = collect_params(pairs, a=a, c=c, radius=radius, length=length, periods=periods)
    _run_operation(ctx, "bidisk horseshoe", params)


# scan


@main.group()
def scan():
    """Tangency detection, scaling fits, continuation and moduli."""


@scan.command("tangency")
@family_option
@click.option("--unstable", help="x = F(lam, y) as a polynomial expression")
@click.option("--stable", help="x = G(lam, y) as a polynomial expression")
@click.option("--window", help="Parameter disk [re, im, radius]")
@param_option
@click.pass_context
def scan_tangency(ctx, family, unstable, stable, window, pairs):
    """Tangencies between two parametric graphs in a parameter window."""
    params = collect_params(pairs, unstable=_quoted(unstable), stable=_quoted(stable), window=window)
    _run_operation(ctx, "scan tangency", params, family)


@scan.command("scaling")
@family_option
@click.option("--n", "n", help="Index range, e.g. 5..25")
@click.option("--u", "u", help="Multiplier of the toy pull-backs")
@click.option("--sigma", help="Speed exponent for the fit target")
@click.option("--all-branches", is_flag=True, default=None, help="Keep every branch per index")
@param_option
@click.pass_context
def scan_scaling(ctx, family, n, u, sigma, all_branches, pairs):
    """Secondary tangency sequence and its scaling fit."""
    params = collect_params(pairs, n=_quoted(n), u=u, sigma=sigma)
    if all_branches:
        params["all_branches"] = True
    _run_operation(ctx, "scan scaling", params, family)


@scan.command("continue")
@family_option
@click.option("--kind", type=click.Choice(["tangency", "segment", "multiplier"]), help="Constraint kind")
@click.option("--step", help="Predictor step")
@click.option("--samples", help="Number of samples")
@param_option
@click.pass_context
def scan_continue(ctx, family, kind, step, samples, pairs):
    """Pseudo-arclength continuation of a constraint curve."""
    params = collect_params(pairs, step=step, samples=samples)
    if kind is not None:
        params["kind"] = kind
    _run_operation(ctx, "scan continue", params, family)


@scan.command("moduli")
@family_option
@click.option("--start", help="Start parameter [a, c]")
@click.option("--end", help="End parameter [a, c]; without it a single probe is made")
@click.option("--point", help="Saddle seed [z, w]")
@click.option("--period", help="Saddle period")
@param_option
@click.pass_context
def scan_moduli(ctx, family, start, end, point, period, pairs):
    """Moduli ln|u| / ln|s| along a segment, or at one parameter."""
    params = collect_params(pairs, start=start, end=end, seed=point, period=period)
    _run_operation(ctx, "scan moduli", params, family)


@scan.command("type-change")
@family_option
@click.option("--axes", help="Grid axes [[start, stop, count], ...]")
@click.option("--max-period", help="Largest tracked period")
@param_option
@click.pass_context
def scan_type_change(ctx, family, axes, max_period, pairs):
    """Type changes of periodic points over a real parameter grid."""
    _run_operation(ctx, "scan type-change", collect_params(pairs, axes=axes, max_period=max_period), family)


def _quoted(text: Optional[str]) -> Optional[str]:
    """Keep expressions as strings through the TOML value parser."""
    return None if text is None else json.dumps(text)


if __name__ == "__main__":
    main()
