"""CLI entry point for nclebesgue."""

from __future__ import annotations

import concurrent.futures
import logging
import sys
from collections.abc import Callable
from pathlib import Path
from typing import Any

import click
from pydantic import ValidationError

from nclebesgue import __version__
from nclebesgue.core.config import AppConfig, ConfigManager, SpinChainConfigModel
from nclebesgue.core.exceptions import NcLebesgueError, PipelineError
from nclebesgue.core.health import HealthChecker
from nclebesgue.core.instance import build_instance, dump_instance, load_instance
from nclebesgue.core.pipeline import PipelineConfig, PipelineEngine
from nclebesgue.core.registry import ComponentRegistry
from nclebesgue.core.run_log import run_log_context
from nclebesgue.core.schema import PipelineContext, Report
from nclebesgue.generation.spinchain import generate_spinchain
from nclebesgue.reporters import register_builtin_reporters
from nclebesgue.stages import register_builtin_stages
from nclebesgue.utils import resolve_tolerance

log = logging.getLogger(__name__)

#: Exit code for failures that are not input errors or negative verdicts.
INTEGRITY_EXIT = 3


def _load_config(project_root: Path | None = None) -> tuple[ConfigManager, ComponentRegistry]:
    """Load configuration and register built-in stages and reporters."""
    config = ConfigManager(project_root=project_root)
    config.load()
    registry = ComponentRegistry()
    register_builtin_stages(registry)
    register_builtin_reporters(registry)
    return config, registry


def _exit_code(exc: BaseException) -> int:
    """Exit code carried by an exception, looking through PipelineError to its cause."""
    if isinstance(exc, PipelineError) and isinstance(exc.__cause__, NcLebesgueError):
        return exc.__cause__.exit_code
    if isinstance(exc, NcLebesgueError):
        return exc.exit_code
    if isinstance(exc, ValidationError):
        return 2
    return INTEGRITY_EXIT


def _error_message(exc: BaseException) -> str:
    if isinstance(exc, PipelineError) and exc.__cause__ is not None:
        return str(exc.__cause__)
    return str(exc)


def _common_options(func: Callable[..., Any]) -> Callable[..., Any]:
    """Tolerance, output and logging flags shared by the analysis commands."""
    options = [
        click.option("--tol-rank", type=float, default=None, help="Relative rank cutoff (overrides config)."),
        click.option("--tol-eq", type=float, default=None, help="Absolute equality tolerance."),
        click.option("--tol-psd", type=float, default=None, help="Relative PSD slack."),
        click.option("--beta", type=float, default=None, help="Inverse temperature (overrides the instance)."),
        click.option(
            "--output", "output_format", type=click.Choice(["json", "text"]), default=None,
            help="Report format on stdout (default: from config).",
        ),
        click.option("--report", "report_path", type=click.Path(path_type=Path), help="Also write the report here."),
        click.option("--verbose", "-v", is_flag=True, help="Debug logging on the console."),
        click.option("--log-file", type=click.Path(path_type=Path), help="Write the run log to this file."),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _pair_options(func: Callable[..., Any]) -> Callable[..., Any]:
    func = click.option("--lambda", "lambda_name", default="lambda", show_default=True, help="Reference state.")(func)
    func = click.option("--mu", "mu_name", default="mu", show_default=True, help="State to decompose.")(func)
    return func


def _execute(
    path: Path,
    command: str,
    stages: list[str],
    cfg: AppConfig,
    registry: ComponentRegistry,
    *,
    mu_name: str | None = None,
    lambda_name: str | None = None,
    tolerances: dict[str, float | None] | None = None,
    beta: float | None = None,
    skip_stages: list[str] | None = None,
    stop_on_failure: bool = True,
    require_dynamics: bool = False,
) -> tuple[Report, int]:
    """Load ``path``, run ``stages`` and return the report with its exit code.

    Errors are turned into a report whose summary carries the message and the error's exit code.
    """
    try:
        inst = load_instance(path)
        tol = resolve_tolerance(cfg, inst, **(tolerances or {}))
        loaded = build_instance(inst, tol, beta)
        if require_dynamics:
            loaded.require_dynamics()
        context = PipelineContext(
            instance=loaded,
            instance_name=path.name,
            mu_name=mu_name,
            lambda_name=lambda_name,
            tolerance=tol,
            config={"witness_terms": cfg.witness.n_terms},
        )
        engine = PipelineEngine(
            registry,
            PipelineConfig(stages=stages, skip_stages=skip_stages or [], stop_on_failure=stop_on_failure),
        )
        result = engine.run(context)
    except Exception as e:
        code = _exit_code(e)
        if code == INTEGRITY_EXIT and not isinstance(e, NcLebesgueError):
            log.exception("unexpected failure on %s", path)
        else:
            log.error("%s: %s", path.name, _error_message(e))
        report = Report(
            command=command,
            summary={"exit_code": code, "passed": False, "error": _error_message(e)},
        )
        return report, code
    return result.to_report(command), result.exit_code


def _emit(
    report: Report,
    code: int,
    cfg: AppConfig,
    registry: ComponentRegistry,
    output_format: str | None,
    report_path: Path | None,
) -> None:
    """Print the report, optionally write it to a file, and exit with ``code``."""
    fmt = output_format or cfg.report.output
    reporter = registry.get_reporter(fmt, digits=cfg.report.float_digits, floor=cfg.report.zero_floor)
    error = report.summary.get("error")
    if error and not report.sections:
        click.echo(f"error: {error}", err=True)
    click.echo(reporter.render(report), nl=False)
    if report_path is not None:
        reporter.write(report, report_path)
    sys.exit(code)


def _run_command(
    ctx: click.Context,
    command: str,
    path: Path,
    stages: list[str],
    params: dict[str, Any],
    **kwargs: Any,
) -> None:
    config, registry = ctx.obj
    cfg = config.config
    if params["verbose"]:
        logging.basicConfig(level=logging.DEBUG, format="%(name)s %(levelname)s: %(message)s")
    tolerances = {"rank_rel": params["tol_rank"], "eq_abs": params["tol_eq"], "psd_slack": params["tol_psd"]}
    with run_log_context(params["log_file"], params["verbose"]):
        report, code = _execute(
            path, command, stages, cfg, registry, tolerances=tolerances, beta=params["beta"], **kwargs
        )
    _emit(report, code, cfg, registry, params["output_format"], params["report_path"])


@click.group()
@click.version_option(version=__version__)
@click.pass_context
def main(ctx: click.Context) -> None:
    """nclebesgue: Lebesgue decomposition and Radon-Nikodym derivatives for finite-dimensional C*-algebras."""
    if ctx.obj is None:
        try:
            ctx.obj = _load_config()
        except NcLebesgueError as e:
            click.echo(f"error: {e}", err=True)
            sys.exit(e.exit_code)


@main.command()
@click.option("--verbose", "-v", is_flag=True, help="Show the message of every check.")
@click.pass_context
def check(ctx: click.Context, verbose: bool) -> None:
    """Run self tests of the numerical kernels on tiny known cases."""
    config, registry = ctx.obj
    checker = HealthChecker(config=config, registry=registry)
    results = checker.check_all()
    for r in results:
        status = "OK" if r.ok else "FAIL"
        click.echo(f"  {r.name}: {status}")
        if verbose or not r.ok:
            click.echo(f"    {r.message}")
        if not r.ok and r.suggestion:
            click.echo(f"    → {r.suggestion}")
    if all(r.ok for r in results):
        click.echo("All checks passed.")
    else:
        click.echo("Some checks failed. Fix the issues above or follow the suggested steps.", err=True)
        raise SystemExit(1)


@main.command()
@click.argument("file", type=click.Path(path_type=Path, exists=True, dir_okay=False))
@_common_options
@click.pass_context
def info(ctx: click.Context, file: Path, **params: Any) -> None:
    """Algebra, commutant and center dimensions, and a summary of every state."""
    _run_command(ctx, f"info {file.name}", file, ["info"], params)


@main.command()
@click.argument("file", type=click.Path(path_type=Path, exists=True, dir_okay=False))
@_pair_options
@_common_options
@click.pass_context
def decompose(ctx: click.Context, file: Path, mu_name: str, lambda_name: str, **params: Any) -> None:
    """Split MU into absolutely continuous and singular parts relative to LAMBDA."""
    _run_command(
        ctx,
        f"decompose {file.name} --mu {mu_name} --lambda {lambda_name}",
        file,
        ["decompose"],
        params,
        mu_name=mu_name,
        lambda_name=lambda_name,
    )


@main.command()
@click.argument("file", type=click.Path(path_type=Path, exists=True, dir_okay=False))
@_pair_options
@_common_options
@click.pass_context
def derivative(ctx: click.Context, file: Path, mu_name: str, lambda_name: str, **params: Any) -> None:
    """Radon-Nikodym derivative of MU with respect to LAMBDA (exit 1 if not absolutely continuous)."""
    _run_command(
        ctx,
        f"derivative {file.name} --mu {mu_name} --lambda {lambda_name}",
        file,
        ["derivative"],
        params,
        mu_name=mu_name,
        lambda_name=lambda_name,
    )


@main.command()
@click.argument("file", type=click.Path(path_type=Path, exists=True, dir_okay=False))
@click.option("--lambda", "lambda_name", default="lambda", show_default=True, help="State to test.")
@_common_options
@click.pass_context
def kms(ctx: click.Context, file: Path, lambda_name: str, **params: Any) -> None:
    """KMS residual, time invariance and Gibbs comparison of LAMBDA (exit 1 if not KMS)."""
    _run_command(
        ctx,
        f"kms {file.name} --lambda {lambda_name}",
        file,
        ["kms"],
        params,
        lambda_name=lambda_name,
        require_dynamics=True,
    )


@main.command()
@click.argument("file", type=click.Path(path_type=Path, exists=True, dir_okay=False))
@_pair_options
@click.option("--stages", "stages_list", help="Comma-separated stages (default: from config).")
@click.option("--skip-stages", help="Comma-separated stages to skip.")
@click.option("--no-stop-on-failure", is_flag=True, help="Keep going after a stage error.")
@_common_options
@click.pass_context
def run(
    ctx: click.Context,
    file: Path,
    mu_name: str,
    lambda_name: str,
    stages_list: str | None,
    skip_stages: str | None,
    no_stop_on_failure: bool,
    **params: Any,
) -> None:
    """Run the configured stage pipeline (info, decompose, derivative, kms) on one instance."""
    cfg = ctx.obj[0].config
    stages = _split(stages_list) or list(cfg.pipeline.stages)
    skip = _split(skip_stages) + list(cfg.pipeline.skip_stages)
    _run_command(
        ctx,
        f"run {file.name} --mu {mu_name} --lambda {lambda_name}",
        file,
        stages,
        params,
        mu_name=mu_name,
        lambda_name=lambda_name,
        skip_stages=skip,
        stop_on_failure=not no_stop_on_failure and cfg.pipeline.stop_on_failure,
    )


def _split(value: str | None) -> list[str]:
    return [s.strip() for s in (value or "").split(",") if s.strip()]


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(path_type=Path, exists=True, dir_okay=False))
@_pair_options
@click.option("--stages", "stages_list", help="Comma-separated stages (default: from config).")
@click.option("--workers", type=int, default=None, help="Concurrent files (default: from config).")
@_common_options
@click.pass_context
def batch(
    ctx: click.Context,
    files: tuple[Path, ...],
    mu_name: str,
    lambda_name: str,
    stages_list: str | None,
    workers: int | None,
    **params: Any,
) -> None:
    """Run the stage pipeline over several instance files; exits with the largest exit code."""
    config, registry = ctx.obj
    cfg = config.config
    stages = _split(stages_list) or list(cfg.pipeline.stages)
    workers = workers or cfg.batch.workers
    if params["verbose"]:
        logging.basicConfig(level=logging.DEBUG, format="%(name)s %(levelname)s: %(message)s")
    tolerances = {"rank_rel": params["tol_rank"], "eq_abs": params["tol_eq"], "psd_slack": params["tol_psd"]}

    def one(path: Path) -> tuple[Report, int]:
        return _execute(
            path,
            f"run {path.name} --mu {mu_name} --lambda {lambda_name}",
            stages,
            cfg,
            registry,
            mu_name=mu_name,
            lambda_name=lambda_name,
            tolerances=tolerances,
            beta=params["beta"],
            skip_stages=list(cfg.pipeline.skip_stages),
        )

    with run_log_context(params["log_file"], params["verbose"]):
        with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
            outcomes = list(executor.map(one, files))

    codes = {path.name: code for path, (_, code) in zip(files, outcomes, strict=True)}
    worst = max(codes.values())
    report = Report(
        command=f"batch {' '.join(p.name for p in files)}",
        sections={path.name: r.model_dump() for path, (r, _) in zip(files, outcomes, strict=True)},
        summary={"exit_code": worst, "passed": worst == 0, "files": codes},
    )
    _emit(report, worst, cfg, registry, params["output_format"], params["report_path"])


@main.command()
@click.option("--sites", "-L", type=int, required=True, help="Number of spins (2^L <= 64).")
@click.option("--model", type=click.Choice(["ising", "heisenberg", "xy"]), default=None, help="Coupling type.")
@click.option("--coupling", type=float, default=None, help="Nearest-neighbour coupling strength.")
@click.option("--field", type=float, default=None, help="Field strength.")
@click.option("--beta", type=float, default=None, help="Inverse temperature of the Gibbs state.")
@click.option("--perturbation", type=float, default=None, help="Weight of the random part of mu.")
@click.option("--seed", type=int, default=None, help="Seed for the random part of mu.")
@click.option(
    "--algebra", type=click.Choice(["full", "local"]), default="full", show_default=True,
    help="Full matrix algebra or the algebra generated by the local terms.",
)
@click.option("--out", "out_path", type=click.Path(path_type=Path), help="Write the instance here instead of stdout.")
@click.pass_context
def spinchain(
    ctx: click.Context,
    sites: int,
    model: str | None,
    coupling: float | None,
    field: float | None,
    beta: float | None,
    perturbation: float | None,
    seed: int | None,
    algebra: str,
    out_path: Path | None,
) -> None:
    """Generate an instance file for an open spin chain with a Gibbs state and a perturbed state."""
    cfg = ctx.obj[0].config
    overrides = {
        key: value
        for key, value in {
            "model": model,
            "coupling": coupling,
            "field": field,
            "beta": beta,
            "perturbation": perturbation,
            "seed": seed,
        }.items()
        if value is not None
    }
    try:
        settings = SpinChainConfigModel.model_validate({**cfg.spinchain.model_dump(), **overrides})
        text = dump_instance(generate_spinchain(sites, settings, algebra=algebra))
    except NcLebesgueError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(e.exit_code)
    except ValidationError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    if out_path is None:
        click.echo(text, nl=False)
    else:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(text, encoding="utf-8")
        click.echo(f"Wrote {out_path}")


if __name__ == "__main__":
    main()
