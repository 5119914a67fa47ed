"""Command line interface.

Exit status is 0 for a definitive answer, 2 when a search ran out of
budget, and 1 on errors.  Inputs default to standard input so commands
chain with pipes, e.g. ``wangtrans catalog example1 | wangtrans power --k 2``.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from . import catalog, certify, formats, kari, loops, turing
from .core import BudgetExceeded, compose, from_tileset, set_threads, trim

EXIT_OK, EXIT_ERROR, EXIT_UNKNOWN = 0, 1, 2


class Unknown(Exception):
    """A bounded search ended without an answer."""


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _emit(text: str) -> None:
    click.echo(text, nl=False)


def _transducer(path: str):
    return formats.read_transducer(_read(path))


def _tileset_or_transducer(path: str):
    text = _read(path)
    if formats.kind_of(text) == "tileset":
        return formats.parse_tileset(text)
    return formats.parse_transducer(text)


@click.group()
@click.option("--threads", type=int, default=1, show_default=True, help="Worker threads for composition.")
def main(threads: int) -> None:
    """Wang tilesets as transducers."""
    set_threads(threads)


# --------------------------------------------------------------------------
# algebra


@main.command("compose")
@click.argument("lower")
@click.argument("upper")
def compose_cmd(lower: str, upper: str) -> None:
    """Stack UPPER on LOWER (tilesets or transducers)."""
    _emit(formats.serialize_transducer(compose(_transducer(lower), _transducer(upper))))


@main.command("power")
@click.option("--k", "k", type=int, required=True)
@click.option("--trim/--no-trim", "do_trim", default=False)
@click.option("--no-cache", is_flag=True, help="Compute without reading or writing the disk cache.")
@click.argument("source", default="-")
def power_cmd(k: int, do_trim: bool, no_cache: bool, source: str) -> None:
    """K-th power of a tileset or transducer."""
    from .cache import cached_power

    t = _transducer(source)
    if k == 1 and not do_trim:
        _emit(formats.serialize_transducer(t))
        return
    _emit(formats.serialize_transducer(cached_power(t, k, do_trim, use_cache=not no_cache)))


@main.command("trim")
@click.argument("source", default="-")
def trim_cmd(source: str) -> None:
    """Drop edges that lie on no bi-infinite path."""
    _emit(formats.serialize_transducer(trim(_transducer(source))))


@main.command("loops")
@click.option("--kind", type=click.Choice(["any", "cyclic", "periodic"]), default="any", show_default=True)
@click.option("--max-order", type=int, default=8, show_default=True)
@click.argument("source", default="-")
def loops_cmd(kind: str, max_order: int, source: str) -> None:
    """Find a loop; prints it with its class, or 'none'."""
    t = _transducer(source)
    complete = True
    if kind == "any":
        loop = loops.find_loop(t)
    elif kind == "periodic":
        loop = loops.find_periodic_loop(t, max_order)
        complete = t.is_plain
    else:
        loop = loops.find_periodic_loop(t, max_order) if t.is_plain else None
        if loop is None:
            loop = certify.find_cyclic_loop(t, max_order, 100000)
        complete = False
    if loop is None:
        click.echo("none")
        if not complete:
            raise Unknown(f"no {kind} loop up to order {max_order}")
        return
    _emit(formats.serialize_loop(loop))
    click.echo(f"# class {loops.classify_loop(loop)}")


# --------------------------------------------------------------------------
# certificates and the driver


def _certificate(ref: str):
    if ref.startswith("builtin:"):
        return certify.builtin_certificate(ref.split(":", 1)[1])
    path = Path(ref)
    return formats.parse_certificate(path.read_text(), base_dir=path.parent)


@main.command("certify")
@click.argument("cert_arg", required=False)
@click.option("--cert", "cert_opt", help="Certificate file or builtin:NAME.")
@click.option("--n-max", type=int, default=3, show_default=True)
def certify_cmd(cert_arg: str | None, cert_opt: str | None, n_max: int) -> None:
    """Bounded verification of a robustness certificate."""
    ref = cert_opt or cert_arg
    if ref is None:
        raise click.UsageError("give a certificate (file or builtin:NAME)")
    report = certify.verify_certificate(_certificate(ref), n_max)
    _emit(report.text())
    if not report.ok:
        sys.exit(EXIT_ERROR)


@main.command("domino")
@click.option("--budget", type=int, default=10**6, show_default=True, help="Edge budget for any single power.")
@click.option("--max-height", type=int, default=30, show_default=True)
@click.option("--cert", "cert_ref", help="Certificate file or builtin:NAME.")
@click.option("--cert-n-max", type=int, default=3, show_default=True)
@click.option("--witness", type=click.Path(dir_okay=False), help="Write the periodic witness loop here.")
@click.argument("source", default="-")
def domino_cmd(budget: int, max_height: int, cert_ref: str | None, cert_n_max: int, witness: str | None, source: str) -> None:
    """Run the domino semi-decision procedures."""
    t = _transducer(source)
    cert = _certificate(cert_ref) if cert_ref else None
    b = certify.StepBudget(max_height=max_height, max_edges=budget, cert_n_max=cert_n_max)
    v = certify.domino_driver(t, b, cert)
    click.echo(v.line())
    if isinstance(v, certify.CertificateVerified):
        _emit(v.report.text())
    if isinstance(v, certify.PeriodicTiling) and witness:
        Path(witness).write_text(formats.serialize_loop(v.loop))
    if isinstance(v, certify.Unknown):
        sys.exit(EXIT_UNKNOWN)


# --------------------------------------------------------------------------
# rendering


@main.command("render")
@click.option("--loop", "loop_path", required=True)
@click.option("--reps", type=int, default=1, show_default=True)
@click.option("--svg", is_flag=True)
@click.option("--tileset", "tileset_ref", help="Base tileset (needed for loops of height > 1).")
@click.option("--png", type=click.Path(dir_okay=False), help="Also draw the pattern to this PNG file.")
def render_cmd(loop_path: str, reps: int, svg: bool, tileset_ref: str | None, png: str | None) -> None:
    """Draw the strip of a loop as text or SVG."""
    from .render import pattern_figure, render_pattern

    loop = formats.parse_loop(_read(loop_path))
    if tileset_ref:
        base = certify.resolve_tileset(tileset_ref)
    elif loop.height == 1:
        base = _plain_from_loop(loop)
    else:
        raise click.UsageError("loops of height > 1 need --tileset to fill in the inner colors")
    pattern = loops.loop_to_strip(loop, reps, base)
    sys.stdout.buffer.write(render_pattern(pattern, "svg" if svg else "text"))
    if png:
        pattern_figure(pattern, Path(png))


def _plain_from_loop(loop):
    from .core import MetaTransducer

    return MetaTransducer.make(loop.edges, height=1)


# --------------------------------------------------------------------------
# compilers


@main.command("kari-compile")
@click.option("--map", "map_path", required=True)
@click.option("--bound", type=int, required=True, help="Largest denominator swept.")
def kari_compile_cmd(map_path: str, bound: int) -> None:
    """Kari tileset of a piecewise affine map."""
    m = formats.parse_map(_read(map_path))
    _emit(formats.serialize_tileset(kari.tau_f(m, bound)))


@main.command("tm-compile")
@click.option("--machine", "machine_path", required=True)
@click.option("--bound", type=int, required=True, help="Largest denominator swept.")
def tm_compile_cmd(machine_path: str, bound: int) -> None:
    """Tileset of a Turing machine through its affine encoding."""
    m = formats.parse_machine(_read(machine_path))
    _emit(formats.serialize_tileset(turing.tm_to_tileset(m, bound)))


# --------------------------------------------------------------------------
# catalog and benchmark

CATALOG_HELP = (
    "example1, robinson, jeandel-rao, robinson-H-<n>, jr-T-<n>, kari-example, "
    "machine:<two-step|bb2|mover|idle>, cert:<robinson|jr|periodic-example1>, appendix-loop-<1..5>, appendix-periodic"
)


def catalog_text(name: str) -> str:
    if name == "example1":
        return formats.serialize_tileset(catalog.example1())
    if name == "robinson":
        return formats.serialize_transducer(catalog.robinson())
    if name in ("jeandel-rao", "jr"):
        return formats.serialize_tileset(catalog.jeandel_rao())
    if name.startswith("robinson-H-"):
        return formats.serialize_transducer(catalog.robinson_H(int(name.rsplit("-", 1)[1])))
    if name.startswith("jr-T-"):
        return formats.serialize_transducer(catalog.jr_T(int(name.rsplit("-", 1)[1])))
    if name == "kari-example":
        return formats.serialize_map(kari.kari_example())
    if name.startswith("machine:"):
        key = name.split(":", 1)[1]
        if key not in turing.SAMPLE_MACHINES:
            raise click.UsageError(f"unknown machine {key!r}")
        return formats.serialize_machine(turing.SAMPLE_MACHINES[key]())
    if name.startswith("cert:"):
        return formats.serialize_certificate(certify.builtin_certificate(name.split(":", 1)[1]))
    if name.startswith("appendix-loop-"):
        i = int(name.rsplit("-", 1)[1])
        return formats.serialize_loop(catalog.appendix_fixtures().loops[i - 1])
    if name == "appendix-periodic":
        return formats.serialize_loop(catalog.appendix_fixtures().periodic)
    raise click.UsageError(f"unknown catalog entry {name!r}; try {CATALOG_HELP}")


@main.command("catalog", help=f"Print a builtin object: {CATALOG_HELP}.")
@click.argument("name")
def catalog_cmd(name: str) -> None:
    _emit(catalog_text(name))


@main.command("bench")
@click.option("--tileset", "source", required=True, help="Tileset/transducer file or builtin:NAME.")
@click.option("--k-max", type=int, required=True)
@click.option("--max-edges", type=int, default=2_000_000, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), help="Write bench.csv with timings and bench.png here.")
def bench_cmd(source: str, k_max: int, max_edges: int, out_dir: str | None) -> None:
    """Sizes of trimmed powers up to K-MAX; timings go to stderr and --out."""
    from .bench import HEADER, bench_iter
    from .render import bench_figure

    if source.startswith("builtin:"):
        t = certify.resolve_tileset(source)
        name = source.split(":", 1)[1]
    else:
        text = _read(source)
        t = formats.read_transducer(text)
        name = formats.parse_tileset(text).name if formats.kind_of(text) == "tileset" else Path(source).stem
    click.echo(HEADER)
    records = []
    for r in bench_iter(name, t, k_max, max_edges):
        records.append(r)
        click.echo(r.row())
        click.echo(f"k={r.k} seconds={r.seconds:.3f}", err=True)
    if out_dir:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "bench.csv").write_text("\n".join([HEADER + ",seconds"] + [r.row(timing=True) for r in records]) + "\n")
        bench_figure(records, out / "bench.png", title=name)


def run(argv: list[str] | None = None) -> int:
    """Entry point returning the exit status instead of exiting."""
    try:
        main.main(args=argv, prog_name="wangtrans", standalone_mode=False)
    except Unknown as exc:
        click.echo(f"unknown: {exc}", err=True)
        return EXIT_UNKNOWN
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return EXIT_ERROR
    except SystemExit as exc:
        return int(exc.code or 0)
    except (formats.ParseError, ValueError, KeyError, OSError, BudgetExceeded) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_ERROR
    return EXIT_OK


def entry() -> None:
    sys.exit(run())


if __name__ == "__main__":
    entry()
