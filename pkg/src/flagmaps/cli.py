"""Command line interface: ``flagmap <command> ...``.

Exit status is 0 on success, 1 when a check finds a mismatch and 2 on bad input.
"""

from __future__ import annotations

import functools
import sys
import time
from pathlib import Path

import click

from . import operations as ops
from .atlas import (
    TABLE1,
    atlas_tsv,
    classify,
    generate_atlas,
    maps_tsv,
    run_pipeline,
    surface_name,
    verify_expectations,
    verify_table1,
)
from .errors import FlagMapError, ParseError
from .flagcore import are_isomorphic, map_code, petrie_lengths, summarize, zigzag2_lengths
from .formats import (
    load_flagmap,
    load_seeds,
    read_groups,
    read_marking,
    write_flagmap,
    write_marking,
    write_seeds,
    write_typegraph,
)
from .groups import closure, search_gensets, seed_map
from .symmetry import automorphisms, symmetry_class
from .typegraphs import enumerate_type_graphs

DEFAULT_CATALOG = Path(__file__).parent / "data" / "appendix_seeds.txt"


class Mismatch(Exception):
    pass


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Mismatch as exc:
            if str(exc):
                click.echo(str(exc), err=True)
            sys.exit(1)
        except (FlagMapError, OSError, ValueError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _find_seed(catalog: str, name: str):
    for s in load_seeds(catalog):
        if s.name == name:
            return s
    raise ParseError(f"no seed named {name!r} in {catalog}")


workers_opt = click.option("-j", "--workers", type=click.IntRange(min=1), default=1, show_default=True, help="Worker processes.")
catalog_opt = click.option("--catalog", type=click.Path(exists=True, dir_okay=False), default=str(DEFAULT_CATALOG), show_default=False, help="SEEDS 1 catalog (default: the bundled one).")


@click.group()
@click.version_option(package_name="artifact")
def main() -> None:
    """Maps on surfaces as flag systems."""


@main.command("validate")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--allow-multi-edges", is_flag=True, help="Accept flags with s_i(f) = s_j(f).")
@_guard
def validate_cmd(file: str, allow_multi_edges: bool) -> None:
    """Check the flag-system invariants of a FLAGMAP file."""
    try:
        load_flagmap(file, allow_multi_edges)
    except FlagMapError as exc:
        click.echo(f"invalid: {exc}")
        raise Mismatch() from exc
    click.echo("valid")


@main.command("info")
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--recover", is_flag=True, help="For 14-orbit {3,7} maps, also recover the seed map.")
@_guard
def info_cmd(file: str, recover: bool) -> None:
    """Summary, symmetry and invariants of a map."""
    fs = load_flagmap(file)
    s = summarize(fs)
    aut = automorphisms(fs)
    click.echo(f"flags {fs.n}")
    click.echo(f"v {s.v}  e {s.e}  f {s.f}  chi {s.chi}")
    click.echo(f"surface {surface_name(s.chi, s.orientable)} ({'orientable' if s.orientable else 'non-orientable'})")
    sch = s.schlafli
    click.echo("type " + (f"{{{sch[0]},{sch[1]}}}" if sch else "not equivelar"))
    click.echo(f"automorphisms {aut.order}  flag orbits {aut.orbit_count}")
    click.echo(f"class {symmetry_class(fs)}")
    click.echo("petrie " + " ".join(map(str, sorted(set(petrie_lengths(fs))))))
    click.echo("zigzag2 " + " ".join(map(str, sorted(set(zigzag2_lengths(fs))))))
    click.echo(f"code {map_code(fs)}")
    if recover:
        rep = classify(fs)
        if rep.seed_map is None:
            click.echo("seed not recovered")
        else:
            ms = summarize(rep.seed_map)
            click.echo(f"seed flags {rep.seed_map.n} chi {ms.chi} class {symmetry_class(rep.seed_map)} round-trip {rep.round_trip}")


def _read_sites(path: str) -> list[int]:
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines or lines[0] != "SITES 1":
        raise ParseError("expected 'SITES 1' header")
    try:
        return [int(t) - 1 for ln in lines[1:] for t in ln.split()]
    except ValueError as exc:
        raise ParseError("site flags must be integers") from exc


def _write_sites(sites: list[int]) -> str:
    return "SITES 1\n" + " ".join(str(s + 1) for s in sites) + "\n"


OPS = ["dual", "petrial", "truncate", "untruncate", "collapse", "uncollapse", "rebelt", "unrebelt"]


@main.command("op")
@click.argument("name", type=click.Choice(OPS))
@click.argument("file", type=click.Path(exists=True, dir_okay=False))
@click.option("--marking", type=click.Path(dir_okay=False), help="Edge marking: written by truncate, read by unrebelt.")
@click.option("--sites", type=click.Path(dir_okay=False), help="Splitting sites: written by collapse, read by uncollapse.")
@click.option("--choice", type=click.IntRange(min=1), default=1, show_default=True, help="Which candidate for untruncate/collapse/rebelt.")
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Output FLAGMAP file (default stdout).")
@_guard
def op_cmd(name: str, file: str, marking: str | None, sites: str | None, choice: int, output: str | None) -> None:
    """Apply a map operation."""
    fs = load_flagmap(file)
    if name == "dual":
        out = ops.dual(fs)
    elif name == "petrial":
        out = ops.petrial(fs)
    elif name == "truncate":
        out, inh = ops.truncate(fs)
        if marking:
            Path(marking).write_text(write_marking(inh))
    elif name == "untruncate":
        cands = list(ops.untruncations(fs))
        if len(cands) < choice:
            raise Mismatch(f"{len(cands)} preimages under truncation")
        out = cands[choice - 1]
    elif name == "collapse":
        cands = ops.collapse_candidates(fs)
        if len(cands) < choice:
            raise Mismatch(f"{len(cands)} collapsible triangle families")
        out, used = ops.collapse_with_sites(fs, cands[choice - 1])
        if sites:
            Path(sites).write_text(_write_sites(used))
    elif name == "uncollapse":
        if not sites:
            raise click.UsageError("uncollapse needs --sites")
        out = ops.uncollapse(fs, _read_sites(sites))
    elif name == "rebelt":
        cands = ops.belt_candidates(fs)
        if len(cands) < choice:
            raise Mismatch(f"{len(cands)} belt decompositions")
        out = ops.rebelt(fs, cands[choice - 1])
    else:
        if not marking:
            raise click.UsageError("unrebelt needs --marking")
        out = ops.unrebelt(fs, read_marking(Path(marking).read_text()))
    _emit(write_flagmap(out), output)


@main.command("build-seed")
@click.argument("catalog", type=click.Path(exists=True, dir_okay=False))
@click.option("--name", required=True, help="Seed name.")
@click.option("-o", "--output", type=click.Path(dir_okay=False))
@_guard
def build_seed_cmd(catalog: str, name: str, output: str | None) -> None:
    """Build the 2-orbit seed map of a catalog entry."""
    seed = _find_seed(catalog, name)
    _emit(write_flagmap(seed_map(seed, check_order=True).fs), output)


@main.command("pipeline")
@click.argument("catalog", type=click.Path(exists=True, dir_okay=False))
@click.option("--name", required=True, help="Seed name.")
@click.option("-o", "--output", "outdir", required=True, type=click.Path(file_okay=False))
@_guard
def pipeline_cmd(catalog: str, name: str, outdir: str) -> None:
    """Run the construction for one seed, writing every stage and final."""
    seed = _find_seed(catalog, name)
    res = run_pipeline(seed)
    d = Path(outdir)
    d.mkdir(parents=True, exist_ok=True)
    for i, st in enumerate(res.stages):
        (d / f"{i}_{st.name}.flagmap").write_text(write_flagmap(st.fs))
        if st.marking is not None:
            (d / f"{i}_{st.name}.marking").write_text(write_marking(st.marking))
    for f in res.finals:
        s = summarize(f.fs)
        (d / f"final_{f.case}{f.k_choice}.flagmap").write_text(write_flagmap(f.fs))
        click.echo(f"{f.case}\t{f.k_choice}\t{f.fs.n}\t{s.chi}\t{surface_name(s.chi, s.orientable)}\t{f.symmetry}\t{f.map_code}")
    click.echo(f"distinct {len(res.distinct_finals())}")


@main.command("atlas")
@catalog_opt
@click.option("--chi-min", type=int, default=-40, show_default=True)
@click.option("--chi-max", type=int, default=-1, show_default=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Atlas TSV (default stdout).")
@click.option("--maps", type=click.Path(dir_okay=False), help="Per-map TSV.")
@workers_opt
@_guard
def atlas_cmd(catalog: str, chi_min: int, chi_max: int, output: str | None, maps: str | None, workers: int) -> None:
    """Count vertex-transitive {3,7} maps that are neither regular nor chiral."""
    if chi_min > chi_max:
        raise click.BadParameter("--chi-min exceeds --chi-max")
    rows, recs = generate_atlas(load_seeds(catalog), chi_min, chi_max, workers)
    _emit(atlas_tsv(rows), output)
    if maps:
        Path(maps).write_text(maps_tsv(recs))


@main.command("verify-table1")
@catalog_opt
@workers_opt
@click.option("--expectations/--no-expectations", default=False, help="Also check the per-seed counts.")
@_guard
def verify_table1_cmd(catalog: str, workers: int, expectations: bool) -> None:
    """Compare the generated atlas with the published table."""
    t0 = time.time()
    seeds = load_seeds(catalog)
    check = verify_table1(seeds, workers=workers)
    for r in check.rows:
        want = TABLE1.get(r.chi, (0, 0))
        mark = "ok" if (r.orientable, r.nonorientable) == want else "MISMATCH"
        if r.total or want != (0, 0):
            click.echo(f"{r.chi}\t{r.orientable}\t{r.nonorientable}\t{r.total}\t{mark}")
    ok = check.ok
    if expectations:
        for e in verify_expectations(seeds, workers):
            if not e.ok:
                click.echo(f"seed {e.name}: expected {e.expected}, found {e.found}")
                ok = False
    click.echo(f"{'PASS' if ok else 'FAIL'} ({time.time() - t0:.1f}s)")
    if not ok:
        raise Mismatch()


@main.command("enum-typegraphs")
@click.option("--p", "p", type=int, required=True)
@click.option("--q", "q", type=int, required=True)
@click.option("--k", "k", type=int, required=True)
@click.option("--vertex-transitive", is_flag=True)
@_guard
def enum_cmd(p: int, q: int, k: int, vertex_transitive: bool) -> None:
    """Emit all admissible type graphs as TYPEGRAPH 1 blocks."""
    graphs = enumerate_type_graphs(p, q, k, vertex_transitive)
    click.echo("\n".join(write_typegraph(g, str(i + 1)) for i, g in enumerate(graphs)), nl=False)
    click.echo(f"# {len(graphs)} graphs", err=True)


@main.command("search-gensets")
@click.argument("groupfile", type=click.Path(exists=True, dir_okay=False))
@click.option("--class", "cls", type=click.Choice(["2_0", "2_01"]), required=True)
@click.option("-o", "--output", type=click.Path(dir_okay=False), help="Write the generating sets as a SEEDS 1 catalog.")
@_guard
def search_cmd(groupfile: str, cls: str, output: str | None) -> None:
    """Find admissible generating sets in each group of a GROUPS 1 file."""
    found = []
    for name, gens in read_groups(Path(groupfile).read_text()):
        g = closure(gens)
        sets = search_gensets(g, cls, name=f"{name}-")
        click.echo(f"{name}\torder {g.order}\t{len(sets)} generating sets")
        found += sets
    if output:
        Path(output).write_text(write_seeds(found))


@main.command("iso")
@click.argument("a", type=click.Path(exists=True, dir_okay=False))
@click.argument("b", type=click.Path(exists=True, dir_okay=False))
@_guard
def iso_cmd(a: str, b: str) -> None:
    """Exit 0 if the two maps are isomorphic, 1 otherwise."""
    phi = are_isomorphic(load_flagmap(a), load_flagmap(b))
    if phi is None:
        click.echo("not isomorphic")
        raise Mismatch()
    click.echo("isomorphic")
    click.echo(" ".join(str(x + 1) for x in phi))


if __name__ == "__main__":
    main()
