"""Command-line front end: every subcommand writes a '#' metadata block, then CSV, JSON or text.

Exit codes: 0 success, 1 verification failure or domain error, 2 usage error or unreadable
surface file.
"""
import csv
import io
import json
import math
import sys

import click

from . import __version__
from .catalog import catalog_hashes, file_hash, load_surface, resolve
from .errors import CatalogError, FlatwalkError, UnknownSurface
from .field import FieldScalar, fmt_rational, parse_scalar

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class Run:
    """Collects the config echo and the output body, then writes both at the end."""

    def __init__(self, command, config, surface_path=None):
        self.command = command
        self.config = dict(config)
        self.surface_path = surface_path
        self.extra = {}

    def metadata_lines(self):
        lines = [f"# flatwalk {__version__}", f"# command: {self.command}"]
        for k in sorted(self.config):
            lines.append(f"# {k}: {_plain(self.config[k])}")
        for k in sorted(self.extra):
            lines.append(f"# {k}: {_plain(self.extra[k])}")
        if self.surface_path is not None:
            lines.append(f"# surface_sha256 {self.surface_path.name}: {file_hash(self.surface_path)}")
        for name, h in catalog_hashes().items():
            lines.append(f"# catalog_sha256 {name}: {h}")
        return lines

    def metadata_dict(self):
        d = {"version": __version__, "command": self.command,
             "config": {k: _plain(v) for k, v in sorted(self.config.items())},
             "catalog_sha256": catalog_hashes()}
        d.update({k: _plain(v) for k, v in sorted(self.extra.items())})
        if self.surface_path is not None:
            d["surface_sha256"] = {self.surface_path.name: file_hash(self.surface_path)}
        return d

    def emit_text(self, body, out=None):
        _write("\n".join(self.metadata_lines()) + "\n" + body, out)

    def emit_csv(self, header, rows, out=None):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
        self.emit_text(buf.getvalue(), out)

    def emit_json(self, payload, out=None):
        doc = {"metadata": self.metadata_dict()}
        doc.update(payload)
        _write(json.dumps(_plain(doc), indent=2, sort_keys=True) + "\n", out)


def _plain(x):
    """JSON-safe copy: exact scalars as strings, infinities as null."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_plain(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return x if math.isfinite(x) else None
    return str(x)


def _write(text, out):
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _load(surface, mode):
    try:
        path = resolve(surface)
        S = load_surface(str(path))
    except (UnknownSurface, CatalogError, OSError, UnicodeDecodeError) as exc:
        raise click.UsageError(f"bad surface '{surface}': {exc}") from None
    except FlatwalkError as exc:
        raise click.UsageError(f"bad surface '{surface}': {exc.module}: {type(exc).__name__}: {exc}") from None
    if mode == "float":
        from .surface import apply_matrix

        # a shear too small to matter but outside the field forces the float frame
        S = apply_matrix(((1.0, 0.5**60), (0.0, 1.0)), S)
        click.echo("warning: float mode, geometry decided with tolerances (tainted)", err=True)
    return path, S


def _scalar(text):
    try:
        return parse_scalar(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise click.BadParameter(f"cannot parse '{text}' as an exact scalar: {exc}") from None


def _grid(spec):
    """'a:step:b' (inclusive) or a comma list."""
    try:
        if ":" in spec:
            a, step, b = (float(x) for x in spec.split(":"))
            n = int(round((b - a) / step))
            return [round(a + i * step, 12) for i in range(n + 1)]
        return [float(x) for x in spec.split(",")]
    except ValueError:
        raise click.BadParameter(f"bad grid '{spec}'") from None


def _vec_str(v):
    return str(v.x), str(v.y)


mode_option = click.option("--mode", type=click.Choice(["exact", "float"]), default="exact",
                           show_default=True, help="Arithmetic mode.")
surface_option = click.option("--surface", required=True, help="Catalog name or .surf file.")


@click.group()
def cli():
    """Exact flat geometry of translation surfaces."""


@cli.command()
@surface_option
@mode_option
def stratum(surface, mode):
    """Genus, zero orders and relative homology rank."""
    from .surface import gauss_bonnet_holds
    from .surface import stratum as _stratum

    path, S = _load(surface, mode)
    s = _stratum(S)
    run = Run("stratum", {"surface": surface, "mode": mode}, path)
    run.emit_text(f"g={s.genus}, orders={list(s.zero_orders)}, h={s.rel_homology_dim}\n")
    if not gauss_bonnet_holds(S):
        sys.exit(EXIT_FAIL)


@cli.command()
@surface_option
@click.option("--length", "L", type=float, required=True)
@click.option("--csv", "out", type=click.Path(dir_okay=False, writable=True))
@mode_option
def saddles(surface, L, out, mode):
    """Saddle connections with holonomy length <= L."""
    from .saddle import enumerate_saddle_connections

    path, S = _load(surface, mode)
    rows = []
    for c in enumerate_saddle_connections(S, L):
        if c.frame is None:
            x, y = _vec_str(c.holonomy)
        else:
            x, y = (f"{t:.15g}" for t in c.vector)
        rows.append([x, y, f"{c.length:.15g}", c.start_cone, c.end_cone, " ".join(str(int(h)) for h in c.homology)])
    run = Run("saddles", {"surface": surface, "length": L, "mode": mode}, path)
    run.emit_csv(["x", "y", "length", "start", "end", "homology"], rows, out)


@cli.command()
@surface_option
@click.option("--direction", nargs=2, required=True, help="Direction p q; exact scalars like 1/2 or 1+1r5.")
@click.option("--csv", "out", type=click.Path(dir_okay=False, writable=True))
@mode_option
def cylinders(surface, direction, out, mode):
    """Cylinder decomposition in one direction."""
    from .cylinders import cylinder_diagram, direction_periodicity
    from .field import Vec
    from .regular import base_surface

    path, S = _load(surface, mode)
    base = base_surface(S)
    v = Vec(_scalar(direction[0]), _scalar(direction[1]))
    dec = direction_periodicity(base, v)
    rows = [[c.index, _num(c.circumference), _num(c.true_height), str(c.modulus), str(c.area),
             " ".join(str(int(h)) for h in c.core_class)] for c in dec.cylinders]
    run = Run("cylinders", {"surface": surface, "direction": list(direction), "mode": mode}, path)
    run.extra["diagram"] = cylinder_diagram(dec).canonical()
    run.extra["area_check"] = dec.area == base.area
    run.emit_csv(["cylinder", "circumference", "height", "modulus", "area", "core_class"], rows, out)
    if dec.area != base.area:
        sys.exit(EXIT_FAIL)


@cli.command()
@surface_option
@click.option("--cutoff", type=float, required=True)
@click.option("--steps", default=None, help="Comma list of intermediate cutoffs (default: integers up to the cutoff).")
@click.option("--csv", "out", type=click.Path(dir_okay=False, writable=True))
@mode_option
def census(surface, cutoff, steps, out, mode):
    """Cumulative circumference-ratio, diagram and height-relation sets by cutoff."""
    from .cylinders import finiteness_census
    from .regular import base_surface

    path, S = _load(surface, mode)
    cuts = _grid(steps) if steps else [float(k) for k in range(1, int(cutoff) + 1)]
    cuts = sorted({c for c in cuts if c <= cutoff} | {float(cutoff)})
    rows = finiteness_census(base_surface(S), cutoff, cutoffs=cuts)
    run = Run("census", {"surface": surface, "cutoff": cutoff, "steps": cuts, "mode": mode}, path)
    run.emit_csv(["cutoff", "n_directions", "n_ratios", "n_diagrams", "n_height_relations"],
                 [[f"{r.cutoff:g}", r.n_directions, len(r.ratios), len(r.diagrams), len(r.height_relations)]
                  for r in rows], out)


@cli.command("verify-relations")
@surface_option
@click.option("--cutoff", type=float, default=3.0, show_default=True, help="Length of relation sources.")
@click.option("--test-length", type=float, default=6.0, show_default=True, help="Length of test edges.")
@click.option("--slack", type=float, default=4.0, show_default=True, help="Allowed unsigned-count residual.")
@click.option("--tau", type=float, default=0.0, show_default=True,
              help="Unsigned counts use core curves of cylinders with modulus >= tau.")
@click.option("--csv", "out", type=click.Path(dir_okay=False, writable=True))
@mode_option
def verify_relations(surface, cutoff, test_length, slack, tau, out, mode):
    """Transfer holonomy relations to signed and unsigned crossing counts."""
    from .cylinders import saddle_directions
    from .intersect import DecompositionCache, derive_relations, theorem45_residuals, verify_theorem46
    from .regular import base_surface
    from .saddle import enumerate_saddle_connections

    path, S = _load(surface, mode)
    base = base_surface(S)
    conns = [c for c in enumerate_saddle_connections(base, cutoff)
             if c.holonomy.x.sign() > 0 or (c.holonomy.x.sign() == 0 and c.holonomy.y.sign() > 0)]
    relations = derive_relations(conns)
    tests = enumerate_saddle_connections(base, test_length)
    cache = DecompositionCache(base)
    decs = [cache.get(v) for v in saddle_directions(base, cutoff)]
    rows = []
    all_ok = True
    realized = 0
    for k, rel in enumerate(relations):
        signed = theorem45_residuals(rel, conns, tests, cache)
        worst_signed = max((abs(r) for r in signed), default=0)
        worst_unsigned = 0
        ok46 = True
        for dec in decs:
            thick = [i for i, c in enumerate(dec.cylinders) if float(c.modulus) >= tau]
            if not thick:
                continue
            _, worst, good = verify_theorem46(rel, conns, dec, thick, slack=slack)
            worst_unsigned = max(worst_unsigned, worst)
            ok46 &= bool(good)
        realized = max(realized, worst_unsigned)
        ok = worst_signed == 0 and ok46
        all_ok &= ok
        rows.append([k, rel.target, len(rel.coefficients), str(worst_signed), str(worst_unsigned),
                     "pass" if ok else "fail"])
    run = Run("verify-relations", {"surface": surface, "cutoff": cutoff, "test_length": test_length,
                                   "slack": slack, "tau": tau, "mode": mode}, path)
    run.extra["realized_max_unsigned_residual"] = f"{float(realized):.12g}"
    run.extra["n_sources"] = len(conns)
    run.extra["n_test_edges"] = len(tests)
    run.emit_csv(["relation", "target", "terms", "max_residual_signed", "max_residual_unsigned", "pass"], rows, out)
    if not all_ok:
        sys.exit(EXIT_FAIL)


def _read_seeds(path, base):
    from .saddle import enumerate_saddle_connections

    wanted = []
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("edge"):
                line = line.split(":", 1)[1]
            parts = line.split()
            if len(parts) != 4:
                raise click.BadParameter(f"seed line '{raw.strip()}' needs four rationals")
            xr, xs, yr, ys = parts
            d = base.discriminant
            wanted.append((_scalar(f"{xr}+{xs}r{d}" if d else xr), _scalar(f"{yr}+{ys}r{d}" if d else yr)))
    if not wanted:
        return []
    L = max(math.hypot(float(x), float(y)) for x, y in wanted) * 1.000001
    pool = enumerate_saddle_connections(base, L)
    seeds = []
    for x, y in wanted:
        match = next((c for c in pool if c.holonomy.x == x and c.holonomy.y == y), None)
        if match is None:
            raise click.BadParameter(f"no saddle connection with holonomy ({x}, {y})")
        seeds.append(match)
    return seeds


@cli.command("regular-tri")
@surface_option
@click.option("--tau", type=float, required=True)
@click.option("--seeds", type=click.Path(exists=True, dir_okay=False))
@click.option("--flow", type=float, default=0.0, show_default=True, help="Apply diag(e^t, e^-t) first.")
@click.option("--eps0", type=float, default=None, help="Short-curve threshold.")
@click.option("--out", type=click.Path(dir_okay=False, writable=True))
@mode_option
def regular_tri(surface, tau, seeds, flow, eps0, out, mode):
    """Regular triangulation in the catalog edge format plus its conditions report."""
    from .regular import EPS0, base_surface, build_regular_triangulation
    from .surface import geodesic_flow

    path, S = _load(surface, mode)
    if flow:
        S = geodesic_flow(flow, S)
    eps0 = EPS0 if eps0 is None else eps0
    seed_conns = _read_seeds(seeds, base_surface(S)) if seeds else None
    tri = build_regular_triangulation(S, tau, seeds=seed_conns, eps0=eps0)
    lines = []
    for i, c in enumerate(tri.edges):
        parts = []
        for s in (c.holonomy.x, c.holonomy.y):
            s = FieldScalar.lift(s)
            parts += [fmt_rational(s.a), fmt_rational(s.b)]
        lines.append(f"edge {i}: " + " ".join(parts))
    for k in sorted(tri.conditions):
        lines.append(f"# {k}: {'pass' if tri.conditions[k] else 'fail'}")
    lines.append(f"# excluded_cylinders: {len(tri.excluded_cylinders)}")
    lines.append(f"# small_cylinders: {len(tri.small_cylinders)}")
    lines.append(f"# faces: {len(tri.faces)}")
    run = Run("regular-tri", {"surface": surface, "tau": tau, "seeds": seeds, "flow": flow, "eps0": eps0,
                              "mode": mode, **{k: v for k, v in tri.constants.items() if k not in ("tau", "eps0")}},
              path)
    run.emit_text("\n".join(lines) + "\n", out)
    if not tri.ok:
        sys.exit(EXIT_FAIL)


def _num(x):
    return f"{x:.15g}" if isinstance(x, float) else str(x)


@cli.command("count-geodesics")
@click.option("--group", type=click.Choice(["torus", "goldenL"]), required=True)
@click.option("--R", "R", type=float, default=9.0, show_default=True)
@click.option("--theta-grid", default="0:0.1:0.9", show_default=True)
@click.option("--eps", type=float, default=0.04, show_default=True, help="Short-curve threshold; sets the cusp height.")
@click.option("--delta", type=float, default=0.35, show_default=True)
@click.option("--csv", "out", type=click.Path(dir_okay=False, writable=True))
def count_geodesics(group, R, theta_grid, eps, delta, out):
    """Count closed geodesics spending a theta-fraction of their length in the cusp."""
    from .geodesics import count_N_theta, cusp_height, enumerate_closed_geodesics, huber_ratio, veech_group

    grid = _grid(theta_grid)
    G = veech_group(group)
    records = enumerate_closed_geodesics(G, R, eps=eps)
    rows = count_N_theta(G, R, grid, eps=eps, delta=delta, records=records)
    run = Run("count-geodesics", {"group": group, "R": R, "theta_grid": grid, "eps": eps, "delta": delta})
    run.extra["cusp_height_y0"] = cusp_height(eps)
    run.extra["n_classes"] = len(records)
    run.extra["huber_ratio"] = f"{huber_ratio(records, R):.12g}"
    run.emit_csv(["theta", "N_theta", "logN_over_R", "bound", "pass"],
                 [[f"{r.theta:g}", r.n_theta, f"{r.log_n_over_r:.12g}", f"{r.bound:.12g}",
                   "pass" if r.passed else "fail"] for r in rows], out)
    monotone = all(a.n_theta >= b.n_theta for a, b in zip(rows, rows[1:]))
    if not (monotone and all(r.passed for r in rows)):
        sys.exit(EXIT_FAIL)


@cli.command()
@click.option("--only", default=None, help="Comma list of criterion numbers.")
@click.option("--json", "out", type=click.Path(dir_okay=False, writable=True))
@mode_option
def selftest(only, out, mode):
    """Run the acceptance suite and report pass/fail as JSON."""
    from .acceptance import CRITERIA, run_all

    try:
        numbers = [int(x) for x in only.split(",")] if only else None
    except ValueError:
        raise click.BadParameter(f"bad criterion list '{only}'") from None
    if numbers and any(n < 1 or n > len(CRITERIA) for n in numbers):
        raise click.BadParameter(f"criteria are numbered 1..{len(CRITERIA)}")
    if mode == "float":
        click.echo("warning: float mode requested; criteria run on exact bases, framed results are tainted",
                   err=True)
    try:
        for name in ("torus", "octagon", "golden_L", "double_pentagon"):
            load_surface(name)
    except FlatwalkError as exc:
        click.echo(f"error: {exc.module}: {type(exc).__name__}: {exc}", err=True)
        sys.exit(EXIT_FAIL)
    results = run_all(numbers)
    for r in results:
        click.echo(r.line(), err=True)
    run = Run("selftest", {"only": numbers, "mode": mode})
    passed = all(r.ok for r in results)
    run.emit_json({"passed": passed, "criteria": [r.as_dict() for r in results]}, out)
    if not passed:
        sys.exit(EXIT_FAIL)


def run(argv=None):
    """Invoke the CLI and return the exit code instead of exiting."""
    try:
        cli.main(args=argv, standalone_mode=False, prog_name="flatwalk")
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return EXIT_FAIL
    except SystemExit as exc:
        return exc.code or 0
    except FlatwalkError as exc:
        click.echo(f"error: {exc.module}: {type(exc).__name__}: {exc}", err=True)
        return EXIT_FAIL
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
