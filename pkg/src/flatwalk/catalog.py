"""Line-oriented .surf files and the shipped catalog."""
import hashlib
import os
from pathlib import Path

from .errors import CatalogError, FlatwalkError, UnknownSurface
from .field import FieldScalar, fmt_rational, rational
from .surface import build_surface

CATALOG_NAMES = ("torus", "octagon", "golden_L", "double_pentagon")


def catalog_dir():
    env = os.environ.get("FLATWALK_CATALOG")
    return Path(env) if env else Path(__file__).parent / "catalog"


def _is_squarefree(d):
    k = 2
    while k * k <= d:
        if d % (k * k) == 0:
            return False
        k += 1
    return True


def parse_surf(text, source="<string>"):
    d = None
    triangles = {}
    edges = {}
    glue = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            head, *rest = line.split()
            if head == "discriminant":
                d = int(rest[0])
                if d < 0 or (d > 1 and not _is_squarefree(d)):
                    raise ValueError(f"discriminant {d} is not square-free")
            elif head == "triangle":
                idx = int(rest[0].rstrip(":"))
                triangles[idx] = tuple(int(x) for x in rest[1:4])
                if len(rest) != 4:
                    raise ValueError("triangle needs three edge ids")
            elif head == "edge":
                idx = int(rest[0].rstrip(":"))
                xr, xs, yr, ys = (rational(v) for v in rest[1:5])
                if len(rest) != 5:
                    raise ValueError("edge needs four rationals")
                edges[idx] = (xr, xs, yr, ys)
            elif head == "glue":
                glue.append((int(rest[0]), int(rest[1])))
            else:
                raise ValueError(f"unknown record '{head}'")
        except (ValueError, IndexError) as exc:
            raise CatalogError(f"{source}:{lineno}: {exc}") from None
    if d is None:
        raise CatalogError(f"{source}: missing discriminant header")
    tris = [triangles[i] for i in sorted(triangles)]
    hol = {}
    for e, (xr, xs, yr, ys) in edges.items():
        if d == 0 and (xs or ys):
            raise CatalogError(f"{source}: edge {e} has a surd part but discriminant is 0")
        hol[e] = (FieldScalar(xr, xs, d), FieldScalar(yr, ys, d))
    try:
        return build_surface(tris, hol, glue)
    except FlatwalkError as exc:
        raise type(exc)(f"{source}: {exc}") from None
    except (KeyError, ValueError) as exc:
        raise CatalogError(f"{source}: {exc}") from None


def dump_surf(surface, comment=None):
    if surface.tainted:
        raise ValueError("only exact surfaces can be serialized")
    d = surface.discriminant
    out = []
    if comment:
        out.extend(f"# {c}" for c in comment.splitlines())
    out.append(f"discriminant {d}")
    for i, t in enumerate(surface.triangles):
        out.append(f"triangle {i}: {t[0]} {t[1]} {t[2]}")
    for l, v in enumerate(surface.hol):
        parts = []
        for c in (v.x, v.y):
            c = FieldScalar.lift(c)
            parts += [fmt_rational(c.a), fmt_rational(c.b)]
        out.append(f"edge {l}: " + " ".join(parts))
    for l in surface.edge_reps():
        out.append(f"glue {l} {surface.glue[l]}")
    return "\n".join(out) + "\n"


def resolve(name_or_path):
    p = Path(name_or_path)
    if p.is_file():
        return p
    stem = p.name[:-5] if p.name.endswith(".surf") else p.name
    cand = catalog_dir() / f"{stem}.surf"
    if cand.is_file():
        return cand
    raise UnknownSurface(f"no surface file or catalog entry named '{name_or_path}'")


def load_surface(name_or_path):
    path = resolve(name_or_path)
    return parse_surf(path.read_text(), path.name)


def file_hash(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def catalog_hashes():
    out = {}
    for name in CATALOG_NAMES:
        p = catalog_dir() / f"{name}.surf"
        out[p.name] = file_hash(p) if p.is_file() else "missing"
    return out
