"""Regenerate the catalog .surf files from their polygon descriptions."""
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from flatwalk.catalog import dump_surf  # noqa: E402
from flatwalk.field import FieldScalar, surd  # noqa: E402
from flatwalk.surface import build_surface  # noqa: E402


def polygon_surface(polygons, side_glue):
    """Fan-triangulate convex polygons from vertex 0; sides get the lowest labels."""
    side_label = {}
    hol = []
    for p, verts in enumerate(polygons):
        n = len(verts)
        for k in range(n):
            a, b = verts[k], verts[(k + 1) % n]
            side_label[(p, k)] = len(hol)
            hol.append((b[0] - a[0], b[1] - a[1]))
    triangles = []
    glue = [(side_label[x], side_label[y]) for x, y in side_glue]
    for p, verts in enumerate(polygons):
        n = len(verts)
        out_label = {}
        back_label = {}
        for j in range(2, n - 1):
            v = verts[j]
            out_label[j] = len(hol)
            hol.append((v[0] - verts[0][0], v[1] - verts[0][1]))
            back_label[j] = len(hol)
            hol.append((verts[0][0] - v[0], verts[0][1] - v[1]))
            glue.append((out_label[j], back_label[j]))
        for i in range(1, n - 1):
            first = side_label[(p, 0)] if i == 1 else out_label[i]
            last = side_label[(p, n - 1)] if i == n - 2 else back_label[i + 1]
            triangles.append((first, side_label[(p, i)], last))
    return build_surface(triangles, hol, glue)


def torus():
    one, zero = FieldScalar(1), FieldScalar(0)
    hol = [(one, zero), (zero, one), (-one, -one), (one, one), (-one, zero), (zero, -one)]
    return build_surface([(0, 1, 2), (3, 4, 5)], hol, [(0, 4), (1, 5), (2, 3)])


def octagon():
    h = surd(2) / 2
    o, z = FieldScalar(1), FieldScalar(0)
    verts = [(o, z), (h, h), (z, o), (-h, h), (-o, z), (-h, -h), (z, -o), (h, -h)]
    return polygon_surface([verts], [((0, k), (0, k + 4)) for k in range(4)])


def golden_L():
    phi = (1 + surd(5)) / 2
    o, z = FieldScalar(1), FieldScalar(0)
    s = phi - 1
    hol = [
        (o, z), (-o, z), (s, z), (-s, z), (z, o), (z, -o), (z, s), (z, -s),
        (z, o), (z, -o), (-o, z), (o, z), (-o, -o), (o, o), (-s, -o), (s, o),
        (-o, -s), (o, s),
    ]
    triangles = [(0, 8, 12), (13, 10, 5), (2, 4, 14), (15, 3, 9), (11, 6, 16), (17, 1, 7)]
    glue = [(2 * i, 2 * i + 1) for i in range(9)]
    return build_surface(triangles, hol, glue)


def double_pentagon():
    r5 = surd(5)
    c1 = (r5 - 1) / 4
    c2 = -(r5 + 1) / 4
    inv_phi = (r5 - 1) / 2
    o, z = FieldScalar(1), FieldScalar(0)
    P = [(o, z), (c1, o), (c2, inv_phi), (c2, -inv_phi), (c1, -o)]
    N = [(-x, -y) for x, y in P]
    return polygon_surface([P, N], [((0, k), (1, k)) for k in range(5)])


COMMENTS = {
    "torus": "unit square torus, one marked point",
    "octagon": "regular octagon, opposite sides glued, vertices on the unit circle",
    "golden_L": "L-shaped table: unit square with two 1 x (phi-1) arms; width = height = phi",
    "double_pentagon": "regular pentagon and its point reflection, parallel sides glued;\n"
    "y scaled by 1/sin(72 deg) so coordinates lie in Q(sqrt 5)",
}


def main(outdir):
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, fn in (("torus", torus), ("octagon", octagon), ("golden_L", golden_L), ("double_pentagon", double_pentagon)):
        (outdir / f"{name}.surf").write_text(dump_surf(fn(), COMMENTS[name]))
        print("wrote", outdir / f"{name}.surf")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "src" / "flatwalk" / "catalog")
