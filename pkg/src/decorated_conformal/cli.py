"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 non-convergence, 3 parse error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys

import numpy as np

from .delaunay import edge_weight_report, flip_algorithm
from .energy import edge_lambda_lengths
from .errors import GeometryError, ParseError, SolverError
from .instances import Disk, disk_from_faces
from .layout import interpolation_maps, layout_faces
from .mesh import Triangulation, build_surface, double
from .metric import face_corner_angles, gauss_bonnet_defect, is_hyperideal
from .solver import SolverConfig, solve_boundary, solve_prescribed_angles, uniformize
from .surface_file import SurfaceFile, fmt, parse_surface, write_surface

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_INVALID, EXIT_NO_CONVERGENCE, EXIT_PARSE = 0, 1, 2, 3

log = logging.getLogger("decorated_conformal")


def _read(path) -> SurfaceFile:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_surface(text)


def _emit(text: str, path) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(obj, path) -> None:
    if path is not None:
        _emit(json.dumps(obj, indent=2) + "\n", path)


def _edge_key(tri: Triangulation, e: int) -> list:
    return list(tri.edge_key(e))


# -- check ---------------------------------------------------------------------
def _violations(sf: SurfaceFile) -> list[str]:
    out = []
    side = sf.side_lengths()
    for f in range(sf.n_faces):
        try:
            face_corner_angles(side[f : f + 1])
        except GeometryError:
            a, b, c = side[f]
            out.append(f"face {f}: triangle inequality violated by lengths ({a:.6g}, {b:.6g}, {c:.6g})")
    r = sf.radii
    partner = {}
    for a, b in sf.gluings:
        partner[a] = b
    for (f, s), length in sf.lengths.items():
        i = int(sf.faces[f, (s + 1) % 3])
        j = int(sf.faces[f, (s + 2) % 3])
        if (r[i] > 0 or r[j] > 0) and not length > r[i] + r[j]:
            out.append(
                f"side ({f}, {s}) vertices {i}-{j}: circles intersect, "
                f"length {length:.6g} <= {r[i]:.6g} + {r[j]:.6g}"
            )
    try:
        if sf.kind == "closed":
            sf.to_closed()
        else:
            disk = sf.to_disk()
            double(disk.faces, disk.interior_gluings, disk.boundary_sides)
    except GeometryError as exc:
        out.append(f"combinatorics: {exc}")
    return out


def cmd_check(args) -> int:
    sf = _read(args.input)
    problems = _violations(sf)
    for p in problems:
        print(p)
    if problems:
        return EXIT_INVALID
    if sf.kind == "closed":
        tri, _ = sf.to_closed()
        print(
            f"ok: closed surface of genus {tri.genus}, {tri.n_vertices} vertices, "
            f"{tri.n_edges} edges, {tri.n_faces} faces"
        )
        if sf.has_targets():
            d = gauss_bonnet_defect(sf.targets, tri.genus, tri.n_vertices)
            if abs(d) > 1e-12:
                print(f"note: target angles violate Gauss-Bonnet (defect {d:.3g})")
    else:
        print(f"ok: disk, {sf.n_vertices} vertices, {sf.n_faces} faces")
    return EXIT_OK


# -- delaunay ------------------------------------------------------------------
def cmd_delaunay(args) -> int:
    sf = _read(args.input)
    tri, m = sf.to_closed()
    _validate(tri, m)
    res = flip_algorithm(tri, m)
    out = SurfaceFile.from_closed(res.triangulation, res.metric, sf.targets)
    _emit(write_surface(out), args.output)
    t = res.triangulation
    report = {
        "flips": [
            {"edge": ev.edge, "new_edge": ev.new_edge, "length": ev.length} for ev in res.log
        ],
        "flat_edges": [_edge_key(t, e) for e in res.report.flat_edges()],
        "edges": [
            dict(row, key=_edge_key(t, row["edge"])) for row in res.report.rows()
        ],
        "min_margin": res.report.min_margin(),
    }
    _emit_json(report, args.report)
    print(f"{res.n_flips} flips, min margin {res.report.min_margin():.3g}", file=sys.stderr)
    return EXIT_OK


def _validate(tri, m):
    m.check(tri)
    bad = is_hyperideal(tri, m)
    if bad:
        raise GeometryError(str(bad[0]))


# -- solve ---------------------------------------------------------------------
def _read_numbers(path, n, what):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    try:
        if text.lstrip().startswith("{"):
            vals = json.loads(text)["u"]
        else:
            vals = [float(x) for x in text.split()]
    except (ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"cannot read {what} from {path}: {exc}") from None
    if len(vals) != n:
        raise ParseError(f"expected {n} {what}, found {len(vals)}")
    return np.asarray(vals, dtype=float)


def _config(args) -> SolverConfig:
    return SolverConfig(tol=args.tol, max_iter=args.max_iter)


def _report_json(report, mode, tri, extra=None) -> dict:
    lam = edge_lambda_lengths(tri, report.metric, report.heights)
    invariant = sorted(
        (sorted(tri.endpoints(e)), lam[e]) for e in tri.edge_ids()
    )
    out = {
        "mode": mode,
        "converged": report.converged,
        "config": report.config.as_dict(),
        "iterations": [
            {
                "iteration": r.iteration,
                "residual": r.residual,
                "step": r.step,
                "value": r.value,
                "flips": r.flips,
            }
            for r in report.history
        ],
        "flips": [{"edge": f.edge, "new_edge": f.new_edge, "length": f.length} for f in report.flips],
        "u": report.u.tolist(),
        "residual": report.residual,
        "final_lengths": [
            {"face": k[0], "side": k[1], "length": report.metric.lengths[e]}
            for e, k in sorted(((e, tri.edge_key(e)) for e in tri.edge_ids()), key=lambda x: x[1])
        ],
        "invariant": [{"vertices": v, "lambda": x} for v, x in invariant],
    }
    if extra:
        out.update(extra)
    return out


def cmd_solve(args) -> int:
    sf = _read(args.input)
    cfg = _config(args)
    if args.mode == "boundary":
        disk = sf.to_disk()
        targets = sf.targets if args.targets is None else _read_numbers(args.targets, sf.n_vertices, "targets")
        bverts = disk.boundary_vertices()
        if not np.all(np.isfinite(targets[bverts])):
            raise GeometryError("every boundary vertex needs a target angle")
        targets = np.where(np.isfinite(targets), targets, 2 * math.pi)
        try:
            res = solve_boundary(disk, targets, cfg)
        except SolverError as exc:
            _failure(exc, args, "boundary")
            return EXIT_NO_CONVERGENCE
        report = res.report
        _emit(write_surface(SurfaceFile.from_disk(res.disk, sf.targets)), args.output)
        extra = {
            "disk_u": res.u.tolist(),
            "asymmetry": res.asymmetry,
            "boundary_margin": res.boundary_margin,
            "angle_sums": res.angle_sums().tolist(),
        }
        _emit_json(_report_json(report, "boundary", report.triangulation, extra), args.report)
    else:
        tri, m = sf.to_closed()
        _validate(tri, m)
        try:
            if args.mode == "uniformize":
                report = uniformize(tri, m, cfg)
            else:
                if args.targets is not None:
                    targets = _read_numbers(args.targets, tri.n_vertices, "targets")
                elif sf.has_targets():
                    targets = sf.targets
                else:
                    raise GeometryError("mode 'angles' needs a target for every vertex")
                report = solve_prescribed_angles(tri, m, targets, cfg)
        except SolverError as exc:
            _failure(exc, args, args.mode)
            return EXIT_NO_CONVERGENCE
        out = SurfaceFile.from_closed(report.triangulation, report.metric, report.targets)
        _emit(write_surface(out), args.output)
        _emit_json(_report_json(report, args.mode, report.triangulation), args.report)
    print(
        f"converged in {report.iterations} iterations, residual {report.residual:.3g}, "
        f"{report.n_flips} flips",
        file=sys.stderr,
    )
    return EXIT_OK


def _failure(exc, args, mode):
    print(f"error: {exc}", file=sys.stderr)
    rep = exc.report
    if rep is not None and args.report is not None:
        _emit_json(_report_json(rep, mode, rep.triangulation, {"error": str(exc)}), args.report)


# -- layout ----------------------------------------------------------------------
def cmd_layout(args) -> int:
    sf = _read(args.input)
    cut = [tuple(c) for c in (args.cut or [])]
    if sf.kind == "closed" and not cut:
        raise GeometryError("closed surfaces need a cut (--cut FACE SIDE ...)")
    side = sf.side_lengths()
    pos = layout_faces(sf.faces, sf.gluings, side, cut)
    _emit(
        json.dumps({"faces": sf.faces.tolist(), "corners": pos.tolist()}, indent=2) + "\n",
        args.output,
    )
    return EXIT_OK


# -- interpolate -------------------------------------------------------------------
def cmd_interpolate(args) -> int:
    sf = _read(args.input)
    u = _read_numbers(args.u, sf.n_vertices, "scale factors")
    maps = interpolation_maps(sf.faces, sf.side_lengths(), sf.radii, u)
    lines = [f"face {f}: " + " ".join(fmt(x) for x in M.ravel()) for f, M in enumerate(maps)]
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


# -- import ------------------------------------------------------------------------
def read_obj(text: str):
    verts, faces = [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        tok = raw.split("#", 1)[0].split()
        if not tok:
            continue
        if tok[0] == "v":
            try:
                verts.append([float(x) for x in tok[1:4]])
            except ValueError:
                raise ParseError("bad vertex coordinates", lineno) from None
            if len(verts[-1]) != 3:
                raise ParseError("vertex needs three coordinates", lineno)
        elif tok[0] == "f":
            try:
                idx = [int(t.split("/")[0]) for t in tok[1:]]
            except ValueError:
                raise ParseError("bad face indices", lineno) from None
            if len(idx) < 3:
                raise ParseError("face needs at least three vertices", lineno)
            idx = [i - 1 if i > 0 else len(verts) + i for i in idx]
            for k in range(1, len(idx) - 1):
                faces.append((idx[0], idx[k], idx[k + 1]))
    if not faces:
        raise ParseError("no faces in OBJ input")
    pos = np.asarray(verts, dtype=float)
    F = np.asarray(faces, dtype=np.int64)
    if F.min() < 0 or F.max() >= len(pos):
        raise ParseError("face index out of range")
    return pos, F


def cmd_import(args) -> int:
    try:
        with open(args.input, encoding="utf-8") as fh:
            pos, F = read_obj(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read {args.input}: {exc.strerror}") from None
    used = np.unique(F)
    remap = np.full(len(pos), -1)
    remap[used] = np.arange(len(used))
    F = remap[F]
    pos = pos[used]
    n = len(pos)
    if args.radii is not None:
        radii = _read_numbers(args.radii, n, "radii")
    else:
        radii = np.full(n, args.radius)
    side = np.linalg.norm(pos[F[:, [2, 0, 1]]] - pos[F[:, [1, 2, 0]]], axis=-1)
    disk = disk_from_faces(F, side, radii) if _has_boundary(F) else None
    if disk is None:
        from .instances import _pair_sides

        gluings, _ = _pair_sides(F)
        tri = build_surface(F, gluings)
        from .instances import metric_from_side_lengths

        sf = SurfaceFile.from_closed(tri, metric_from_side_lengths(tri, side, radii))
    else:
        sf = SurfaceFile.from_disk(disk)
    _emit(write_surface(sf), args.output)
    return EXIT_OK


def _has_boundary(F) -> bool:
    directed = {(int(a), int(b)) for f in F for a, b in ((f[0], f[1]), (f[1], f[2]), (f[2], f[0]))}
    return any((b, a) not in directed for a, b in directed)


# -- entry point ---------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="dcm", description="Decorated discrete conformal maps of triangulated surfaces."
    )
    p.add_argument("-v", "--verbose", action="store_true", help="log solver iterations")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="validate a surface file")
    c.add_argument("input")
    c.set_defaults(func=cmd_check)

    d = sub.add_parser("delaunay", help="flip to a weighted Delaunay triangulation")
    d.add_argument("input")
    d.add_argument("-o", "--output", help="output surface file (default stdout)")
    d.add_argument("--report", help="JSON report with flip log and edge weights")
    d.set_defaults(func=cmd_delaunay)

    s = sub.add_parser("solve", help="solve a discrete conformal mapping problem")
    s.add_argument("input")
    s.add_argument("--mode", choices=["angles", "uniformize", "boundary"], default="angles")
    s.add_argument("--targets", help="file with one target angle per vertex (default: the v records)")
    s.add_argument("-o", "--output", help="output surface file (default stdout)")
    s.add_argument("--report", help="JSON solver report")
    s.add_argument("--tol", type=float, default=1e-10)
    s.add_argument("--max-iter", type=int, default=50)
    s.set_defaults(func=cmd_solve)

    lay = sub.add_parser("layout", help="planar layout of a flat surface")
    lay.add_argument("input")
    lay.add_argument("--cut", nargs=2, type=int, action="append", metavar=("FACE", "SIDE"))
    lay.add_argument("-o", "--output")
    lay.set_defaults(func=cmd_layout)

    it = sub.add_parser("interpolate", help="per-face projective maps for scale factors")
    it.add_argument("input")
    it.add_argument("--u", required=True, help="solver JSON report or a file of numbers")
    it.add_argument("-o", "--output")
    it.set_defaults(func=cmd_interpolate)

    im = sub.add_parser("import", help="convert an OBJ mesh to a surface file")
    im.add_argument("input")
    im.add_argument("--radius", type=float, default=0.0)
    im.add_argument("--radii", help="file with one radius per used vertex")
    im.add_argument("-o", "--output")
    im.set_defaults(func=cmd_import)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s"
    )
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (GeometryError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
