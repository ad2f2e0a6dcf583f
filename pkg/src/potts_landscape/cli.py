"""Command-line interface: compute, export and render the phase diagrams.

Subcommands: slice, surface, census, critical, maxwell, potential.
Common flags: --format {csv,json,svg}, --out PATH, --tol X, --seed-grid N.
Exit codes: 0 success, 2 domain error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import contextlib
import dataclasses
import math
import sys

import numpy as np

from . import export, svg
from .bifurcation import slice_curves, surface_patches
from .critical import all_critical_temps
from .errors import DomainError, NumericalError
from .maxwell import (BETA_BUTTERFLY, BETA_ELLIS_WANG,
                      beyond_ellis_wang_segment, coexistence_curve,
                      symmetric_segment, track_segment_pair, triple_point)
from .model import (DEFAULT_TOL, AprioriMeasure, ModelParams,
                    batch_free_energy, batch_from_xy, batch_pq, batch_uv,
                    batch_xy, from_pq, from_uv)
from .stationary import PointKind, census

SQRT3 = math.sqrt(3.0)


@contextlib.contextmanager
def _open_out(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w") as fh:
            yield fh


def _write_records(args, kind, records, note=None):
    with _open_out(args.out) as fh:
        if args.format == "json":
            export.write_json(fh, kind, records)
        else:
            export.write_csv(fh, kind, records)
            if note:
                fh.write(f"# note: {note}\n")


def _tolerances(args):
    if getattr(args, "tol", None) is None:
        return DEFAULT_TOL
    return dataclasses.replace(DEFAULT_TOL, residual=args.tol)


def _parse_alpha(args) -> AprioriMeasure:
    if getattr(args, "alpha", None):
        parts = [float(p) for p in args.alpha.split(",")]
        if len(parts) != 3:
            raise DomainError("--alpha needs three comma-separated values")
        return AprioriMeasure(*parts)
    if getattr(args, "uv", None):
        parts = [float(p) for p in args.uv.split(",")]
        if len(parts) != 2:
            raise DomainError("--uv needs two comma-separated values")
        from .model import CoordUV
        return from_uv(CoordUV(parts[0], parts[1]))
    return AprioriMeasure.uniform()


# ---------------------------------------------------------------------------
# slice
# ---------------------------------------------------------------------------

def _slice_records(curves):
    records = []
    for c in curves:
        pq = batch_pq(c.alpha)
        for k in range(len(c.x_param)):
            records.append({
                "beta": c.beta, "branch": c.branch.label,
                "interval": c.interval_index, "x_param": float(c.x_param[k]),
                "nu1": float(c.nu[k, 0]), "nu2": float(c.nu[k, 1]),
                "nu3": float(c.nu[k, 2]),
                "alpha1": float(c.alpha[k, 0]), "alpha2": float(c.alpha[k, 1]),
                "alpha3": float(c.alpha[k, 2]),
                "p": float(pq[k, 0]), "q": float(pq[k, 1]),
            })
    return records


def label_slice_cells(beta, curves, extent, resolution=512, seed_grid=64,
                      tol=DEFAULT_TOL):
    """Census label per cell of the slice arrangement inside the window.

    Returns a list of (region, n_local_minima or None)."""
    from .regions import label_regions
    polylines = [batch_pq(c.alpha) for c in curves]
    window = (-extent, extent, -extent, extent)
    out = []
    for region in label_regions(polylines, window, resolution):
        if not region.resolved:
            out.append((region, None))
            continue
        from .model import CoordPQ
        alpha = from_pq(CoordPQ(*region.probe))
        cens = census(ModelParams(beta, alpha), grid_density=seed_grid, tol=tol)
        out.append((region, cens.n_local_minima))
    return out


def cmd_slice(args) -> int:
    beta = args.beta
    if beta <= 0:
        raise DomainError(f"beta must be positive, got {beta}")
    tol = _tolerances(args)
    curves = [] if beta <= 2.0 else slice_curves(beta, args.samples)

    if args.format == "svg":
        labels = []
        if args.label_cells:
            for region, count in label_slice_cells(
                    beta, curves, args.extent, args.resolution,
                    args.seed_grid, tol):
                text = "?" if count is None else str(count)
                labels.append((region.centroid[0], region.centroid[1], text))
        doc = svg.render_curves(
            extent=(-args.extent, args.extent, -args.extent, args.extent),
            bifurcation=[batch_pq(c.alpha) for c in curves],
            labels=labels, title=f"bifurcation slice, beta = {beta:g}")
        with _open_out(args.out) as fh:
            fh.write(doc)
        return 0

    if args.label_cells:
        raise DomainError("--label-cells requires --format svg")
    note = "no degenerate stationary points for beta <= 2" if beta <= 2 else None
    _write_records(args, "slice_point", _slice_records(curves), note)
    return 0


# ---------------------------------------------------------------------------
# surface
# ---------------------------------------------------------------------------

def _surface_records(patches, beta_max):
    records = []
    for patch in patches:
        keep = patch.beta <= beta_max
        pq = batch_pq(patch.alpha)
        for k in np.flatnonzero(keep):
            records.append({
                "sign": patch.sign,
                "nu1": float(patch.nu[k, 0]), "nu2": float(patch.nu[k, 1]),
                "nu3": float(patch.nu[k, 2]), "beta": float(patch.beta[k]),
                "alpha1": float(patch.alpha[k, 0]),
                "alpha2": float(patch.alpha[k, 1]),
                "alpha3": float(patch.alpha[k, 2]),
                "p": float(pq[k, 0]), "q": float(pq[k, 1]),
            })
    return records


def _surface_mesh_obj(fh, grid, beta_max):
    """Triangulated (p, q, beta) mesh of both sheets, OBJ-style text."""
    from .model import batch_catastrophe
    d = grid
    fh.write(f"# potts-landscape v1 surface mesh, grid {d}\n")
    offset = 0
    for sign in (+1, -1):
        index = {}
        vertices = []
        for i in range(1, d):
            for j in range(1, d - i):
                nu = np.array([i, j, d - i - j], dtype=float) / d
                inv = 1.0 / nu
                s1 = inv.sum()
                s2 = inv[0] * inv[1] + inv[0] * inv[2] + inv[1] * inv[2]
                disc = max(s1 * s1 / 9.0 - s2 / 3.0, 0.0)
                beta = s1 / 3.0 + sign * math.sqrt(disc)
                if not (0.0 < beta <= beta_max):
                    continue
                alpha = batch_catastrophe(beta, nu)
                p, q = batch_pq(alpha)
                index[(i, j)] = len(vertices) + 1
                vertices.append((float(p), float(q), float(beta)))
        fh.write(f"o sheet_{'plus' if sign > 0 else 'minus'}\n")
        for v in vertices:
            fh.write(f"v {v[0]!r} {v[1]!r} {v[2]!r}\n")
        for i in range(1, d):
            for j in range(1, d - i):
                up = ((i, j), (i + 1, j), (i, j + 1))
                down = ((i + 1, j), (i + 1, j + 1), (i, j + 1))
                for tri in (up, down):
                    if all(v in index for v in tri):
                        fh.write("f " + " ".join(
                            str(index[v] + offset) for v in tri) + "\n")
        offset += len(vertices)


def cmd_surface(args) -> int:
    if args.grid < 16:
        raise DomainError(f"--grid must be >= 16, got {args.grid}")
    if args.format == "obj":
        with _open_out(args.out) as fh:
            _surface_mesh_obj(fh, args.grid, args.beta_max)
        return 0
    if args.format == "svg":
        raise DomainError("surface supports csv, json or obj output")
    plus, minus = surface_patches(args.grid)
    _write_records(args, "surface_point", _surface_records((plus, minus),
                                                           args.beta_max))
    return 0


# ---------------------------------------------------------------------------
# census
# ---------------------------------------------------------------------------

def _census_records(cens):
    records = []
    glob = {id(p) for p in cens.global_minimizers}
    alpha = cens.params.alpha
    for p in cens.points:
        records.append({
            "beta": cens.params.beta,
            "alpha1": alpha.a1, "alpha2": alpha.a2, "alpha3": alpha.a3,
            "nu1": p.nu.v1, "nu2": p.nu.v2, "nu3": p.nu.v3,
            "eig_lo": p.hess_eigenvalues[0], "eig_hi": p.hess_eigenvalues[1],
            "kind": p.kind.value, "value": p.value,
            "is_global_min": int(id(p) in glob),
            "n_local_minima": cens.n_local_minima,
            "degenerate_warning": int(cens.degenerate_warning),
        })
    return records


def cmd_census(args) -> int:
    alpha = _parse_alpha(args)
    params = ModelParams(args.beta, alpha)
    cens = census(params, grid_density=args.seed_grid, tol=_tolerances(args))
    if args.out in (None, "-") and args.format == "csv" and not args.records:
        print(f"beta = {params.beta!r}, alpha = ({alpha.a1!r}, {alpha.a2!r}, "
              f"{alpha.a3!r})")
        print(f"local minima: {cens.n_local_minima}"
              + ("  [degenerate point present]" if cens.degenerate_warning
                 else ""))
        for p in cens.points:
            star = "*" if p in cens.global_minimizers else " "
            print(f" {star} {p.kind.value:<10} nu = ({p.nu.v1:.12f}, "
                  f"{p.nu.v2:.12f}, {p.nu.v3:.12f})  f = {p.value:.12f}")
        print(f"global minimizers: {len(cens.global_minimizers)}")
        return 0
    _write_records(args, "census", _census_records(cens))
    return 0


# ---------------------------------------------------------------------------
# critical
# ---------------------------------------------------------------------------

def cmd_critical(args) -> int:
    temps = all_critical_temps()
    if args.out in (None, "-") and args.format == "csv" and not args.records:
        print(f"butterfly   {temps.butterfly!r}   (= 18/7)")
        print(f"cross       {temps.cross!r}")
        print(f"ellis_wang  {temps.ellis_wang!r}   (= 4 log 2)")
        print(f"touch       {temps.touch!r}")
        print(f"umbilic     {temps.umbilic!r}")
        return 0
    _write_records(args, "critical_temps", [dataclasses.asdict(temps)])
    return 0


# ---------------------------------------------------------------------------
# maxwell
# ---------------------------------------------------------------------------

def _maxwell_record(beta, section, index, alpha_arr, depth, minimizers):
    u, v = batch_uv(alpha_arr)
    x, y = batch_xy(alpha_arr)
    rec = {
        "beta": beta, "section": section, "index": index,
        "alpha1": float(alpha_arr[0]), "alpha2": float(alpha_arr[1]),
        "alpha3": float(alpha_arr[2]),
        "u": float(u), "v": float(v), "x": float(x), "y": float(y),
        "depth": depth, "n_minimizers": len(minimizers),
    }
    for k in range(4):
        for c in range(3):
            rec[f"m{k + 1}_nu{c + 1}"] = (float(minimizers[k][c])
                                          if k < len(minimizers) else None)
    return rec


def _swap12(arr):
    return np.asarray(arr)[..., [1, 0, 2]]


def _maxwell_data(beta, step, segment_samples, tol):
    """All coexistence constructs at one inverse temperature."""
    records = []
    curves_uv = []
    triple = None
    if beta <= 2.0:
        return records, curves_uv, triple

    tp = None
    if BETA_BUTTERFLY < beta < BETA_ELLIS_WANG:
        tp = triple_point(beta, tol=tol)
        segment = symmetric_segment(beta, tol=tol)
    else:
        segment = symmetric_segment(beta, tol=tol)

    for k, pt in enumerate(track_segment_pair(segment, n=segment_samples,
                                              tol=tol)):
        records.append(_maxwell_record(
            beta, "segment", k, pt.alpha.array, pt.depth,
            [m.array for m in pt.minimizers]))

    if tp is not None:
        triple = tp
        records.append(_maxwell_record(
            beta, "triple", 0, tp.alpha.array, tp.depth,
            [m.array for m in tp.minimizers]))
        curve = coexistence_curve(beta, step=step, tol=tol, origin=tp)
        arm = [(p.alpha.array, p.depth, [m.array for m in p.minimizers])
               for p in curve.points]
        mirror = [(_swap12(a), d, [_swap12(m) for m in ms])
                  for a, d, ms in arm]
        for section, data in (("curve", arm), ("curve_mirror", mirror)):
            for k, (a, d, ms) in enumerate(data):
                records.append(_maxwell_record(beta, section, k, a, d, ms))
            curves_uv.append(np.array([batch_uv(a) for a, _, _ in data]))

    if beta >= BETA_ELLIS_WANG:
        bew = beyond_ellis_wang_segment(beta, tol=tol)
        cens = bew.uniform_census
        records.append(_maxwell_record(
            beta, "uniform", 0, AprioriMeasure.uniform().array,
            cens.global_minimizers[0].value if cens.global_minimizers else 0.0,
            [p.nu.array for p in cens.global_minimizers]))
    return records, curves_uv, triple


def cmd_maxwell(args) -> int:
    beta = args.beta
    if beta <= 0:
        raise DomainError(f"beta must be positive, got {beta}")
    tol = _tolerances(args)
    records, curves_uv, triple = _maxwell_data(beta, args.step,
                                               args.segment_samples, tol)
    if args.format == "svg":
        maxwell_lines = []
        seg_pts = [(r["p"], r["q"]) for r in
                   ({"p": SQRT3 * (rec["u"] - rec["v"]),
                     "q": rec["u"] + rec["v"]} for rec in records
                    if rec["section"] == "segment")]
        if seg_pts:
            maxwell_lines.append(np.array(seg_pts))
        for uv in curves_uv:
            pq = np.stack([SQRT3 * (uv[:, 0] - uv[:, 1]),
                           uv[:, 0] + uv[:, 1]], axis=-1)
            maxwell_lines.append(pq)
        markers = []
        if triple is not None:
            p, q = batch_pq(triple.alpha.array)
            markers.append((float(p), float(q)))
        bif = ([batch_pq(c.alpha) for c in slice_curves(beta, 400)]
               if beta > 2.0 else [])
        doc = svg.render_curves(
            extent=(-args.extent, args.extent, -args.extent, args.extent),
            bifurcation=bif, maxwell=maxwell_lines, markers=markers,
            title=f"coexistence sets, beta = {beta:g}")
        with _open_out(args.out) as fh:
            fh.write(doc)
        return 0
    note = "no coexistence for beta <= 2" if beta <= 2.0 else None
    _write_records(args, "maxwell_point", records, note)
    return 0


# ---------------------------------------------------------------------------
# potential
# ---------------------------------------------------------------------------

def _potential_grid(beta, alpha, n):
    xs = np.linspace(-SQRT3 / 2, SQRT3 / 2, n)
    ys = np.linspace(-0.5, 1.0, n)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    nu = batch_from_xy(np.stack([gx, gy], axis=-1))
    inside = nu.min(axis=-1) > 1e-9
    values = np.full(gx.shape, np.nan)
    values[inside] = batch_free_energy(beta, alpha.array, nu[inside])
    return xs, ys, nu, values


def cmd_potential(args) -> int:
    alpha = _parse_alpha(args)
    params = ModelParams(args.beta, alpha)
    if args.grid < 16:
        raise DomainError(f"--grid must be >= 16, got {args.grid}")
    xs, ys, nu, values = _potential_grid(params.beta, alpha, args.grid)

    if args.format == "svg":
        cens = census(params, grid_density=args.seed_grid,
                      tol=_tolerances(args))
        minima = [tuple(batch_xy(p.nu.array))
                  for p in cens.points if p.kind is PointKind.MINIMUM]
        doc = svg.render_potential(
            xs, ys, values, minima=minima,
            title=f"free energy, beta = {params.beta:g}")
        with _open_out(args.out) as fh:
            fh.write(doc)
        return 0

    records = []
    for i in range(len(xs)):
        for j in range(len(ys)):
            if not np.isfinite(values[i, j]):
                continue
            records.append({
                "beta": params.beta, "x": float(xs[i]), "y": float(ys[j]),
                "nu1": float(nu[i, j, 0]), "nu2": float(nu[i, j, 1]),
                "nu3": float(nu[i, j, 2]), "f": float(values[i, j]),
            })
    _write_records(args, "potential_grid", records)
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="potts-landscape",
        description="Phase diagrams of the three-state mean-field Potts "
                    "model in a vector-valued external field.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, formats=("csv", "json", "svg")):
        p.add_argument("--format", choices=formats, default="csv")
        p.add_argument("--out", default=None,
                       help="output path ('-' or omitted: stdout)")
        p.add_argument("--tol", type=float, default=None,
                       help="stationarity residual tolerance override")
        p.add_argument("--seed-grid", type=int, default=64,
                       help="seed lattice density for censuses")
        p.add_argument("--records", action="store_true",
                       help="force record output instead of a summary table")

    p = sub.add_parser("slice", help="constant-temperature bifurcation slice")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--samples", type=int, default=400,
                   help="samples per parameter interval")
    p.add_argument("--label-cells", action="store_true",
                   help="annotate each cell with its minima count (svg)")
    p.add_argument("--extent", type=float, default=6.0,
                   help="half-width of the (p, q) window")
    p.add_argument("--resolution", type=int, default=512,
                   help="raster resolution for cell detection")
    common(p)
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("surface", help="parametric bifurcation surface")
    p.add_argument("--beta-max", type=float, default=6.0)
    p.add_argument("--grid", type=int, default=64)
    common(p, formats=("csv", "json", "obj"))
    p.set_defaults(func=cmd_surface)

    p = sub.add_parser("census", help="stationary points at one parameter")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--alpha", default=None,
                   help="a-priori measure a1,a2,a3")
    p.add_argument("--uv", default=None, help="field in log-ratio coords u,v")
    common(p, formats=("csv", "json"))
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("critical", help="the five critical temperatures")
    common(p, formats=("csv", "json"))
    p.set_defaults(func=cmd_critical)

    p = sub.add_parser("maxwell", help="coexistence segments, triple points "
                                       "and curves")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--step", type=float, default=0.005,
                   help="continuation step for the coexistence curve")
    p.add_argument("--segment-samples", type=int, default=40)
    p.add_argument("--extent", type=float, default=6.0)
    common(p)
    p.set_defaults(func=cmd_maxwell)

    p = sub.add_parser("potential", help="free-energy grid over the simplex")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--alpha", default=None)
    p.add_argument("--uv", default=None)
    p.add_argument("--grid", type=int, default=128)
    common(p)
    p.set_defaults(func=cmd_potential)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
