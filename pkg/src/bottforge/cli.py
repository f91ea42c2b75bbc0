"""Command-line entry point and JSON persistence of sampled bundles."""
import argparse
import csv
import json
import sys

import numpy as np

from . import bott, examples, invariants, tables
from .clifford import GeneratorSet, PhysicalOps, build_generators, parse_class, real_class, verify_generator_set
from .linalg_core import NambuSpace, Subspace, operator_flags
from .periodicity import double_11, doubled_context
from .spaces import DEFAULT_RESOLUTION, SampledBundle, check_bundle, sphere_from_kinds

SCHEMA_VERSION = 1

# (s, n) -> basis change taking the (1,1) doubled standard generators of class s
# to the standard generators of class s+1 on 2n bands
STANDARD_LIFTS = {(1, 2): examples.LAYOUT_TO_BDG_SPIN_PH}


class ValidationError(Exception):
    pass


# ---------------------------------------------------------------- encoding

def encode_matrix(M):
    M = np.asarray(M, dtype=complex)
    if M.ndim == 1:
        M = M[:, None]
    flat = M.flatten(order="F")
    return {"shape": list(M.shape), "data": [[float(z.real), float(z.imag)] for z in flat]}


def decode_matrix(obj, what="matrix"):
    try:
        shape = tuple(int(x) for x in obj["shape"])
        data = np.array(obj["data"], dtype=float)
        if len(shape) != 2 or data.shape != (shape[0] * shape[1], 2):
            raise ValueError
    except (KeyError, TypeError, ValueError):
        raise ValidationError(f"{what}: malformed matrix record") from None
    z = np.empty(len(data), dtype=complex)
    # assign parts separately so signed zeros survive the round trip
    z.real, z.imag = data[:, 0], data[:, 1]
    return z.reshape(shape, order="F")


def bundle_to_dict(b):
    g = b.gens
    M = b.space
    out = {
        "schema_version": SCHEMA_VERSION,
        "class": g.cls.name if g.cls is not None else None,
        "n": g.n,
        "label": b.label,
        "bracket": encode_matrix(g.space.S),
        "generators": [encode_matrix(J) for J in g.J],
        "generator_labels": list(g.labels),
        "time_reversal": encode_matrix(g.phys.T) if g.phys is not None and g.phys.T is not None else None,
        "space": {"dx": M.dx, "dk": M.dk, "kinds": list(M.kinds), "resolution": M.resolution, "size": M.size},
        "frames": [encode_matrix(f.frame) for f in b.fibers],
    }
    return out


def _require(obj, key, kind):
    if key not in obj:
        raise ValidationError(f"missing field {key!r}")
    if not isinstance(obj[key], kind):
        raise ValidationError(f"field {key!r} has the wrong type")
    return obj[key]


def bundle_from_dict(obj, validate=True):
    if not isinstance(obj, dict):
        raise ValidationError("bundle file must hold a JSON object")
    version = _require(obj, "schema_version", int)
    if version != SCHEMA_VERSION:
        raise ValidationError(f"unsupported schema_version {version}")
    n = _require(obj, "n", int)
    name = obj.get("class")
    try:
        cls = parse_class(name) if name is not None else None
        sp = NambuSpace(n, decode_matrix(obj["bracket"], "bracket") if obj.get("bracket") else None)
    except ValueError as exc:
        raise ValidationError(f"class/bracket: {exc}") from None
    J = [decode_matrix(m, f"generator {i}") for i, m in enumerate(_require(obj, "generators", list))]
    for i, m in enumerate(J):
        if m.shape != (sp.dim, sp.dim):
            raise ValidationError(f"generator {i} has shape {m.shape}, expected {(sp.dim, sp.dim)}")
    labels = obj.get("generator_labels") or [f"J{i + 1}" for i in range(len(J))]
    T = obj.get("time_reversal")
    phys = PhysicalOps(decode_matrix(T, "time_reversal"), None, None, None, ()) if T else None
    gens = GeneratorSet(cls, n, sp, J, [operator_flags(m, sp) for m in J], phys, list(labels))
    if validate and J:
        rep = verify_generator_set(gens, tol=1e-10)
        if not rep.ok:
            raise ValidationError(f"generators fail the Clifford relations (max residual {rep.max_residual:.2e})")

    rec = _require(obj, "space", dict)
    kinds = tuple(rec.get("kinds", ()))
    try:
        M = sphere_from_kinds(kinds, int(rec.get("resolution", 0))) if kinds else sphere_from_kinds(())
    except ValueError as exc:
        raise ValidationError(f"space: {exc}") from None
    if (M.dx, M.dk) != (rec.get("dx"), rec.get("dk")):
        raise ValidationError("space: dx/dk disagree with the suspension kinds")
    frames = _require(obj, "frames", list)
    if len(frames) != M.size:
        raise ValidationError(f"space: {len(frames)} frames for {M.size} sample points")
    fibers = []
    for i, fr in enumerate(frames):
        F = decode_matrix(fr, f"frame {i}")
        if F.shape[0] != sp.dim:
            raise ValidationError(f"frame {i} has {F.shape[0]} rows, expected {sp.dim}")
        orthonormal = np.abs(F.conj().T @ F - np.eye(F.shape[1])).max(initial=0) < 1e-12
        fibers.append(Subspace(F, sp, orthonormal=orthonormal))
    b = SampledBundle(M, fibers, gens, label=obj.get("label", ""))
    if validate:
        rep = check_bundle(b)
        if not rep.ok:
            raise ValidationError("bundle invariant violated: " + "; ".join(rep.failures[:3]))
    return b


def dumps(b):
    return json.dumps(bundle_to_dict(b), separators=(",", ":")) + "\n"


def load_bundle(path, validate=True):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}") from None
    except OSError as exc:
        raise ValidationError(str(exc)) from None
    return bundle_from_dict(obj, validate)


def save_bundle(b, path):
    with open(path, "w") as fh:
        fh.write(dumps(b))


# ---------------------------------------------------------------- suspension

def suspend_bundle(b, kind, resolution=None):
    """Momentum type: (1,1)-double then beta with the imaginary K. Position type: beta with K = J_s."""
    g = b.gens
    resolution = resolution or b.space.resolution or DEFAULT_RESOLUTION
    if g.cls is None or not g.cls.is_real:
        raise ValidationError("suspension is implemented for the real classes")
    if kind == bott.POSITION:
        ctx = bott.position_context(g)
        out = bott.suspend(b, ctx, resolution)
        out.gens.cls = real_class(g.cls.s - 1) if g.cls.s >= 1 else None
        return out
    if g.cls.s >= 7:
        raise ValidationError("momentum suspension past s = 7 is not available")
    dctx = doubled_context(g)
    fibers = [double_11(f, dctx) for f in b.fibers]
    ctx = bott.momentum_context(dctx)
    U = STANDARD_LIFTS.get((g.cls.s, g.n))
    target = real_class(g.cls.s + 1)
    if U is not None and _is_standard(g):
        std = build_generators(target, 2 * g.n)
        ctx = ctx.transformed(U, std.space)
        ctx.gens.phys = std.phys
        fibers = [Subspace(U @ f.frame, std.space, orthonormal=True) for f in fibers]
    ctx.gens.cls = target
    lifted = SampledBundle(b.space, fibers, ctx.gens)
    return bott.suspend(lifted, ctx, resolution)


def _is_standard(g):
    try:
        std = build_generators(g.cls, g.n)
    except ValueError:
        return False
    return g.space == std.space and all(np.abs(a - b).max() < 1e-12 for a, b in zip(g.J, std.J)) and len(g.J) == len(std.J)


# ---------------------------------------------------------------- reporting

def _jsonable(v):
    if isinstance(v, (np.floating, float)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def invariant_summary(res, space=None):
    diag = {k: v for k, v in res.diagnostics.items() if not isinstance(v, (list, np.ndarray)) or len(v) <= 8}
    out = {"kind": res.kind, "value": res.value, "raw": res.raw, "nontrivial": res.nontrivial, "diagnostics": diag}
    if res.kind == "KaneMeleZ2" and space is not None and space.dim == 2:
        ang = space.angles()
        zs = res.diagnostics["zeros"]
        out["zero_count"] = len(zs)
        out["zero_k0"] = sorted({round(float(ang[z, 0]), 6) for z in zs})
    return _jsonable(out)


def _print(obj, stream):
    stream.write(json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------- subcommands

def cmd_verify(args, out):
    b = load_bundle(args.bundle, validate=False)
    rep = check_bundle(b)
    g = verify_generator_set(b.gens, tol=1e-10) if b.gens.J else None
    _print({
        "ok": rep.ok and (g is None or g.ok),
        "equivariance": rep.equivariance, "membership": rep.membership, "base": rep.base,
        "continuity": rep.continuity, "failures": rep.failures,
        "generator_max_residual": None if g is None else g.max_residual,
    }, out)
    return 0 if rep.ok and (g is None or g.ok) else 1


def cmd_suspend(args, out):
    b = load_bundle(args.bundle)
    try:
        new = suspend_bundle(b, args.kind, args.res)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    new.label = f"{b.label}+{args.kind}" if b.label else args.kind
    save_bundle(new, args.out)
    _print({"written": args.out, "class": new.gens.cls.name if new.gens.cls else None,
            "dx": new.space.dx, "dk": new.space.dk, "points": new.space.size}, out)
    return 0


def _qsh_like(b):
    return b.gens.space.dim == 8 and b.space.dim == 2


def cmd_invariant(args, out):
    b = load_bundle(args.bundle)
    try:
        if args.kind == "chern":
            if args.sector is None:
                sel = None
            elif _qsh_like(b):
                sel = invariants.sector_selector(examples.qsh_spin_sector_operator(1 if args.sector == "up" else -1))
            else:
                raise ValidationError("spin sectors are defined for the 8-dimensional QSH representation")
            res = invariants.chern_number(b, sel)
        elif args.kind == "winding":
            res = invariants.bundle_winding(b)
        elif args.kind == "kane-mele":
            if b.gens.phys is None or b.gens.phys.T is None:
                raise ValidationError("bundle file carries no time-reversal operator")
            res = invariants.kane_mele_zero_locus(b)
        else:
            if b.gens.space.n == 2:
                per = invariants.class_d_per_sector(b, examples.diii_spin_sectors())
                summary = {k: invariant_summary(v) for k, v in per.items()}
                _print(summary, out)
                _emit_csv(args, b, None)
                return 0
            res = invariants.class_d_1d_invariant(b)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    _print(invariant_summary(res, b.space), out)
    _emit_csv(args, b, res)
    return 0


def _emit_csv(args, b, res):
    if not args.csv:
        return
    with open(args.csv, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if args.kind == "kane-mele":
            pf = invariants.sewing_pfaffians(b)
            ang = b.space.angles()
            w.writerow(["point", "k0", "k1", "abs_pf"])
            for i, (a, v) in enumerate(zip(ang, pf)):
                w.writerow([i, repr(float(a[0])), repr(float(a[1])), repr(float(v))])
        else:
            w.writerow(["point"] + [f"x{i}" for i in range(b.space.points.shape[1])] + ["dim"])
            for i, (p, f) in enumerate(zip(b.space.points, b.fibers)):
                w.writerow([i] + [repr(float(x)) for x in p] + [f.dim])


def cmd_table(args, out):
    render = {
        "periodic": tables.render_periodic_table,
        "unstable": tables.render_unstable_table,
        "changes": tables.render_unstable_changes,
    }[args.which]
    out.write(render(args.format))
    return 0


def cmd_bounds(args, out):
    try:
        c = parse_class(args.cls)
        res = tables.stability_bounds(c, args.n, args.p, args.q)
        info = tables.classifying_space(c, args.n).to_json()
        extra = None
        if c.name in tables.GRASSMANNIAN_CLASSES and args.q is not None:
            extra = tables.band_addition_bounds(c, args.q).describe()
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    rows = [{"dx": u.dx, "dk": u.dk, "condition": u.condition, "annotation": u.annotation}
            for u in tables.unstable_cases() if u.cls == c.name]
    _print({"bounds": res.to_json(), "classifying_space": info, "band_addition": extra,
            "unstable_cases": rows}, out)
    return 0


def cmd_example(args, out):
    try:
        ex = examples.EXAMPLES[args.name](args.res)
    except ValueError as exc:
        raise ValidationError(str(exc)) from None
    save_bundle(ex.bundle, args.out)
    _print({"written": args.out, "label": ex.label, "points": ex.bundle.space.size,
            "closed_form_distance": ex.max_closed_form_distance()}, out)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="bottforge", description="Sampled classifying maps and their invariants.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="check a bundle file")
    v.add_argument("bundle")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("suspend", help="apply the diagonal map")
    s.add_argument("bundle")
    s.add_argument("--kind", choices=(bott.MOMENTUM, bott.POSITION), required=True)
    s.add_argument("--out", required=True)
    s.add_argument("--res", type=int, default=None)
    s.set_defaults(func=cmd_suspend)

    i = sub.add_parser("invariant", help="compute a topological invariant")
    i.add_argument("bundle")
    i.add_argument("--kind", choices=("chern", "winding", "kane-mele", "class-d"), required=True)
    i.add_argument("--sector", choices=("up", "down"), default=None)
    i.add_argument("--csv", default=None, help="write a per-point CSV grid")
    i.set_defaults(func=cmd_invariant)

    t = sub.add_parser("table", help="print a classification table")
    t.add_argument("--format", choices=tables.FORMATS, default="txt")
    t.add_argument("--which", choices=("periodic", "unstable", "changes"), default="periodic")
    t.set_defaults(func=cmd_table)

    b = sub.add_parser("bounds", help="stability bounds for a class")
    b.add_argument("--class", dest="cls", required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--p", type=int, default=None)
    b.add_argument("--q", type=int, default=None)
    b.set_defaults(func=cmd_bounds)

    e = sub.add_parser("example", help="write a worked example bundle")
    e.add_argument("name", choices=sorted(examples.EXAMPLES))
    e.add_argument("--res", type=int, default=32)
    e.add_argument("--out", required=True)
    e.set_defaults(func=cmd_example)
    return p


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        return args.func(args, out)
    except ValidationError as exc:
        err.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
