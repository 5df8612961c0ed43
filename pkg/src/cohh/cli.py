"""Command dispatch and machine-readable reports.

Every command reads a document, runs one operation, prints a JSON report to
stdout (deterministic: sorted keys, exact scalar strings, canonical bases)
and a short human summary to stderr.  Exit codes: 0 success, 2 validation
failure, 3 mathematical verdict "false", 4 usage error.
"""

import argparse
import json
import sys

from .fields import FieldMismatch, ShapeMismatch
from .linalg import Matrix, format_combination
from . import coalgebra as _coalg
from .coalgebra import (
    cohh0, dual_algebra, hh0_of_algebra, NotCoassociative, CounitFailure, DuplicateLabel,
)
from . import comodule as _comod
from .comodule import (
    cotensor, cohh0_coeff, shadow_theta, comodule_to_module, regular_bicomodule,
    CoactionNotCoassociative, CoactionNotCounital, BicomoduleSquareFails,
    CoalgebraMismatch, NotColinear, InternalError,
)
from .traces import (
    hs_cotrace, colinear_trace, dual_pair_cofree, dual_pair_findim, bicat_trace,
    bicat_trace_left, cyclicity_check, morita_comatrix,
    NotInjectiveComodule, TriangleIdentityFailure,
)
from . import dg as _dg
from .dg import (
    GradedCoalgebra, GradedBicomodule, regular_graded_bicomodule,
    conormalized_cobar, cotor, dg_cohh, cohh_envelope, derived_shadow_theta,
    DifferentialNotSquareZero, NotChainMap, NotSimplyConnected, CutoffTooSmall,
)
from .document import (
    load_document, parse_field, field_spec, ParseError, UnknownReference,
    SequenceNotExact,
)


VALIDATION_ERRORS = (
    ParseError, UnknownReference, SequenceNotExact, FieldMismatch, ShapeMismatch,
    NotCoassociative, CounitFailure, DuplicateLabel, CoactionNotCoassociative,
    CoactionNotCounital, BicomoduleSquareFails, CoalgebraMismatch, NotColinear,
    DifferentialNotSquareZero, NotChainMap, NotSimplyConnected, CutoffTooSmall,
    InternalError, TriangleIdentityFailure, OSError, ValueError,
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _combo(row_or_dict, labels, field):
    return format_combination(row_or_dict, labels, field)


def _subspace_basis(sub, labels, field):
    return [_combo(sub.basis.row(i), labels, field) for i in range(sub.dim)]


def _matrix_rows(m, field):
    return [[field.to_str(m[(i, j)]) for j in range(m.cols)] for i in range(m.rows)]


def _column(m, labels, field, col=0):
    return _combo({i: v for (i, c), v in m.entries.items() if c == col}, labels, field)


def _homology_table(h):
    return [{"total_degree": t, "dim": h[t]} for t in sorted(h)]


def _bigraded_table(b):
    if b is None:
        return None
    return [{"word_length": q, "total_degree": t, "dim": d}
            for (q, t), d in sorted(b.items())]


def _word_label(word, m, c, n=None):
    if n is None:
        i, w = word
        return "%s[%s]" % (m.labels[i], "|".join(c.labels[l] for l in w))
    i, w, j = word
    return "%s[%s]%s" % (m.labels[i], "|".join(c.labels[l] for l in w), n.labels[j])


def _graded_coalgebra(doc, name):
    c = doc.coalgebra(name)
    if not isinstance(c, GradedCoalgebra):
        raise CoalgebraMismatch("%r is not a graded coalgebra" % name)
    return c


def _graded_bicomodule(doc, name):
    m = doc.bicomodule(name)
    if not isinstance(m, GradedBicomodule):
        raise CoalgebraMismatch("%r is not a graded bicomodule" % name)
    return m


def _ungraded_bicomodule(doc, name):
    m = doc.bicomodule(name)
    if isinstance(m, GradedBicomodule):
        raise CoalgebraMismatch("%r is graded; this command expects a discrete bicomodule" % name)
    return m


def _endomorphism(doc, name, m):
    f = doc.map(name)
    if f.source is not m or f.target is not m:
        raise CoalgebraMismatch("map %r is not an endomorphism of the given bicomodule" % name)
    return f


# -- command handlers ------------------------------------------------------------


def cmd_check(doc, args):
    result = {"coalgebras": {}, "bicomodules": {}, "maps": {}, "sequences": {}}
    for name in sorted(doc.coalgebras):
        c = doc.coalgebras[name]
        entry = {"dim": c.dim, "valid": True}
        if isinstance(c, GradedCoalgebra):
            entry["graded"] = True
            entry["simply_connected"] = c.simply_connected
            entry["degrees"] = sorted(c.dims_by_degree().items())
        else:
            entry["graded"] = False
            entry["cocommutative"] = c.is_cocommutative()
        result["coalgebras"][name] = entry
    for name in sorted(doc.bicomodules):
        m = doc.bicomodules[name]
        result["bicomodules"][name] = {
            "dim": m.dim, "valid": True,
            "graded": isinstance(m, GradedBicomodule),
        }
    for name in sorted(doc.maps):
        result["maps"][name] = {"colinear": True}
    for name in sorted(doc.sequences):
        s = doc.sequences[name]
        result["sequences"][name] = {
            "exact": True,
            "endomorphisms_compatible": s.endomorphisms is not None or None,
        }
    summary = "document valid: %d coalgebras, %d bicomodules, %d maps, %d sequences" % (
        len(doc.coalgebras), len(doc.bicomodules), len(doc.maps), len(doc.sequences))
    return {"objects": result}, [], summary


def cmd_cohh0(doc, args):
    c = doc.coalgebra(args.coalgebra)
    sub = cohh0(c)
    result = {"coalgebra": args.coalgebra, "dim": sub.dim,
              "basis": _subspace_basis(sub, c.labels, doc.field)}
    return result, [], "cohh0(%s): dim %d" % (args.coalgebra, sub.dim)


def cmd_cohh0_coeff(doc, args):
    m = _ungraded_bicomodule(doc, args.bicomodule)
    sub = cohh0_coeff(m)
    result = {"bicomodule": args.bicomodule, "dim": sub.dim,
              "basis": _subspace_basis(sub, m.labels, doc.field)}
    return result, [], "coHH_0(%s): dim %d" % (args.bicomodule, sub.dim)


def cmd_cotensor(doc, args):
    m = _ungraded_bicomodule(doc, args.m)
    n = _ungraded_bicomodule(doc, args.n)
    ct = cotensor(m, n)
    sub = ct.subspace
    result = {"m": args.m, "n": args.n, "dim": ct.dim,
              "basis": _subspace_basis(sub, ct.ambient_labels, doc.field)}
    checks = [{"name": "induced_coactions_valid", "pass": True}]
    return result, checks, "cotensor(%s, %s): dim %d" % (args.m, args.n, ct.dim)


def cmd_cotrace(doc, args):
    m = _ungraded_bicomodule(doc, args.bicomodule)
    f = _endomorphism(doc, args.map, m)
    c = m.left_coalgebra
    try:
        got = hs_cotrace(m, f)
    except NotInjectiveComodule:
        result = {"bicomodule": args.bicomodule, "map": args.map,
                  "verdict": "not_injective"}
        return result, [{"name": "finitely_cogenerated_injective", "pass": False}], \
            "cotrace(%s): not an injective comodule" % args.bicomodule
    result = {
        "bicomodule": args.bicomodule, "map": args.map,
        "kernel_basis": _subspace_basis(got.kernel, c.labels, doc.field),
        "functional": [doc.field.to_str(got.functional[(0, j)])
                       for j in range(got.functional.cols)],
    }
    return result, [{"name": "finitely_cogenerated_injective", "pass": True}], \
        "cotrace(%s, %s) computed" % (args.bicomodule, args.map)


def cmd_trace(doc, args):
    m = _ungraded_bicomodule(doc, args.bicomodule)
    f = _endomorphism(doc, args.map, m)
    got = colinear_trace(m, f)
    c = m.right_coalgebra
    result = {
        "bicomodule": args.bicomodule, "map": args.map,
        "element": _column(got.element, c.labels, doc.field),
        "coords": [doc.field.to_str(got.coords[(i, 0)]) for i in range(got.coords.rows)],
        "kernel_basis": _subspace_basis(got.kernel, c.labels, doc.field),
    }
    checks = [{"name": "lies_in_cocommutator_subspace", "pass": True}]
    return result, checks, "trace(%s, %s) = %s" % (args.bicomodule, args.map,
                                                   result["element"])


def cmd_shadow(doc, args):
    m = _ungraded_bicomodule(doc, args.m)
    n = _ungraded_bicomodule(doc, args.n)
    p = _ungraded_bicomodule(doc, args.with_p) if args.with_p else None
    th = shadow_theta(m, n, p=p)
    checks = [{"name": k, "pass": bool(v)} for k, v in sorted(th.reports.items())]
    result = {
        "m": args.m, "n": args.n,
        "dim_mn": th.source_kernel.dim, "dim_nm": th.target_kernel.dim,
        "theta": _matrix_rows(th.matrix, doc.field),
    }
    return result, checks, "shadow(%s, %s): dim %d" % (args.m, args.n, th.source_kernel.dim)


def cmd_dual_pair(doc, args):
    if args.mode == "cofree":
        if not args.args or len(args.args) > 3 or len(args.args) < 2:
            raise UsageError("dual-pair cofree C V_DIM [D]")
        c = doc.coalgebra(args.args[0])
        v_dim = int(args.args[1])
        d = doc.coalgebra(args.args[2]) if len(args.args) == 3 else None
        pair = dual_pair_cofree(c, v_dim, d)
        inputs = {"mode": "cofree", "coalgebra": args.args[0], "v_dim": v_dim,
                  "d": args.args[2] if len(args.args) == 3 else "k"}
    elif args.mode == "findim":
        if len(args.args) != 1:
            raise UsageError("dual-pair findim M")
        m = _ungraded_bicomodule(doc, args.args[0])
        pair = dual_pair_findim(m)
        inputs = {"mode": "findim", "bicomodule": args.args[0]}
    else:
        raise UsageError("dual-pair mode must be 'cofree' or 'findim'")
    result = dict(inputs)
    result.update({
        "dim_m": pair.m.dim, "dim_m_star": pair.m_star.dim,
        "dim_m_cot_mstar": pair.ct_m_mstar.dim,
        "dim_mstar_cot_m": pair.ct_mstar_m.dim,
    })
    checks = [{"name": "triangle_identities", "pass": True}]
    return result, checks, "dual pair verified (dim M = %d)" % pair.m.dim


def cmd_bicat_trace(doc, args):
    m = _ungraded_bicomodule(doc, args.bicomodule)
    f = _endomorphism(doc, args.map, m)
    field = doc.field
    if m.left_coalgebra.is_trivial():
        pair = dual_pair_findim(m)
        tr = bicat_trace(pair, f)
        agree = colinear_trace(m, f)
        checks = [{"name": "agrees_with_colinear_trace",
                   "pass": tr.matrix == agree.coords}]
        route = "findim_right"
    elif m.right_coalgebra.is_trivial():
        tr, split = bicat_trace_left(m, f)
        agree = hs_cotrace(m, f, splitting=split)
        checks = [{"name": "agrees_with_hs_cotrace",
                   "pass": tr.matrix == agree.functional}]
        route = "injective_left"
    else:
        raise UsageError("bicat-trace handles left comodules (over (C,k)) and "
                         "right comodules (over (k,C)) only")
    result = {
        "bicomodule": args.bicomodule, "map": args.map, "route": route,
        "matrix": _matrix_rows(tr.matrix, field),
        "source_dim": tr.source_kernel.dim, "target_dim": tr.target_kernel.dim,
    }
    return result, checks, "bicategorical trace via %s" % route


def cmd_cyclicity(doc, args):
    f = doc.map(args.f)
    g = doc.map(args.g)
    if f.source is not g.target or f.target is not g.source:
        raise CoalgebraMismatch("cyclicity needs f: M -> N and g: N -> M")
    m, n = f.source, f.target
    pm = dual_pair_findim(m)
    pn = dual_pair_findim(n)
    ok = cyclicity_check(f, g, pm, pn)
    checks = [{"name": "trace_fg_equals_trace_gf", "pass": ok}]
    result = {"f": args.f, "g": args.g}
    return result, checks, "cyclicity: %s" % ("holds" if ok else "FAILS")


def cmd_morita(doc, args):
    c = doc.coalgebra(args.coalgebra)
    rep = morita_comatrix(c, args.n)
    checks = [
        {"name": "coevaluation_iso", "pass": rep.coev_iso},
        {"name": "evaluation_iso", "pass": rep.ev_iso},
        {"name": "triangle_identities", "pass": rep.triangles_ok},
        {"name": "reverse_triangle_identities", "pass": rep.reverse_triangles_ok},
        {"name": "chi_invertible_with_inverse_chi_star", "pass": rep.chi_invertible},
        {"name": "cohh0_dims_match", "pass": rep.dims_match},
    ]
    result = {
        "coalgebra": args.coalgebra, "n": args.n,
        "cohh0_dim": rep.cohh0_c, "cohh0_comatrix_dim": rep.cohh0_mnc,
        "chi": _matrix_rows(rep.chi.matrix, doc.field) if rep.chi else None,
    }
    return result, checks, "morita(%s, n=%d): %s" % (
        args.coalgebra, args.n, "verified" if rep.ok() else "FAILED")


def _complex_result(cx, word_fmt):
    reps = {}
    for t in range(cx.tmax + 1):
        r = cx.homology_reps(t)
        labels = [word_fmt(w) for w in cx.basis.get(t, [])]
        reps[str(t)] = [_combo(r.basis.row(i), labels, cx.field) for i in range(r.dim)]
    return {
        "dims": _homology_table(cx.dims()),
        "homology": _homology_table(cx.homology_dims()),
        "homology_bases": reps,
    }


def cmd_cobar(doc, args):
    m = _graded_bicomodule(doc, args.m)
    c = _graded_coalgebra(doc, args.coalgebra)
    n = _graded_bicomodule(doc, args.n)
    cx = conormalized_cobar(m, c, n, cutoff=args.max_degree)
    result = {"m": args.m, "coalgebra": args.coalgebra, "n": args.n,
              "max_degree": args.max_degree}
    result.update(_complex_result(cx, lambda w: _word_label(w, m, c, n)))
    checks = [{"name": "differential_squares_to_zero", "pass": True},
              {"name": "euler_characteristic_audit", "pass": cx.euler_audit()}]
    return result, checks, "cobar window computed to total degree %d" % args.max_degree


def cmd_cotor(doc, args):
    m = _graded_bicomodule(doc, args.m)
    c = _graded_coalgebra(doc, args.coalgebra)
    n = _graded_bicomodule(doc, args.n)
    r = cotor(m, c, n, cutoff=args.max_degree)
    cx = r["complex"]
    result = {"m": args.m, "coalgebra": args.coalgebra, "n": args.n,
              "max_degree": args.max_degree,
              "bigraded": _bigraded_table(r["bigraded"])}
    result.update(_complex_result(cx, lambda w: _word_label(w, m, c, n)))
    checks = [{"name": "differential_squares_to_zero", "pass": True},
              {"name": "euler_characteristic_audit", "pass": cx.euler_audit()}]
    return result, checks, "CoTor computed to total degree %d" % args.max_degree


def cmd_cohh(doc, args):
    c = _graded_coalgebra(doc, args.coalgebra)
    if args.coefficients:
        m = _graded_bicomodule(doc, args.coefficients)
    else:
        m = regular_graded_bicomodule(c)
    r = dg_cohh(m, c, cutoff=args.max_degree)
    cx = r["complex"]
    result = {"coalgebra": args.coalgebra,
              "coefficients": args.coefficients or args.coalgebra,
              "max_degree": args.max_degree,
              "bigraded": _bigraded_table(r["bigraded"])}
    result.update(_complex_result(cx, lambda w: _word_label(w, m, c)))
    checks = [{"name": "differential_squares_to_zero", "pass": True},
              {"name": "euler_characteristic_audit", "pass": cx.euler_audit()}]
    return result, checks, "coHH table computed to total degree %d" % args.max_degree


def cmd_cohh_envelope(doc, args):
    c = _graded_coalgebra(doc, args.coalgebra)
    r = cohh_envelope(c, cutoff=args.max_degree)
    cx = r["complex"]
    result = {"coalgebra": args.coalgebra, "max_degree": args.max_degree,
              "dims": _homology_table(cx.dims()),
              "homology": _homology_table(cx.homology_dims())}
    checks = [{"name": "differential_squares_to_zero", "pass": True},
              {"name": "euler_characteristic_audit", "pass": cx.euler_audit()}]
    return result, checks, "envelope coHH table computed to total degree %d" % args.max_degree


def cmd_derived_shadow(doc, args):
    m = _graded_bicomodule(doc, args.m)
    n = _graded_bicomodule(doc, args.n)
    rep = derived_shadow_theta(m, n, cutoff=args.max_degree)
    checks = [
        {"name": "theta_chain_map", "pass": rep.chain_map},
        {"name": "theta_bijective_per_degree", "pass": rep.bijective},
        {"name": "cohomology_isomorphism", "pass": rep.homology_iso},
    ]
    result = {
        "m": args.m, "n": args.n, "max_degree": args.max_degree,
        "homology_mn": _homology_table(rep.side_a.complex.homology_dims()),
        "homology_nm": _homology_table(rep.side_b.complex.homology_dims()),
    }
    return result, checks, "derived shadow %s" % ("verified" if rep.ok() else "FAILED")


def cmd_to_module(doc, args):
    m = _ungraded_bicomodule(doc, args.bicomodule)
    act = comodule_to_module(m)
    c = m.right_coalgebra
    field = doc.field
    actions = {}
    for b, mat in enumerate(act.actions):
        actions["%s*" % c.labels[b]] = [
            [m.labels[src], m.labels[dst], field.to_str(v)]
            for (dst, src), v in sorted(mat.entries.items())]
    result = {"bicomodule": args.bicomodule, "dual_algebra_dim": c.dim,
              "actions": actions}
    checks = [{"name": "action_unital", "pass": True},
              {"name": "action_associative", "pass": True}]
    return result, checks, "transported to a module over the dual algebra"


HANDLERS = {
    "check": cmd_check,
    "cohh0": cmd_cohh0,
    "cohh0-coeff": cmd_cohh0_coeff,
    "cotensor": cmd_cotensor,
    "cotrace": cmd_cotrace,
    "trace": cmd_trace,
    "shadow": cmd_shadow,
    "dual-pair": cmd_dual_pair,
    "bicat-trace": cmd_bicat_trace,
    "cyclicity": cmd_cyclicity,
    "morita": cmd_morita,
    "cobar": cmd_cobar,
    "cotor": cmd_cotor,
    "cohh": cmd_cohh,
    "cohh-envelope": cmd_cohh_envelope,
    "derived-shadow": cmd_derived_shadow,
    "to-module": cmd_to_module,
}


def build_parser():
    parser = _Parser(prog="cohh", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    def add(name, *specs, max_degree=False):
        p = sub.add_parser(name)
        p.add_argument("document")
        for spec in specs:
            p.add_argument(spec)
        if max_degree:
            p.add_argument("--max-degree", type=int, default=8)
        p.add_argument("--field", dest="field", default=None)
        p.add_argument("--seed", dest="seed", type=int, default=None)
        p.add_argument("--json-only", action="store_true")
        return p

    add("check")
    add("cohh0", "coalgebra")
    add("cohh0-coeff", "bicomodule")
    add("cotensor", "m", "n")
    add("cotrace", "bicomodule", "map")
    add("trace", "bicomodule", "map")
    p = add("shadow", "m", "n")
    p.add_argument("--with-p", dest="with_p", default=None)
    p = add("dual-pair", "mode")
    p.add_argument("args", nargs="*")
    add("bicat-trace", "bicomodule", "map")
    add("cyclicity", "f", "g")
    p = add("morita", "coalgebra")
    p.add_argument("--n", type=int, default=2)
    add("cobar", "m", "coalgebra", "n", max_degree=True)
    add("cotor", "m", "coalgebra", "n", max_degree=True)
    p = add("cohh", "coalgebra", max_degree=True)
    p.add_argument("--coefficients", default=None)
    add("cohh-envelope", "coalgebra", max_degree=True)
    add("derived-shadow", "m", "n", max_degree=True)
    add("to-module", "bicomodule")
    return parser


def _emit(report, json_only, summary=None, code=0):
    sys.stdout.write(json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n")
    if summary and not json_only:
        sys.stderr.write(summary + "\n")
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        sys.stderr.write("usage error: %s\n" % e)
        return 4
    if not getattr(args, "command", None):
        sys.stderr.write("usage error: no command given\n")
        return 4
    json_only = getattr(args, "json_only", False)
    base = {"format": 1, "command": args.command, "document": args.document}
    if getattr(args, "seed", None) is not None:
        base["seed"] = args.seed
    try:
        override = parse_field(args.field) if getattr(args, "field", None) else None
        doc = load_document(args.document, field_override=override)
        base["field"] = field_spec(doc.field)
        result, checks, summary = HANDLERS[args.command](doc, args)
    except UsageError as e:
        sys.stderr.write("usage error: %s\n" % e)
        return 4
    except VALIDATION_ERRORS as e:
        report = dict(base)
        report["error"] = {"type": type(e).__name__, "message": str(e)}
        witness = getattr(e, "witness", None)
        if witness is not None:
            report["error"]["witness"] = witness
        return _emit(report, json_only, "error: %s" % e, 2)
    report = dict(base)
    report["result"] = result
    report["checks"] = checks
    failed = [c["name"] for c in checks if not c["pass"]]
    verdict_false = bool(failed) or result.get("verdict") in ("not_injective", "false")
    report["status"] = "false" if verdict_false else "ok"
    return _emit(report, json_only, summary, 3 if verdict_false else 0)


if __name__ == "__main__":
    sys.exit(main())
