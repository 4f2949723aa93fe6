"""Command-line entry point: ``fekete <command> --n N ...``.

Exit codes: 0 all checks passed, 1 usage or input error, 3 verification
failure, 4 census mismatch, 5 budget exhausted.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 3
EXIT_CENSUS = 4
EXIT_BUDGET = 5

DEGREE_PROVENANCE = "published Groebner computation (tabulated constant)"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# formatting


def _fmt(x) -> str:
    """Exact text plus 6 significant digits."""
    from .exactalg import QuotientScalar, as_tower, format_scalar

    if isinstance(x, QuotientScalar):
        return f"{format_scalar(x)} [branch 0: {_num(complex(x.value_at(0)))}]"
    exact = format_scalar(x)
    z = complex(as_tower(x))
    if "/" not in exact and "sqrt" not in exact:
        return exact
    return f"{exact} ~ {_num(z)}"


def _num(z: complex) -> str:
    if abs(z.imag) < 1e-12:
        return f"{z.real:.6g}"
    return f"{z.real:.6g}{z.imag:+.6g}i"


def _to_float(x) -> complex:
    from .exactalg import QuotientScalar, as_tower

    if isinstance(x, QuotientScalar):
        return complex(x.value_at(0))
    return complex(as_tower(x))


def _emit(payload: dict, rows: list[dict], fmt: str, out=None, title: str | None = None):
    out = out or sys.stdout
    if fmt == "json":
        json.dump(payload, out, indent=2, default=str)
        out.write("\n")
        return
    if fmt == "csv":
        if rows:
            w = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow(r)
        return
    if title:
        out.write(f"# {title}\n")
    if rows:
        keys = list(rows[0])
        widths = {k: max(len(k), *(len(str(r[k])) for r in rows)) for k in keys}
        out.write(" | ".join(k.ljust(widths[k]) for k in keys) + "\n")
        for r in rows:
            out.write(" | ".join(str(r[k]).ljust(widths[k]) for k in keys) + "\n")
    for k, v in payload.items():
        if k != "rows" and not isinstance(v, (list, dict)):
            out.write(f"{k}: {v}\n")


# ---------------------------------------------------------------------------
# candidate selection


def _candidates(args):
    from .catalog import candidates_for, get_candidate, load_candidate_file

    if getattr(args, "file", None):
        return [load_candidate_file(args.file)]
    if getattr(args, "config", None):
        c = get_candidate(args.config)
        if args.n is not None and c.n != args.n:
            raise UsageError(f"{args.config} has n={c.n}, not {args.n}")
        return [c]
    if args.n is None:
        raise UsageError("give --n, --config or --file")
    if not 3 <= args.n <= 6:
        raise UsageError("catalog-backed commands need n in 3..6")
    return candidates_for(args.n)


# ---------------------------------------------------------------------------
# groebner cache


def cache_dir(args) -> Path:
    d = args.cache_dir or os.environ.get("FEKETE_CACHE_DIR") or Path.home() / ".cache" / "fekete"
    return Path(d)


def _cache_key(system, strategy: str, modulus) -> str:
    blob = json.dumps({"system": system.to_json(), "order": "grevlex", "strategy": strategy, "modulus": modulus}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:24]


def _basis_to_json(gb) -> list:
    return [[[list(m), str(c)] for m, c in g.items()] for g in gb.basis]


def _basis_from_json(data, vars_):
    from .groebner import GroebnerBasis
    from .multipoly import MultiPoly, grevlex

    polys = [MultiPoly.from_dict(vars_, {tuple(m): Fraction(c) for m, c in terms}, grevlex) for terms in data]
    return GroebnerBasis(polys, grevlex, vars_)


def run_groebner(n: int, args):
    """(basis, degree, seconds, cached) for the system with n points, through the cache."""
    from .feketesys import build_system
    from .groebner import Budget, buchberger, ideal_degree

    system = build_system(n)
    strategy = getattr(args, "strategy", "normal")
    modulus = getattr(args, "modulus", None)
    key = _cache_key(system, strategy, modulus)
    path = cache_dir(args) / f"basis-n{n}-{key}.json"
    if path.exists() and not getattr(args, "no_cache", False):
        data = json.loads(path.read_text())
        gb = _basis_from_json(data["basis"], system.variables)
        return gb, data["degree"], data["seconds"], True
    budget = Budget(seconds=args.time_budget, memory_mb=args.memory_budget)
    gb = buchberger(system.generators, budget=budget, strategy=strategy, modulus=modulus)
    deg = ideal_degree(gb).degree
    secs = gb.stats.seconds
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({"n": n, "degree": deg, "seconds": secs, "strategy": strategy, "modulus": modulus, "basis": _basis_to_json(gb)}))
    return gb, deg, secs, False


# ---------------------------------------------------------------------------
# commands


def cmd_system(args) -> int:
    from .feketesys import FAMILIES, build_system

    ns = [args.n] if args.n is not None else list(range(3, 9))
    rows = []
    payload: dict = {}
    for n in ns:
        s = build_system(n)
        rows.append({"n": n, "variables": s.num_variables, "equations": s.num_equations})
        if args.n is not None:
            payload = s.to_json()
    payload["rows"] = rows
    _emit(payload, rows, args.format, title="variables and equations")
    if args.n is not None and args.format == "text" and args.show_generators:
        s = build_system(args.n)
        for fam in FAMILIES:
            for i, g in enumerate(s.families[fam]):
                print(f"{fam}[{i}]: {g}")
    return EXIT_OK


def cmd_groebner(args) -> int:
    from .groebner import BudgetExceeded

    if args.n >= 6 and not args.allow_long:
        print(
            f"refusing n={args.n}: the computation is far beyond a desk budget "
            "(hours and tens of GB); pass --allow-long to try anyway",
            file=sys.stderr,
        )
        return EXIT_USAGE
    try:
        gb, deg, secs, cached = run_groebner(args.n, args)
    except BudgetExceeded as exc:
        st = exc.stats
        print(f"budget exhausted: {exc}", file=sys.stderr)
        if st is not None:
            print(f"pairs={st.pairs_processed} zero={st.zero_reductions} basis={st.max_basis_size}", file=sys.stderr)
        return EXIT_BUDGET
    row = {"n": args.n, "zero_dimensional": True, "degree": deg, "basis_size": len(gb), "seconds": round(secs, 3), "cached": cached}
    _emit(dict(row), [row], args.format, title="Groebner basis")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .catalog import candidate_to_json
    from .critverify import verify

    rows, details = [], []
    ok = True
    for c in _candidates(args):
        rep = verify(c)
        ok &= rep.passed
        rows.append({"name": c.name, "n": c.n, "domain": rep.domain, "passed": rep.passed, "failures": len(rep.failures())})
        details.append({"name": c.name, "passed": rep.passed, "residuals": rep.residuals, "candidate": candidate_to_json(c)})
    _emit({"results": details, "all_passed": ok}, rows, args.format, title="exact verification")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_orbits(args) -> int:
    from .critverify import orbit

    rows = []
    for c in _candidates(args):
        o = orbit(c)
        rows.append(
            {
                "name": c.name,
                "display": c.display,
                "stabilizer": o.stabilizer_size,
                "orbit": o.orbit_size,
                "branches": o.branch_count,
                "solutions": o.solutions,
            }
        )
    _emit({"rows": rows}, rows, args.format, title="orbit sizes")
    return EXIT_OK


def _expected_degree(args):
    from .critverify import EXPECTED_DEGREE

    if args.expected_degree is not None:
        return args.expected_degree, "command line"
    if args.from_groebner:
        if args.n >= 6 and not args.allow_long:
            raise UsageError("--from-groebner for n >= 6 needs --allow-long")
        _, deg, _, _ = run_groebner(args.n, args)
        return deg, "fresh Groebner run"
    return EXPECTED_DEGREE[args.n], DEGREE_PROVENANCE


def cmd_census(args) -> int:
    from .critverify import census
    from .groebner import BudgetExceeded

    try:
        expected, source = _expected_degree(args)
    except BudgetExceeded as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    rep = census(args.n, expected)
    rows = [
        {
            "class": "/".join(k.names),
            "display": k.display,
            "orbit": k.orbit_size,
            "branches": k.branch_count,
            "multiplicity": k.multiplicity,
            "rank_deficient": k.rank_deficient,
            "contribution": k.contribution,
        }
        for k in rep.classes
    ]
    payload = {
        "n": args.n,
        "found_simple": rep.found_simple,
        "found": rep.found,
        "expected": rep.expected_degree,
        "expected_source": source,
        "difference": rep.difference,
        "balanced": rep.balanced,
        "rows": rows,
    }
    _emit(payload, rows, args.format, title="census")
    return EXIT_OK if rep.balanced else EXIT_CENSUS


def cmd_geometry(args) -> int:
    from .catalog import candidate_to_json, get_candidate
    from .spheregeom import NotPSD, RankExceedsDimension, complex_embed, embed, gram_spectrum

    c = get_candidate(args.config)
    sp = gram_spectrum(c, precision=args.precision)
    payload = {
        "name": c.name,
        "real": sp.is_real,
        "psd": sp.psd,
        "rank": sp.rank,
        "eigenvalues": [str(e) for e in sp.eigenvalues],
        "candidate": candidate_to_json(c),
    }
    code = EXIT_OK
    if args.embed is not None:
        try:
            emb = embed(c, args.embed)
            payload["coordinates"] = emb.W.T.tolist()
            payload["residual"] = emb.residual
        except NotPSD as exc:
            emb = complex_embed(c)
            payload["error"] = f"NotPSD: {exc}"
            payload["complex_coordinates"] = [[[z.real, z.imag] for z in col] for col in emb.W.T]
            payload["residual"] = emb.residual
        except RankExceedsDimension as exc:
            payload["error"] = f"RankExceedsDimension: {exc}"
            code = EXIT_USAGE
    rows = [{"eigenvalue": str(e), "exact": e.is_exact} for e in sp.eigenvalues]
    _emit(payload, rows, args.format, title=f"geometry of {c.name}")
    if args.format == "text" and "coordinates" in payload:
        print("coordinates (columns):")
        for col in payload["coordinates"]:
            print("  " + " ".join(f"{v: .10f}" for v in col))
    return code


def cmd_classify(args) -> int:
    from .hessclass import classify
    from .spheregeom import NotPSD, RankExceedsDimension

    cands = _candidates(args)
    dims = [args.d] if args.d else list(range(2, max(c.n for c in cands)))
    rows, spectra = [], []
    for c in cands:
        row = {"name": c.name, "display": c.display}
        real = True
        for d in dims:
            try:
                rec = classify(c, d)
                row[f"S{d - 1}"] = rec.verdict
                spectra.append({"name": c.name, "d": d, "spectrum": ", ".join(map(str, rec.spectrum))})
            except RankExceedsDimension:
                row[f"S{d - 1}"] = "-"
            except NotPSD:
                real = False
                break
        if real:
            rows.append(row)
    payload = {"rows": rows}
    if args.emit_spectra:
        payload["spectra"] = spectra
    _emit(payload, rows, args.format, title="classification (GM global min, SM spurious min, S saddle)")
    if args.emit_spectra and args.format != "json":
        _emit({}, spectra, args.format, title="projected Hessian spectra")
    return EXIT_OK


def build_report(n: int, precision: int = 128) -> dict:
    """Everything the report prints, as plain data."""
    from .critverify import census, verify
    from .feketesys import product_energy
    from .hessclass import classification_grid, hessian_spectrum, negative_direction_certificate
    from .spheregeom import gram_spectrum
    from .catalog import candidates_for

    rep = census(n)
    by_name = {}
    for k in rep.classes:
        for nm in k.names:
            by_name[nm] = k
    grid = classification_grid(n)
    rows = []
    spectra = {}
    for c in candidates_for(n):
        k = by_name.get(c.name)
        E, En = product_energy(c)
        sp = gram_spectrum(c, precision=precision)
        rows.append(
            {
                "name": c.name,
                "display": c.display,
                "verified": verify(c).passed,
                "orbit": k.orbit_size if k else None,
                "branches": c.branch_count,
                "multiplicity": k.multiplicity if k else None,
                "energy": _fmt(E),
                "energy_normalized": _fmt(En),
                "energy_normalized_float": _to_float(En).real,
                "rank": sp.rank,
                "psd": sp.psd,
                "real_psd": c.name in grid,
                "x_eigenvalues": " ".join(str(e) for e in sp.nonzero()),
            }
        )
        if c.name in grid:
            for d, verdict in grid[c.name].items():
                if verdict != "-":
                    spectra[(c.display, d)] = [
                        (e.value, e.multiplicity) for e in hessian_spectrum(c, d)
                    ]
    certificates = []
    if n == 6:
        from .exactalg import format_scalar

        for nm in ("three3", "one5"):
            cert = negative_direction_certificate(nm)
            certificates.append(
                {"name": nm, "value": format_scalar(cert.exact), "approx": cert.value, "enclosure": list(cert.enclosure), "negative": cert.certified_negative, "direction": cert.direction}
            )
    return {
        "n": n,
        "rows": rows,
        "census": {
            "found_simple": rep.found_simple,
            "found": rep.found,
            "expected": rep.expected_degree,
            "expected_source": DEGREE_PROVENANCE,
            "difference_simple": rep.expected_degree - rep.found_simple,
            "multiplicities": {"/".join(k.names): k.multiplicity for k in rep.classes if k.multiplicity > 1},
            "balanced": rep.balanced,
        },
        "classification": grid,
        "spectra": [{"display": k[0], "d": k[1], "spectrum": v} for k, v in spectra.items()],
        "certificates": certificates,
        "_spectra_map": spectra,
    }


def cmd_report(args) -> int:
    from . import plots

    out_dir = Path(args.out or f"fekete-report-n{args.n}")
    out_dir.mkdir(parents=True, exist_ok=True)
    data = build_report(args.n, args.precision)
    spectra_map = data.pop("_spectra_map")
    table = [{k: v for k, v in r.items() if k not in ("energy_normalized_float", "real_psd")} for r in data["rows"]]
    grid_rows = []
    for name, row in data["classification"].items():
        disp = next(r["display"] for r in data["rows"] if r["name"] == name)
        grid_rows.append({"name": name, "display": disp, **{f"S{d - 1}": v for d, v in row.items()}})

    buf = io.StringIO()
    _emit({}, table, "text", buf, title=f"n = {args.n}: orbit size, energy, rank")
    c = data["census"]
    buf.write(
        f"census: found {c['found_simple']} simple solutions, expected {c['expected']} ({c['expected_source']}), "
        f"difference {c['difference_simple']}\n"
    )
    for cls, m in c["multiplicities"].items():
        buf.write(f"  {cls}: multiplicity {m} (rank-deficient Jacobian)\n")
    buf.write(f"  with multiplicities: {c['found']} = {c['expected']}: {'balanced' if c['balanced'] else 'MISMATCH'}\n")
    _emit({}, grid_rows, "text", buf, title="classification")
    for cert in data["certificates"]:
        buf.write(f"certificate {cert['name']}: v^T H v = {cert['value']} ~ {cert['approx']:.6g} < 0: {cert['negative']}\n")
    if args.emit_spectra:
        _emit({}, [{"display": s["display"], "d": s["d"], "spectrum": ", ".join(f"{v:.6g}:{m}" for v, m in s["spectrum"])} for s in data["spectra"]], "text", buf, title="projected Hessian spectra")
    text = buf.getvalue()

    (out_dir / "report.txt").write_text(text)
    with open(out_dir / "report.csv", "w", newline="") as fh:
        _emit({}, table, "csv", fh)
    with open(out_dir / "classification.csv", "w", newline="") as fh:
        _emit({}, grid_rows, "csv", fh)
    (out_dir / "report.json").write_text(json.dumps(data, indent=2, default=str))
    figs = [
        plots.energy_chart(data["rows"], out_dir / "energies.png", args.n),
        plots.hessian_chart(spectra_map, out_dir / "hessian_spectra.png", args.n),
    ]
    if args.format == "json":
        json.dump(data, sys.stdout, indent=2, default=str)
        print()
    elif args.format == "csv":
        _emit({}, table, "csv")
    else:
        sys.stdout.write(text)
        print(f"wrote {out_dir}/report.txt, report.csv, classification.csv, report.json, " + ", ".join(f.name for f in figs))
    return EXIT_OK if c["balanced"] else EXIT_CENSUS


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    def common_options(parser, default):
        # accepted before or after the subcommand; SUPPRESS keeps the later one from clobbering
        parser.add_argument("--cache-dir", default=default(None), help="Groebner basis cache (default $FEKETE_CACHE_DIR or ~/.cache/fekete)")
        parser.add_argument("--precision", type=int, default=default(128), help="bits for numeric enclosures")
        parser.add_argument("--format", choices=("text", "json", "csv"), default=default("text"))

    p = argparse.ArgumentParser(prog="fekete", description="Critical configurations of the logarithmic Fekete problem for small n.")
    common_options(p, lambda v: v)
    common = argparse.ArgumentParser(add_help=False)
    common_options(common, lambda v: argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("system", parents=[common], help="variable and equation counts, generators")
    s.add_argument("--n", type=int)
    s.add_argument("--show-generators", action="store_true")
    s.set_defaults(func=cmd_system)

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--time-budget", type=float, default=1800.0, help="seconds")
    budget.add_argument("--memory-budget", type=float, default=None, help="MB of resident memory")
    budget.add_argument("--allow-long", action="store_true", help="permit n >= 6")
    budget.add_argument("--strategy", choices=("normal", "sugar"), default="normal")
    budget.add_argument("--no-cache", action="store_true")

    s = sub.add_parser("groebner", parents=[common, budget], help="Groebner basis and ideal degree")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--modulus", type=int, default=None, help="compute over Z/p as a cross-check")
    s.set_defaults(func=cmd_groebner)

    s = sub.add_parser("verify", parents=[common], help="exact check of catalog or file candidates")
    s.add_argument("--n", type=int)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--config")
    g.add_argument("--file")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("orbits", parents=[common], help="stabilizer and orbit sizes")
    s.add_argument("--n", type=int)
    s.add_argument("--config")
    s.set_defaults(func=cmd_orbits)

    s = sub.add_parser("census", parents=[common, budget], help="solution count against the ideal degree")
    s.add_argument("--n", type=int, required=True, choices=(4, 5, 6))
    g = s.add_mutually_exclusive_group()
    g.add_argument("--expected-degree", type=int)
    g.add_argument("--from-groebner", action="store_true")
    s.set_defaults(func=cmd_census)

    s = sub.add_parser("geometry", parents=[common], help="Gram spectrum and coordinates")
    s.add_argument("--n", type=int)
    s.add_argument("--config", required=True)
    s.add_argument("--embed", type=int, metavar="D")
    s.set_defaults(func=cmd_geometry)

    s = sub.add_parser("classify", parents=[common], help="GM / SM / saddle grid")
    s.add_argument("--n", type=int)
    s.add_argument("--d", type=int)
    s.add_argument("--config")
    s.add_argument("--emit-spectra", action="store_true")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("report", parents=[common], help="tables, census, classification and figures")
    s.add_argument("--n", type=int, required=True, choices=(4, 5, 6))
    s.add_argument("--out", help="output directory (default fekete-report-n<N>)")
    s.add_argument("--emit-spectra", action="store_true")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    from .catalog import UnknownName
    from .feketesys import UnsupportedN

    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, UnknownName, UnsupportedN, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
