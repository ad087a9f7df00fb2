"""Command-line front end.

Commands: lambda, lambda-max, certify, verify, batch, gen-family.
Exit codes: 0 = completed (any verdict), 2 = input error, 3 = size-guard
refusal, 4 = solver or internal failure.  Verdicts are results, not errors.
All stdout output is byte-deterministic for fixed inputs and flags; timings
go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import certifier, families, measures, ratlp
from .probvec import JointDist
from .rat import format_rational, parse_rational

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INPUT = 2
EXIT_GUARD = 3
EXIT_SOLVER = 4


class _InputError(Exception):
    pass


def _load_dist(path: str) -> JointDist:
    try:
        return JointDist.loads(Path(path).read_text())
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise _InputError(f"cannot read distribution {path}: {exc}") from exc


def _load_family(path: str) -> families.MapFamily:
    try:
        return families.MapFamily.loads(Path(path).read_text())
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise _InputError(f"cannot read family {path}: {exc}") from exc


def _parse_lambda0(text: str) -> Fraction:
    try:
        lam = parse_rational(text)
    except ValueError as exc:
        raise _InputError(str(exc)) from exc
    if not (Fraction(1, 2) <= lam < 1):
        raise _InputError(f"lambda0 must lie in [1/2, 1), got {text}")
    return lam


def _family_for(args, g: JointDist) -> families.MapFamily:
    """Resolve --family / --gen flags against g's alphabet sizes."""
    if args.family:
        return _load_family(args.family)
    if not args.gen:
        raise _InputError("need --family PATH or --gen deterministic|random")
    sa, sb = g.axis("A").size, g.axis("B").size
    return _generate_family(args.gen, sa, sb, args.M, args.cap, args.seed, args.denom_bound)


def _generate_family(kind, a_copy, b_copy, m, cap, seed, denom_bound) -> families.MapFamily:
    if kind == "deterministic":
        size = cap if cap is not None else m
        return families.deterministic_family(a_copy, b_copy, cap=size)
    if kind == "random":
        if m is None:
            raise _InputError("random family generation needs --M")
        return families.random_filter_family(
            a_copy, b_copy, m=m, seed=seed if seed is not None else 0,
            denom_bound=denom_bound if denom_bound is not None else 4,
        )
    raise _InputError(f"unknown generator {kind!r}")


# -- commands -----------------------------------------------------------------


def cmd_lambda(args) -> int:
    p = _load_dist(args.dist)
    try:
        value = measures.secret_bit_fraction(p)
    except ValueError as exc:
        raise _InputError(str(exc)) from exc
    print(format_rational(value))
    return EXIT_OK


def cmd_lambda_max(args) -> int:
    p = _load_dist(args.dist)
    opts = measures.SearchOptions(max_pairs=args.max_pairs, refine_rounds=args.refine_rounds)
    try:
        witness = measures.estimate_lambda_max(p, opts)
    except measures.SearchBudgetExhausted as exc:
        print(f"no witness searched: {exc}")
        return EXIT_OK
    except ValueError as exc:
        raise _InputError(str(exc)) from exc
    print(f"lower bound {format_rational(witness.value)}")
    print(json.dumps(witness.to_json_dict(), indent=1, sort_keys=True))
    return EXIT_OK


def _run_certify(g, family, lambda0, max_dm):
    return certifier.certify(g, family, lambda0=lambda0, max_dm=max_dm)


def cmd_certify(args) -> int:
    g = _load_dist(args.g)
    family = _family_for(args, g)
    lambda0 = _parse_lambda0(args.lambda0)
    if args.dump_lp:
        setup = certifier.CertificationProblem(
            g=g, family=family, lambda0=lambda0, max_dm=args.max_dm
        )
        Path(args.dump_lp).write_text(ratlp.dump_lp(certifier.build_lp(setup).problem))
    t0 = time.perf_counter()
    cert = _run_certify(g, family, lambda0, args.max_dm)
    print(f"solved in {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    if args.out:
        Path(args.out).write_text(cert.dumps())
    if cert.verdict == certifier.UNDISTILLABLE:
        print("UNDISTILLABLE")
    else:
        print(f"INCONCLUSIVE optimum={format_rational(cert.optimum)}")
    return EXIT_OK


def cmd_verify(args) -> int:
    g = _load_dist(args.g)
    family = _load_family(args.family)
    try:
        cert = certifier.Certificate.loads(Path(args.cert).read_text())
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        raise _InputError(f"cannot read certificate {args.cert}: {exc}") from exc
    lambda0 = _parse_lambda0(args.lambda0) if args.lambda0 else cert.lambda0
    result = certifier.verify_certificate(g, family, lambda0, cert, max_dm=args.max_dm)
    if result:
        print("certificate valid")
        return EXIT_OK
    print(f"certificate INVALID: {result.failure}")
    return EXIT_INVALID


def _batch_row(entry: dict, base: Path, max_dm: int):
    g_path = str(entry["g"])
    g = _load_dist(str(base / g_path))
    fam_spec = entry["family"]
    if isinstance(fam_spec, str):
        family = _load_family(str(base / fam_spec))
        fam_desc = fam_spec
    else:
        family = _generate_family(
            fam_spec.get("gen"),
            g.axis("A").size,
            g.axis("B").size,
            fam_spec.get("M"),
            fam_spec.get("cap"),
            fam_spec.get("seed"),
            fam_spec.get("denom_bound"),
        )
        fam_desc = json.dumps(fam_spec, sort_keys=True, separators=(",", ":"))
    lambda0 = _parse_lambda0(str(entry.get("lambda0", "1/2")))
    cert = _run_certify(g, family, lambda0, max_dm)
    return (g_path, fam_desc, format_rational(lambda0), cert.verdict, format_rational(cert.optimum))


def cmd_batch(args) -> int:
    base = Path(args.manifest).parent
    try:
        manifest = json.loads(Path(args.manifest).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise _InputError(f"cannot read manifest {args.manifest}: {exc}") from exc
    if not isinstance(manifest, list):
        raise _InputError("manifest must be a JSON list of {g, family, lambda0} entries")

    def run_one(entry):
        t0 = time.perf_counter()
        try:
            row = _batch_row(entry, base, args.max_dm)
            code = EXIT_OK
        except certifier.SizeGuardError as exc:
            row = (str(entry.get("g", "?")), "?", "?", "ERROR", str(exc))
            code = EXIT_GUARD
        except (_InputError, ValueError, KeyError) as exc:
            row = (str(entry.get("g", "?")), "?", "?", "ERROR", str(exc))
            code = EXIT_INPUT
        except Exception as exc:
            row = (str(entry.get("g", "?")), "?", "?", "ERROR", str(exc))
            code = EXIT_SOLVER
        return row, code, time.perf_counter() - t0

    if args.jobs > 1 and len(manifest) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(run_one, manifest))
    else:
        results = [run_one(e) for e in manifest]

    rows = sorted(r for r, _, _ in results)
    print("g\tfamily\tlambda0\tverdict\toptimum")
    for row in rows:
        print("\t".join(row))
    for (row, _, dt) in sorted(results):
        print(f"timing\t{row[0]}\t{dt:.2f}s", file=sys.stderr)
    worst = max((code for _, code, _ in results), default=EXIT_OK)
    return worst


def cmd_gen_family(args) -> int:
    fam = _generate_family(args.gen, args.a_copy, args.b_copy, args.M, args.cap,
                           args.seed, args.denom_bound)
    text = fam.dumps()
    if args.out:
        Path(args.out).write_text(text)
    else:
        print(text, end="")
    return EXIT_OK


# -- argument plumbing ---------------------------------------------------------


def _add_family_flags(sp):
    sp.add_argument("--family", help="path to a family JSON file")
    sp.add_argument("--gen", choices=["deterministic", "random"], help="generate the family")
    sp.add_argument("--M", type=int, default=None, help="family size for generation")
    sp.add_argument("--cap", type=int, default=None, help="cap for deterministic generation")
    sp.add_argument("--seed", type=int, default=None, help="seed for random generation")
    sp.add_argument("--denom-bound", type=int, default=None, dest="denom_bound",
                    help="coefficient grid 0, 1/b, ..., 1 for random generation")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="nodistill",
        description="Exact-rational certification that secret correlations cannot be distilled",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("lambda", help="secret bit fraction of a distribution")
    sp.add_argument("dist")
    sp.set_defaults(func=cmd_lambda)

    sp = sub.add_parser("lambda-max", help="witnessed lower bound on the extractable fraction")
    sp.add_argument("dist")
    sp.add_argument("--max-pairs", type=int, default=None, dest="max_pairs")
    sp.add_argument("--refine-rounds", type=int, default=0, dest="refine_rounds")
    sp.set_defaults(func=cmd_lambda_max)

    sp = sub.add_parser("certify", help="run the certification program")
    sp.add_argument("g")
    _add_family_flags(sp)
    sp.add_argument("--lambda0", default="1/2")
    sp.add_argument("--max-dm", type=int, default=16, dest="max_dm",
                    help="refuse problems with d + M beyond this bound")
    sp.add_argument("--out", help="write the certificate JSON here")
    sp.add_argument("--dump-lp", dest="dump_lp",
                    help="also write the assembled program in text form")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("verify", help="re-verify a certificate")
    sp.add_argument("g")
    sp.add_argument("family")
    sp.add_argument("cert")
    sp.add_argument("--lambda0", default=None)
    sp.add_argument("--max-dm", type=int, default=16, dest="max_dm")
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("batch", help="run a manifest of certifications")
    sp.add_argument("manifest")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--max-dm", type=int, default=16, dest="max_dm")
    sp.set_defaults(func=cmd_batch)

    sp = sub.add_parser("gen-family", help="generate and save a map family")
    sp.add_argument("--a-copy", type=int, required=True, dest="a_copy")
    sp.add_argument("--b-copy", type=int, required=True, dest="b_copy")
    _add_family_flags(sp)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen_family)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except certifier.SizeGuardError as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (_InputError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ratlp.PivotBudgetExceeded, certifier.CertifierError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except measures.SearchBudgetExhausted as exc:
        print(f"search budget exhausted: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
