"""Command-line driver: survey | basis | wgraph | verify.

Exit codes are a contract: 0 all checks pass, 1 usage or I/O problem, 2 an
internal consistency check failed (the report carries a witness), 3 bar
verification failed for the selected carrier (evidence relevant to the
existence conjecture for bar operators).

Survey and basis results are cached on disk keyed by a content hash of the
resolved configuration; --no-cache bypasses the cache entirely.  Cached
survey witnesses are re-validated against a freshly built carrier before
being served.  All outputs are deterministic for a fixed configuration.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import itertools
import json
import sys
from pathlib import Path

from . import barcanon, classify, hecke, qpsets, wgraph
from .coxeter import CoxeterSystem, DiagramAut, ExtElement, build_system
from .errors import QpcoxError
from .laurent import V, VINV

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONSISTENCY = 2
EXIT_BAR = 3

SCHEMA_VERSION = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument resolution


def load_system(type_spec: str) -> CoxeterSystem:
    """A type string, or a path to a JSON file holding a Coxeter matrix."""
    path = Path(type_spec)
    if path.suffix == ".json" or path.is_file():
        try:
            data = json.loads(path.read_text())
        except OSError as exc:
            raise _UsageError(f"cannot read matrix file {type_spec!r}: {exc}")
        except json.JSONDecodeError as exc:
            raise _UsageError(f"matrix file {type_spec!r} is not valid JSON: {exc}")
        matrix = data["matrix"] if isinstance(data, dict) else data
        return build_system(matrix)
    return build_system(type_spec)


def parse_generators(text: str) -> tuple:
    """Words like "s1 s3", "1,3" or "" (the identity) into 0-based indices."""
    out = []
    for tok in text.replace(",", " ").split():
        tok = tok.lower().lstrip("s")
        if not tok.isdigit() or int(tok) < 1:
            raise _UsageError(f"bad generator token {tok!r}")
        out.append(int(tok) - 1)
    return tuple(out)


def resolve_theta(system: CoxeterSystem, spec: str | None) -> DiagramAut:
    if spec in (None, "id", "identity"):
        return system.identity_aut()
    auts = system.diagram_automorphisms()
    if spec in ("swap", "rev", "flip"):
        cands = [a for a in auts if not a.is_identity() and (a * a).is_identity()]
        if len(cands) != 1:
            raise _UsageError(
                f"{spec!r} is ambiguous for {system.name} "
                f"({len(cands)} nontrivial involutions); give an explicit image list"
            )
        return cands[0]
    if spec in ("rot", "triality"):
        cands = [a for a in auts if a.order() == 3]
        if not cands:
            raise _UsageError(f"{system.name} has no order-3 diagram automorphism")
        return cands[0]
    images = parse_generators(spec)
    if len(images) != system.rank:
        raise _UsageError(f"theta needs {system.rank} images, got {len(images)}")
    return DiagramAut(system, images)


def resolve_carrier(system: CoxeterSystem, args) -> qpsets.ScaledWSet:
    chosen = [
        bool(args.regular),
        args.coset is not None,
        args.klass is not None,
        args.seed is not None,
    ]
    if sum(chosen) != 1:
        raise _UsageError("select exactly one of --regular, --coset, --class, --seed")
    if args.regular:
        return qpsets.regular_set(system)
    if args.coset is not None:
        return qpsets.coset_set(system, parse_generators(args.coset))
    if args.klass is not None:
        if args.klass != "fpf":
            raise _UsageError(f"unknown named class {args.klass!r} (only 'fpf')")
        if not system.name.startswith("A") or system.rank % 2 == 0:
            raise _UsageError("the fpf class lives in type A of odd rank")
        seed = ExtElement(
            system.element_from_word(tuple(range(0, system.rank, 2))),
            system.identity_aut(),
        )
        return qpsets.conjugacy_set(system, seed, args.cutoff)
    theta = resolve_theta(system, args.theta)
    seed = ExtElement(system.element_from_word(parse_generators(args.seed)), theta)
    return qpsets.conjugacy_set(system, seed, args.cutoff)


def carrier_descriptor(X: qpsets.ScaledWSet) -> dict:
    out = {"kind": X.kind, "size": len(X), "truncated_at": X.truncated_at}
    if X.kind == "coset":
        out["J"] = [j + 1 for j in X.J]
    if X.kind == "conjugacy":
        out["theta"] = list(X.theta.sigma)
        out["seed"] = list(X.payloads[0].x.word())
    return out


# ---------------------------------------------------------------------------
# caching


def _cache_path(args, key_obj) -> Path | None:
    if args.no_cache:
        return None
    blob = json.dumps(key_obj, sort_keys=True).encode()
    digest = hashlib.sha256(blob).hexdigest()[:24]
    return Path(args.cache_dir) / f"{digest}.json"


def _cache_load(path: Path | None):
    if path is None or not path.exists():
        return None
    try:
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError):
        return None


def _cache_store(path: Path | None, obj) -> None:
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True))


# ---------------------------------------------------------------------------
# output plumbing


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _survey_csv(reports_json: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(classify.SURVEY_COLUMNS)
    for rep in reports_json:
        flags = rep.get("structure") or {}
        writer.writerow(
            [
                rep["system"],
                " ".join(f"s{i + 1}->s{j + 1}" for i, j in enumerate(rep["theta"])) or "id",
                rep["size"],
                rep["min_length"],
                rep["is_iplus"],
                rep["qp"],
                rep["perfect"],
                "{" + ",".join(f"s{j + 1}" for j in rep["J"] or []) + "}",
                "".join("1" if flags.get(k) else "0" for k in sorted(flags)) if flags else "",
            ]
        )
    return buf.getvalue()


# ---------------------------------------------------------------------------
# commands


def cmd_survey(args) -> int:
    system = load_system(args.type)
    if args.theta in (None, "all"):
        thetas = None
        theta_key = "all"
    else:
        thetas = [resolve_theta(system, args.theta)]
        theta_key = list(thetas[0].sigma)
    key = {
        "schema_version": SCHEMA_VERSION,
        "command": "survey",
        "type": args.type,
        "theta": theta_key,
        "diagnostics": args.diagnostics,
    }
    path = _cache_path(args, key)
    payload = _cache_load(path)
    if payload is not None and not _revalidate_survey(system, payload):
        payload = None
    if payload is None:
        reports = classify.survey(system, thetas=thetas, diagnostics=args.diagnostics)
        failures = classify.survey_cross_checks(reports)
        payload = {
            "schema_version": SCHEMA_VERSION,
            "config": key,
            "reports": [r.to_json() for r in reports],
            "failures": failures,
        }
        _cache_store(path, payload)
    if args.format == "csv":
        _emit(args, _survey_csv(payload["reports"]))
    else:
        _emit(args, json.dumps(payload, indent=2, sort_keys=True))
    if payload["failures"]:
        print("\n".join(f"FAIL {f}" for f in payload["failures"]), file=sys.stderr)
        return EXIT_CONSISTENCY
    return EXIT_OK


def _revalidate_survey(system: CoxeterSystem, payload) -> bool:
    for rep in payload.get("reports", []):
        wit = rep.get("witness")
        if not wit:
            continue
        theta = DiagramAut(system, tuple(rep["theta"]))
        seed = ExtElement(system.element_from_word(rep["seed_word"]), theta)
        K = qpsets.conjugacy_set(system, seed)
        if not qpsets.revalidate_witness(K, wit):
            return False
    return True


def _kinds(args) -> list[str]:
    if args.kind in ("both", None):
        return ["M", "N"]
    if args.kind.lower() in ("m", "n"):
        return [args.kind.upper()]
    raise _UsageError(f"bad --kind {args.kind!r}")


def cmd_basis(args) -> int:
    system = load_system(args.type)
    X = resolve_carrier(system, args)
    kinds = _kinds(args)
    key = {
        "schema_version": SCHEMA_VERSION,
        "command": "basis",
        "type": args.type,
        "carrier": carrier_descriptor(X),
        "kinds": kinds,
    }
    path = _cache_path(args, key)
    payload = _cache_load(path)
    if payload is None:
        payload = {"schema_version": SCHEMA_VERSION, "config": key, "tables": {}}
        for kind in kinds:
            verdict = barcanon.verify_bar_operator(kind, X)
            if not verdict.ok:
                report = {
                    "schema_version": SCHEMA_VERSION,
                    "config": key,
                    "bar_failure": {"kind": kind, **(verdict.failure or {})},
                }
                _emit(args, json.dumps(report, indent=2, sort_keys=True))
                return EXIT_BAR
            table = barcanon.canonical_basis(kind, X)
            checks = [barcanon.verify_parity(table)]
            if X.truncated_at is None:
                checks.append(barcanon.verify_multiplication(table))
                checks.append(barcanon.verify_recurrences(table))
                checks.append(barcanon.verify_mu_lemma(table))
            entry = table.to_json()
            entry["verification"] = {c.name: c.ok for c in checks}
            entry["bar"] = {"checked": verdict.checked, "skipped": verdict.skipped, "label": verdict.label}
            payload["tables"][kind] = entry
            if not all(c.ok for c in checks):
                payload["failures"] = [c.name for c in checks if not c.ok]
        if (
            X.kind == "conjugacy"
            and X.truncated_at is None
            and all(p.is_twisted_involution() for p in X.payloads)
        ):
            w0p = ExtElement(system.longest_element(), system.w0_aut())
            partner = X.payloads[0] * w0p
            payload["inversion_partner"] = {
                "theta": list(partner.theta.sigma),
                "seed": list(partner.x.word()),
            }
        _cache_store(path, payload)
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["kind", "x", "y", "mu"])
        for kind, entry in sorted(payload["tables"].items()):
            for x, y, m in entry["mu"]:
                writer.writerow([kind, x, y, m])
        _emit(args, buf.getvalue())
    else:
        _emit(args, json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_CONSISTENCY if payload.get("failures") else EXIT_OK


def cmd_wgraph(args) -> int:
    system = load_system(args.type)
    X = resolve_carrier(system, args)
    kinds = _kinds(args)
    graphs = {}
    for kind in kinds:
        verdict = barcanon.verify_bar_operator(kind, X)
        if not verdict.ok:
            _emit(args, json.dumps({"bar_failure": {"kind": kind, **(verdict.failure or {})}}, indent=2))
            return EXIT_BAR
        table = barcanon.canonical_basis(kind, X)
        graphs[kind.lower()] = wgraph.build_wgraph(table)
    if args.format == "dot":
        if len(graphs) != 1:
            raise _UsageError("DOT output needs a single --kind m or --kind n")
        _emit(args, wgraph.to_dot(next(iter(graphs.values()))))
        return EXIT_OK
    payload = {"schema_version": SCHEMA_VERSION, "graphs": {}}
    bad = False
    for kind, G in graphs.items():
        qa = wgraph.check_quasi_admissible(G)
        module_ok = wgraph.verify_wgraph_module(G)
        entry = wgraph.to_json(G, qa)
        entry["module_axioms"] = module_ok.ok
        payload["graphs"][kind] = entry
        bad = bad or not qa.quasi_admissible or not module_ok.ok
    _emit(args, json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_CONSISTENCY if bad else EXIT_OK


# ---------------------------------------------------------------------------
# verify suites


def _suite_hecke(system) -> list[tuple[str, bool]]:
    results = []
    one = hecke.HeckeElt.unit(system)
    ok = True
    for i in range(system.rank):
        hs = hecke.HeckeElt.basis(system.generator(i))
        ok = ok and hs * hs == one + hs.scale(V - VINV)
    results.append(("hecke-quadratic", ok))
    ok = True
    for i in range(system.rank):
        for j in range(i + 1, system.rank):
            m = system.matrix[i][j]
            a = system.generator(i)
            b = system.generator(j)
            left = right = one
            for k in range(m):
                left = left * hecke.HeckeElt.basis(a if k % 2 == 0 else b)
                right = right * hecke.HeckeElt.basis(b if k % 2 == 0 else a)
            ok = ok and left == right
    results.append(("hecke-braid", ok))
    ok = True
    for w in system.elements():
        hw = hecke.HeckeElt.basis(w)
        ok = ok and hw.bar().bar() == hw
    results.append(("hecke-bar-involution", ok))
    table = hecke.kl_basis(system)
    ok = True
    for w in system.elements():
        u = table.underline(w)
        ok = ok and u.bar() == u
    results.append(("kl-bar-invariant", ok))
    return results


def _qp_carriers(system) -> list[qpsets.ScaledWSet]:
    carriers = [qpsets.regular_set(system)]
    for r in range(1, system.rank + 1):
        for J in itertools.combinations(range(system.rank), r):
            carriers.append(qpsets.coset_set(system, J))
    carriers.extend(barcanon.iplus_qp_classes(system))
    return carriers


def _suite_bar_canonical(system) -> list[tuple[str, bool]]:
    results = []
    for X in _qp_carriers(system):
        tag = f"{X.kind}:{len(X)}"
        ok = True
        for kind in ("M", "N"):
            verdict = barcanon.verify_bar_operator(kind, X)
            ok = ok and verdict.ok
            if not verdict.ok:
                break
            table = barcanon.canonical_basis(kind, X)
            ok = ok and barcanon.verify_parity(table).ok
            ok = ok and barcanon.verify_multiplication(table).ok
            ok = ok and barcanon.verify_recurrences(table).ok
            ok = ok and barcanon.verify_mu_lemma(table).ok
        if ok:
            tm = barcanon.canonical_basis("M", X)
            tn = barcanon.canonical_basis("N", X)
            ok = ok and barcanon.PhiMaps(X).verify().ok
            ok = ok and barcanon.primed_basis(tm, tn, "M")[1].ok
            ok = ok and barcanon.primed_basis(tm, tn, "N")[1].ok
        results.append((f"bar-canonical[{tag}]", ok))
    return results


def _suite_wgraph(system) -> list[tuple[str, bool]]:
    results = []
    for X in _qp_carriers(system):
        for kind in ("M", "N"):
            table = barcanon.canonical_basis(kind, X)
            G = wgraph.build_wgraph(table)
            qa = wgraph.check_quasi_admissible(G)
            ok = qa.quasi_admissible and wgraph.verify_wgraph_module(G).ok
            results.append((f"wgraph-{kind.lower()}[{X.kind}:{len(X)}]", ok))
    return results


def _suite_inversion(system) -> list[tuple[str, bool]]:
    verdict = barcanon.inversion_check(system)
    return [("inversion", verdict.ok)]


def _suite_finite_classification(system) -> list[tuple[str, bool]]:
    reports = classify.survey(system)
    failures = classify.survey_cross_checks(reports)
    results = [("classification-cross-checks", not failures)]
    for rep in reports:
        if rep.n_min_length == 1 and not rep.qp.is_qp:
            axiom = rep.qp.axiom
            print(
                f"note: unique-minimal class seed={list(rep.seed_word)} "
                f"theta={list(rep.theta)} fails {axiom}",
                file=sys.stderr,
            )
    results.append(("w0-translation", classify.check_w0_translation(system)))
    return results


def _suite_universal(system, cutoff) -> list[tuple[str, bool]]:
    results = []
    seeds = [ExtElement(system.identity, a) for a in system.diagram_automorphisms()]
    seeds += [
        ExtElement(system.generator(0), system.identity_aut()),
        ExtElement(
            system.generator(0) * system.generator(1 % system.rank),
            system.identity_aut(),
        ),
    ]
    for seed in seeds:
        criterion = classify.universal_qp_check(system, seed)
        K = qpsets.conjugacy_set(system, seed, cutoff)
        brute = qpsets.check_quasiparabolic(K)
        tag = f"universal[{''.join(str(s + 1) for s in seed.x.word())},{seed.theta!r}]"
        results.append((tag, criterion.is_qp == brute.is_qp))
    return results


def cmd_verify(args) -> int:
    system = load_system(args.type)
    suites = {
        "hecke": lambda: _suite_hecke(system),
        "bar-canonical": lambda: _suite_bar_canonical(system),
        "wgraph": lambda: _suite_wgraph(system),
        "inversion": lambda: _suite_inversion(system),
        "finite-classification": lambda: _suite_finite_classification(system),
        "universal": lambda: _suite_universal(system, args.cutoff or 6),
    }
    if system.family == "universal":
        applicable = ["universal"]
    else:
        applicable = [s for s in suites if s != "universal"]
    names = applicable if args.suite == "all" else [args.suite]
    for n in names:
        if n not in suites:
            raise _UsageError(f"unknown suite {n!r}")
        if n not in applicable:
            raise _UsageError(f"suite {n!r} does not apply to {system.name}")
    results = []
    for n in names:
        results.extend(suites[n]())
    for name, ok in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    log = {
        "schema_version": SCHEMA_VERSION,
        "type": args.type,
        "results": [{"check": n, "ok": ok} for n, ok in results],
    }
    if args.out:
        Path(args.out).write_text(json.dumps(log, indent=2, sort_keys=True))
    return EXIT_OK if all(ok for _, ok in results) else EXIT_CONSISTENCY


# ---------------------------------------------------------------------------
# entry point


def _add_common(p):
    p.add_argument("--type", required=True, help="type string, e.g. A3, F4, I2(6), U3")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", default=None, help="json | csv | dot")
    p.add_argument("--cutoff", type=int, help="height cutoff for universal carriers")
    p.add_argument("--jobs", type=int, default=1, help="worker threads (advisory)")
    p.add_argument("--no-cache", action="store_true")
    p.add_argument("--cache-dir", default=".qpcox-cache")


def _add_carrier(p):
    p.add_argument("--regular", action="store_true", help="the carrier (W, length)")
    p.add_argument("--coset", help="coset carrier W^J, e.g. --coset s1,s3")
    p.add_argument("--class", dest="klass", help="named class (fpf)")
    p.add_argument("--seed", help="seed word for a twisted class, e.g. 's1 s3' or ''")
    p.add_argument("--theta", help="id | swap | rot | explicit images like 2,1")


def build_parser() -> _Parser:
    parser = _Parser(prog="qpcox", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("survey", help="classify twisted conjugacy classes")
    _add_common(p)
    p.add_argument("--theta", help="id | swap | rot | all | explicit images")
    p.add_argument("--diagnostics", action="store_true", help="order/strong-exchange diagnostics")

    p = sub.add_parser("basis", help="canonical bases on a selected carrier")
    _add_common(p)
    _add_carrier(p)
    p.add_argument("--kind", default="both", help="m | n | both")

    p = sub.add_parser("wgraph", help="W-graphs and cells on a selected carrier")
    _add_common(p)
    _add_carrier(p)
    p.add_argument("--kind", default="both", help="m | n | both")

    p = sub.add_parser("verify", help="run a verification suite")
    _add_common(p)
    p.add_argument("--suite", default="all", help="hecke | bar-canonical | wgraph | inversion | finite-classification | universal | all")
    return parser


def main(argv=None) -> int:
    allowed_formats = {
        "survey": ("csv", "json"),
        "basis": ("json", "csv"),
        "wgraph": ("json", "dot"),
        "verify": ("json",),
    }
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.format is None:
            args.format = allowed_formats[args.command][0]
        elif args.format not in allowed_formats[args.command]:
            raise _UsageError(
                f"--format for {args.command} must be one of {allowed_formats[args.command]}"
            )
        handler = {
            "survey": cmd_survey,
            "basis": cmd_basis,
            "wgraph": cmd_wgraph,
            "verify": cmd_verify,
        }[args.command]
        return handler(args)
    except _UsageError as exc:
        print(f"qpcox: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QpcoxError as exc:
        print(f"qpcox: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qpcox: io error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
