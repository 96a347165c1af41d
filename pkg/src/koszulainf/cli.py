"""Command-line front end.

Every subcommand builds a report dict, prints it as JSON (or text) and exits with
0 when all checks pass, 1 when a check fails and 2 when the input is unusable.
Reports contain no timings or paths, so identical configurations give identical bytes.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import random
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

from . import __version__
from .exact_algebra import AlgebraError, Polynomial, superpotential

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
DEFAULT_SEED = 20240917
DATA = Path(__file__).with_name("data")


class InputError(Exception):
    """Unusable input; maps to exit code 2."""


@dataclass
class RunConfig:
    command: str
    genus: int = 3
    truncation_order: int | None = None
    max_arity: int | None = None
    seed: int = DEFAULT_SEED
    output: str | None = None
    format: str = "json"
    input: str | None = None
    samples: int = 20
    workers: int = 1
    cross_check: bool = False

    def __post_init__(self):
        if self.genus < 2:
            raise InputError("genus must be at least 2")
        if self.truncation_order is None:
            self.truncation_order = 4 * self.genus
        if self.max_arity is None:
            self.max_arity = 2 * self.genus + 2
        if self.truncation_order < 1 or self.max_arity < 1 or self.samples < 0 or self.workers < 1:
            raise InputError("orders, arities, sample counts and worker counts must be positive")
        if self.truncation_order < 2 * self.genus + 2:
            raise InputError("truncation order must be at least 2g + 2")
        if self.format not in ("json", "text"):
            raise InputError(f"unknown format {self.format!r}")

    def echo(self):
        out = asdict(self)
        out.pop("output")
        out.pop("workers")  # results do not depend on the worker count
        if out["input"] is not None:
            out["input"] = Path(out["input"]).name
        return out


def _sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _fixtures():
    return {p.name: _sha256_file(p) for p in sorted(DATA.glob("*.json"))}


def _report(cfg: RunConfig, clauses: dict, values: dict) -> dict:
    clauses = {k: bool(v) for k, v in clauses.items()}
    failing = [k for k, v in clauses.items() if not v]
    return {
        "tool": "artifact",
        "version": __version__,
        "command": cfg.command,
        "config": cfg.echo(),
        "fixtures": _fixtures(),
        "clauses": clauses,
        "values": values,
        "pass": not failing,
        "first_failure": failing[0] if failing else None,
    }


def _poly_str(p: Polynomial) -> str:
    return p.to_str() if not p.is_zero() else "0"


# --------------------------------------------------------------------------- subcommands


def cmd_transfer(cfg: RunConfig) -> dict:
    from .hochschild import AInfStructure, ainf_residual
    from .mf import delta_squared_check, gamma_from_W
    from .transfer import (
        TransferEngine,
        aux_degree_audit,
        equivariance_check,
        function_part,
        hkr_diagonal,
        low_arity_check,
        random_tuples,
        theorem52_hypothesis_check,
    )

    g = cfg.genus
    mf = gamma_from_W(superpotential(g), g)
    eng = TransferEngine(mf)
    clauses = {"euler_relation": mf.euler_check(), "delta_squared": delta_squared_check(mf)}
    values: dict = {"W": _poly_str(mf.W)}
    top_arity = 2 * g + 1
    if cfg.max_arity >= top_arity:
        rep = theorem52_hypothesis_check(g, mf, seed=cfg.seed, samples=cfg.samples,
                                         workers=cfg.workers, engine=eng)
        clauses.update(rep.clauses)
        values["cubic"] = _poly_str(rep.values["cubic"])
        values["top"] = _poly_str(rep.values["top"])
        values["lambda"] = None if rep.values["lambda"] is None else str(rep.values["lambda"])
    else:
        clauses.update(low_arity_check(eng))
        if cfg.max_arity >= 3:
            cubic = function_part(hkr_diagonal(eng, 3, 0, g, functions_only=True))
            values["cubic"] = _poly_str(cubic)
            clauses["cubic_term"] = cubic == Polynomial(3, {(1, 1, 1): -1})
        values["partial"] = True
    rng = random.Random(cfg.seed + 1)
    audit_tuples = [t for d in range(2, min(cfg.max_arity, 5) + 1) for t in random_tuples(rng, eng.n, d, cfg.samples)]
    audit = aux_degree_audit(eng, audit_tuples, g)
    clauses["aux_degree_audit"] = audit["pass"]
    clauses["equivariance_sample"] = equivariance_check(eng, audit_tuples, g)
    values["aux_degree_terms"] = len(audit["terms"])
    if cfg.max_arity >= 3:
        mu = AInfStructure.from_engine(eng, cfg.max_arity)
        bad = {}
        for d in range(3, cfg.max_arity + 1):
            bad[str(d)] = sum(1 for t in random_tuples(rng, eng.n, d, cfg.samples) if ainf_residual(mu, t))
        clauses["ainf_residual"] = not any(bad.values())
        values["ainf_residual_failures"] = bad
    return _report(cfg, clauses, values)


def _read_json(path):
    if path is None:
        raise InputError("--input is required")
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}") from exc


def cmd_normalize(cfg: RunConfig) -> dict:
    from .polyvector import NormalizeInputError, Polyvector, normalize, verify_normalization

    obj = _read_json(cfg.input)
    try:
        if isinstance(obj, dict) and any("xi" in t for t in obj.get("terms", [])):
            pv = Polyvector.from_json(obj)
            if pv.xi_degrees() not in ([], [0]):
                raise InputError("alpha0 must be a function (no xi factors)")
            alpha0 = pv.function_part()
        else:
            alpha0 = Polynomial.from_json(obj)
    except (AlgebraError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{cfg.input}: {exc}") from exc
    if alpha0.n != 3:
        raise InputError("alpha0 must live in three variables")
    try:
        diffeo, cert = normalize(alpha0, cfg.genus, cfg.truncation_order)
    except NormalizeInputError as exc:
        raise InputError(f"hypothesis violation: {exc}") from exc
    except AlgebraError as exc:
        return _report(cfg, {"normalized": False}, {"error": str(exc)})
    ok = verify_normalization(alpha0, diffeo, cfg.genus, cfg.truncation_order)
    clauses = {"normalized": ok, "shape": diffeo.has_shape(cfg.truncation_order)}
    values = {"diffeo": diffeo.to_json(), "certificate": cert.to_json(),
              "identity": not diffeo.logs}
    return _report(cfg, clauses, values)


def cmd_fan(cfg: RunConfig) -> dict:
    from .toric import build_fan, fan_report, fan_validity

    g = cfg.genus
    if g < 3:
        raise InputError("the fan suite needs genus >= 3")
    ok_fan, why = fan_validity(build_fan(g, check=False))
    rep = fan_report(g)
    clauses = {"fan_valid": ok_fan, "cone_count": rep["maximal_cones"] == 2 * g + 1,
               "unimodular": rep["unimodular"], "crepant": rep["crepant"], "support": rep["support"],
               "dual_complex": rep.get("dual_complex", {}).get("euler") == 2
               and rep["dual_complex"]["counts"] == [g + 1, 3 * g - 3, 2 * g - 2]
               and rep["dual_complex"]["sphere_like"]}
    values = {"maximal_cones": rep["maximal_cones"], "lattice_index": rep["lattice_index"],
              "dual_complex": rep["dual_complex"], "components": rep["components"],
              "fan_validity_reason": why}
    return _report(cfg, clauses, values)


def cmd_fukaya(cfg: RunConfig) -> dict:
    from .fukaya import (
        audit_table,
        consistent_identification,
        cross_check,
        fragment_hypotheses,
        load_fixture,
        product_consistency,
        table_json,
        triangle_antisymmetry,
        unit_axioms,
        weight_map_ok,
    )

    g = cfg.genus
    try:
        fixture = load_fixture()
    except AlgebraError as exc:
        raise InputError(str(exc)) from exc
    audit = audit_table(g)
    ident = consistent_identification()
    clauses = {"fixture_matches_table": fixture == table_json(), "index_weight_parity": audit["pass"],
               "unit_axioms": unit_axioms(g), "triangle_antisymmetry": triangle_antisymmetry(g),
               "weight_map": weight_map_ok(ident, g)}
    for k, v in product_consistency(ident, g).items():
        clauses[f"products_{k}"] = v
    frag = fragment_hypotheses(g, ident)
    clauses.update({f"fragment_{k}": v for k, v in frag.clauses.items()})
    values = {"entries": len(audit["rows"]), "rows": audit["rows"],
              "cubic": _poly_str(frag.values["cubic"]), "top": _poly_str(frag.values["top"])}
    if cfg.cross_check:
        cc = cross_check(g, workers=cfg.workers)
        clauses.update({f"cross_{k}": v for k, v in cc.clauses.items()})
    return _report(cfg, clauses, values)


def cmd_dgla(cfg: RunConfig) -> dict:
    from .dgla import DGLAError, DGLAPresentation, obstruction_suite, top_level_ideal

    path = cfg.input or str(DATA / "heisenberg.json")
    obj = _read_json(path)
    try:
        g = DGLAPresentation.from_json(obj)
        h = top_level_ideal(g)
        if not h.is_central():
            raise InputError("the top filtration level does not span a central ideal")
    except DGLAError as exc:
        raise InputError(f"{Path(path).name}: {exc}") from exc
    records = obstruction_suite(g, h, random.Random(cfg.seed), max(cfg.samples, 1))
    counts: dict = {}
    for r in records:
        key = f"{r.kind}_{'zero' if r.obstruction_zero else 'nonzero'}"
        counts[key] = counts.get(key, 0) + 1
    clauses = {"o2_agreement": all(r.agree for r in records if r.kind == "o2"),
               "o1_agreement": all(r.agree for r in records if r.kind == "o1")}
    values = {"dim": g.dim, "nilpotency_class": g.nilpotency_class(),
              "ideal_dim": len(h.all_vectors()), "counts": dict(sorted(counts.items())),
              "records": [r.to_json() for r in records]}
    return _report(cfg, clauses, values)


COMMANDS = {"transfer": cmd_transfer, "normalize": cmd_normalize, "fan": cmd_fan,
            "fukaya": cmd_fukaya, "dgla": cmd_dgla}


# --------------------------------------------------------------------------- output


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"
    lines = [f"{report['tool']} {report['version']} {report['command']}"]
    for k, v in report["config"].items():
        lines.append(f"  {k} = {v}")
    for k, v in report["clauses"].items():
        lines.append(f"{'PASS' if v else 'FAIL'} {k}")
    for k in ("W", "cubic", "top", "lambda", "maximal_cones", "lattice_index", "counts", "error"):
        if k in report["values"]:
            lines.append(f"{k}: {report['values'][k]}")
    lines.append("result: " + ("pass" if report["pass"] else f"fail ({report['first_failure']})"))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--genus", type=int, default=3)
    common.add_argument("--truncation-order", type=int, default=None)
    common.add_argument("--max-arity", type=int, default=None)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--output", default=None, help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--samples", type=int, default=20, help="random tuples or lifts per check")
    common.add_argument("--workers", type=int, default=1, help="processes for diagonal tree sums")
    parser = argparse.ArgumentParser(prog="artifact", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("transfer", parents=[common], help="transferred A-infinity structure checks")
    p = sub.add_parser("normalize", parents=[common], help="normalize a function to W")
    p.add_argument("--input", required=True, help="polynomial JSON for alpha0")
    sub.add_parser("fan", parents=[common], help="toric fan suite")
    p = sub.add_parser("fukaya", parents=[common], help="Fukaya table audits")
    p.add_argument("--cross-check", action="store_true", help="also compare with the transferred structure")
    p = sub.add_parser("dgla", parents=[common], help="obstruction suite on a DGLA presentation")
    p.add_argument("--input", default=None, help="presentation JSON (default: bundled Heisenberg example)")
    return parser


def run(argv=None) -> tuple[int, str]:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (EXIT_OK if exc.code == 0 else EXIT_INPUT), ""
    opts = vars(args)
    try:
        cfg = RunConfig(**opts)
        report = COMMANDS[cfg.command](cfg)
    except InputError as exc:
        return EXIT_INPUT, f"input error: {exc}\n"
    text = render(report, cfg.format)
    if cfg.output:
        Path(cfg.output).write_text(text)
        text = ""
    if not report["pass"]:
        return EXIT_FAIL, text + ("" if cfg.output is None else f"failed: {report['first_failure']}\n")
    return EXIT_OK, text


def main(argv=None) -> int:
    code, text = run(argv)
    stream = sys.stderr if code == EXIT_INPUT else sys.stdout
    stream.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
