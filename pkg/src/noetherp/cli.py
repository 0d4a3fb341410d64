"""Command-line front end: group summaries, certificate build and verify.

Exit codes: 0 pass, 1 a check failed, 2 usage/I-O/parse/size errors.
Every flag can also be supplied as an NT_-prefixed environment variable
(NT_N, NT_P, NT_CASE, ...); an explicit flag wins over the environment.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from .cyclo import is_prime
from .perm import (DEFAULT_CAP, BudgetExceeded, enumerate_group, generator_indices, order_exponent,
                   orientation_group, sylow_group)
from .poly import DEFAULT_TERM_CAP, SizeLimitExceeded, set_term_cap
from .tower import (DEFAULT_SEED, BoundExceeded, UnsupportedShape, build_kernel_certificate, build_p2_tower,
                    build_podd_tower, discriminant_identity_check, hajja_cyclic_generators)
from .verify import verify_document

CASES = ("p2", "podd", "kernel", "hajja", "discriminant")
FORMATS = ("json", "text", "dot")
EXIT_PASS, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class UsageError(ValueError):
    pass


@dataclass
class Config:
    n: int = 4
    p: int = 2
    case: str = "p2"
    out: str | None = None
    format: str | None = None  # per-command default: build writes json, others text
    cap_elems: int = DEFAULT_CAP
    cap_terms: int = DEFAULT_TERM_CAP
    seed: int = DEFAULT_SEED

    def validate(self):
        if not is_prime(self.p):
            raise UsageError(f"p = {self.p} is not prime")
        if self.case not in CASES:
            raise UsageError(f"unknown case {self.case!r}; choose from {', '.join(CASES)}")
        if self.format is not None and self.format not in FORMATS:
            raise UsageError(f"unknown format {self.format!r}")
        if self.cap_elems <= 0 or self.cap_terms <= 0:
            raise UsageError("caps must be positive")
        if self.n < 0:
            raise UsageError("n must be non-negative")
        return self


_ENV_TYPES = {"n": int, "p": int, "case": str, "out": str, "format": str,
              "cap_elems": int, "cap_terms": int, "seed": lambda s: int(s, 0)}


def config_from_args(args: argparse.Namespace, environ=None) -> Config:
    environ = os.environ if environ is None else environ
    cfg = Config()
    for name, conv in _ENV_TYPES.items():
        key = "NT_" + name.upper()
        if key in environ:
            try:
                setattr(cfg, name, conv(environ[key]))
            except ValueError as exc:
                raise UsageError(f"bad value for {key}: {environ[key]!r}") from exc
        val = getattr(args, name, None)
        if val is not None:
            setattr(cfg, name, val)
    return cfg.validate()


# ---------------------------------------------------------------------------
# group-info


def group_info(n: int, p: int, cap: int = DEFAULT_CAP) -> dict:
    g = sylow_group(n, p)
    rows = []
    for ix, (label, perm) in zip(generator_indices(n, p), g.generators):
        rows.append({"label": label, "i": ix.i, "s": ix.s, "cycles": perm.cycle_text()})
    exp = order_exponent(n, p)
    info = {"n": n, "p": p, "order_exponent": exp, "order": p**exp, "generators": rows}
    if n // p >= 1:
        try:
            big = len(enumerate_group(g, cap))
            small = len(enumerate_group(orientation_group(n, p), cap))
            info["orientation_index"] = big // small
            info["enumerated"] = True
        except BudgetExceeded:
            info["orientation_index"] = p
            info["enumerated"] = False
    return info


def group_info_text(info: dict) -> str:
    lines = [f"G({info['n']},{info['p']})"]
    if not info["generators"]:
        lines.append("trivial group")
        return "\n".join(lines) + "\n"
    lines.append(f"order {info['p']}^{info['order_exponent']} = {info['order']}")
    if "orientation_index" in info:
        how = "enumerated" if info.get("enumerated") else "from the order formula"
        lines.append(f"orientation index {info['orientation_index']} ({how})")
    width = max(len(r["label"]) for r in info["generators"])
    for r in info["generators"]:
        lines.append(f"  {r['label']:<{width}}  {r['cycles']}")
    return "\n".join(lines) + "\n"


def group_info_dot(info: dict) -> str:
    """One row per generator; arcs follow each cycle."""
    n = info["n"]
    perms = sylow_group(n, info["p"]).perms()
    out = ["digraph sylow {", "  rankdir=LR;", "  node [shape=circle, fontsize=10];"]
    for row, r in enumerate(info["generators"]):
        gen = perms[row]
        out.append(f"  subgraph row{row} {{ rank=same; label=\"{r['label']}\";")
        out.append(f"    r{row}_label [shape=plaintext, label=\"{r['label']}\"];")
        for x in range(1, n + 1):
            out.append(f"    r{row}_{x} [label=\"{x}\"];")
        out.append("  }")
        for x in range(1, n + 1):
            if gen(x) != x:
                out.append(f"  r{row}_{x} -> r{row}_{gen(x)};")
    out.append("}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# build / verify


def build_document(cfg: Config) -> dict:
    if cfg.case == "p2":
        if cfg.p != 2:
            raise UsageError("case p2 needs --p 2")
        return build_p2_tower(cfg.n, cfg.seed).to_dict()
    if cfg.case == "podd":
        return build_podd_tower(cfg.n, cfg.p, cfg.seed).to_dict()
    if cfg.case == "kernel":
        return build_kernel_certificate(cfg.n, cfg.p, cfg.seed).to_dict()
    if cfg.case == "hajja":
        h = hajja_cyclic_generators(cfg.p)
        return {"case": "hajja", **h.to_dict()}
    rep = discriminant_identity_check()
    summary = "D identity holds" if rep.passed else "D identity fails"
    return {"case": "discriminant", "summary": summary, **rep.to_dict()}


def canonical(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def verify_any(doc: dict, cfg: Config) -> dict:
    """Re-check a build document; returns a report dict with a ``pass`` flag."""
    case = doc.get("case")
    if case == "hajja":
        fresh = hajja_cyclic_generators(doc["p"]).to_dict()
        checks = [{"name": k, "status": "pass" if v else "fail"} for k, v in sorted(fresh["claims"].items())]
        for key in ("u", "v", "z", "finals"):
            same = doc.get(key) == fresh[key]
            checks.append({"name": f"stored {key} matches rebuild", "status": "pass" if same else "fail"})
        return {"case": "hajja", "pass": all(c["status"] == "pass" for c in checks), "checks": checks}
    if case == "discriminant":
        fresh = discriminant_identity_check().to_dict()
        ok = fresh["pass"] and all(doc.get(k) == v for k, v in fresh.items())
        status = "pass" if ok else "fail"
        return {"case": "discriminant", "pass": ok, "checks": [{"name": "D identity holds", "status": status}]}
    return verify_document(doc, cfg.cap_elems).to_dict()


def report_text(rep: dict) -> str:
    lines = [f"case {rep['case']}: {'PASS' if rep['pass'] else 'FAIL'}"]
    for c in rep["checks"]:
        line = f"  [{c['status']}] {c['name']}"
        if c.get("detail"):
            line += f" - {c['detail']}"
        lines.append(line)
        if "witness" in c and c.get("status") != "pass":
            lines.append(f"      witness: {json.dumps(c['witness'], sort_keys=True)}")
    return "\n".join(lines) + "\n"


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_group_info(cfg: Config) -> int:
    info = group_info(cfg.n, cfg.p, cfg.cap_elems)
    text = {"json": canonical, "text": group_info_text, "dot": group_info_dot}[cfg.format or "text"](info)
    _emit(text, cfg.out)
    return EXIT_PASS


def build_summary(doc: dict) -> str:
    if doc["case"] == "discriminant":
        return doc["summary"] + "\n"
    if doc["case"] == "hajja":
        bad = [k for k, v in sorted(doc["claims"].items()) if not v]
        return f"cyclic block p={doc['p']}: " + ("all claims hold" if not bad else "failing " + ", ".join(bad)) + "\n"
    sizes = ", ".join(str(len(lv["generators"])) for lv in doc["levels"])
    return (f"{doc['case']} n={doc['n']} p={doc['p']}: level sizes [{sizes}], "
            f"{len(doc['relations'])} relations, {len(doc['hk_steps'])} Hajja-Kang steps, "
            f"budget {doc['budget']['claimed']}\n")


def cmd_build(cfg: Config) -> int:
    doc = build_document(cfg)
    fmt = cfg.format or "json"
    if fmt == "dot":
        raise UsageError("dot output is only available for group-info")
    _emit(canonical(doc) if fmt == "json" else build_summary(doc), cfg.out)
    if cfg.out and fmt == "json":
        sys.stderr.write(build_summary(doc))
    if cfg.case in ("hajja", "discriminant"):
        ok = doc["pass"] if "pass" in doc else all(doc["claims"].values())
        return EXIT_PASS if ok else EXIT_FAIL
    return EXIT_PASS


def cmd_verify(cfg: Config, path: str) -> int:
    with open(path) as fh:
        doc = json.load(fh)
    if not isinstance(doc, dict):
        raise UsageError("certificate must be a JSON object")
    rep = verify_any(doc, cfg)
    text = canonical(rep) if cfg.format == "json" else report_text(rep)
    _emit(text, cfg.out)
    return EXIT_PASS if rep["pass"] else EXIT_FAIL


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int)
    common.add_argument("--p", type=int)
    common.add_argument("--case", choices=CASES)
    common.add_argument("--out")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--cap-elems", dest="cap_elems", type=int)
    common.add_argument("--cap-terms", dest="cap_terms", type=int)
    common.add_argument("--seed", type=lambda s: int(s, 0))
    parser = argparse.ArgumentParser(prog="noetherp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("group-info", parents=[common], help="generators and orders of the Sylow subgroup")
    sub.add_parser("build", parents=[common], help="build a certificate or identity document")
    v = sub.add_parser("verify", parents=[common], help="re-check a document written by build")
    v.add_argument("path")
    return parser


def main(argv=None, environ=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_ERROR
    try:
        cfg = config_from_args(args, environ)
        set_term_cap(cfg.cap_terms)
        if args.command == "group-info":
            return cmd_group_info(cfg)
        if args.command == "build":
            return cmd_build(cfg)
        return cmd_verify(cfg, args.path)
    except (UsageError, UnsupportedShape, BoundExceeded, OSError, json.JSONDecodeError, KeyError,
            SizeLimitExceeded, BudgetExceeded, ValueError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
