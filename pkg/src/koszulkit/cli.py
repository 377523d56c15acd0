"""``koszulkit`` command line: presets or presentation files in, JSON/CSV/text reports out.

Exit codes: 0 success, 1 a certificate or check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import re
import sys
import time
import warnings
from fractions import Fraction

from . import __version__
from .algebra import Metric, Presentation, default_cutoff, dual_presentation, graded_dims
from .complexes import (
    dN_zero_check,
    euler_check,
    gorenstein_certificate,
    koszul_certificate,
    ym_M_certificate,
)
from .exactlin import KoszulkitError, ResourceLimitError
from .presets import (
    RepCandidate,
    closed_form_series,
    dual_relation_check,
    preset,
    representation_check,
    sd_dual_check,
    self_duality,
    yang_mills,
)
from .series import (
    TruncatedSeries,
    expand,
    koszul_numerator,
    lie_dims_closed_form,
    lie_dims_from_series,
    pq_one_check,
)
from .tensor import TensorVector

VERBS = ("dims", "dual-dims", "series", "lie-dims", "koszul", "gorenstein", "dnzero", "euler",
         "dualcheck", "repcheck", "report")
SAFE_INT = 2**53


class InputError(KoszulkitError):
    """Malformed command input; maps to exit code 2."""


# --------------------------------------------------------------------------
# presentation files


def _term_lines(text: str) -> list[int]:
    return [text.count("\n", 0, m.start()) + 1 for m in re.finditer(r'"word"\s*:', text)]


def parse_presentation_text(text: str, source: str = "<input>") -> Presentation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InputError(f"{source}: top level must be an object")
    gens = doc.get("generators")
    if not isinstance(gens, list) or not gens or not all(isinstance(x, str) for x in gens):
        raise InputError(f"{source}: 'generators' must be a non-empty list of names")
    if len(set(gens)) != len(gens):
        raise InputError(f"{source}: duplicate generator names")
    N = doc.get("degree")
    if not isinstance(N, int) or isinstance(N, bool) or N < 2:
        raise InputError(f"{source}: 'degree' must be an integer >= 2")
    rels = doc.get("relators", [])
    if not isinstance(rels, list):
        raise InputError(f"{source}: 'relators' must be a list")
    g = len(gens)
    lines = _term_lines(text)
    k = 0
    tensors = []
    for i, rel in enumerate(rels):
        if not isinstance(rel, list):
            raise InputError(f"{source}: relator {i} must be a list of terms")
        acc: dict = {}
        for j, term in enumerate(rel):
            line = lines[k] if k < len(lines) else "?"
            k += 1
            where = f"{source}:{line}: relator {i} term {j}"
            if not isinstance(term, dict) or "word" not in term:
                raise InputError(f"{where}: term needs 'word' and 'coeff'")
            word = term["word"]
            if not isinstance(word, list) or not all(isinstance(x, int) and not isinstance(x, bool) for x in word):
                raise InputError(f"{where}: word must be a list of generator indices")
            if len(word) != N:
                raise InputError(f"{where}: word of length {len(word)} in a degree-{N} presentation")
            if any(not 0 <= x < g for x in word):
                raise InputError(f"{where}: generator index out of range 0..{g - 1}")
            try:
                c = Fraction(str(term.get("coeff", "1")))
            except (ValueError, ZeroDivisionError):
                raise InputError(f"{where}: bad coefficient {term.get('coeff')!r}") from None
            idx = 0
            for x in word:
                idx = idx * g + x
            acc[idx] = acc.get(idx, 0) + c
        tensors.append(TensorVector.from_dict(N, g, acc))
    metric = None
    if "metric" in doc:
        try:
            metric = Metric.from_matrix([[Fraction(str(x)) for x in r] for r in doc["metric"]])
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise InputError(f"{source}: bad metric: {exc}") from None
        if metric.size != g:
            raise InputError(f"{source}: metric size {metric.size} != {g} generators")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        nonzero = [t for t in tensors if not t.is_zero()]
        return Presentation.from_relators(gens, N, nonzero, label=doc.get("label", source), metric=metric)


def parse_presentation(path: str) -> Presentation:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_presentation_text(text, path)


# --------------------------------------------------------------------------
# commands


def _series_dims(p: Presentation, cutoff: int, args):
    dims, prov = graded_dims(p, cutoff, strategy=args.field, seed=args.seed)
    return dims, prov


def _cmd_dims(p, args):
    dims, prov = _series_dims(p, args.cutoff, args)
    return {"dims": dims, "provenance": prov}, []


def _cmd_dual_dims(p, args):
    dims, prov = _series_dims(dual_presentation(p), args.cutoff, args)
    return {"dual_dims": dims, "provenance": prov}, []


def _cmd_series(p, args):
    dims, prov = _series_dims(p, args.cutoff, args)
    dual, _ = _series_dims(dual_presentation(p), args.cutoff, args)
    q = koszul_numerator(dual, p.degree)
    out = {"dims": dims, "provenance": prov, "dual_dims": dual, "koszul_numerator": q,
           "pq_one": pq_one_check(TruncatedSeries.of(dims), q)}
    closed = closed_form_series(p)
    if closed is not None:
        out["closed_form"] = {"numerator": list(closed.numerator), "denominator": list(closed.denominator),
                              "expansion": expand(closed, args.cutoff).list()}
        out["closed_form_agrees"] = out["closed_form"]["expansion"] == dims
    return out, []


def _cmd_lie_dims(p, args):
    jmax = args.jmax
    closed = closed_form_series(p)
    if closed is not None:
        series = expand(closed, jmax)
        source = "closed-form series"
    else:
        if jmax > args.cutoff:
            raise InputError(f"--jmax {jmax} exceeds --cutoff {args.cutoff} for a computed series")
        dims, _ = _series_dims(p, jmax, args)
        series = TruncatedSeries.of(dims)
        source = "computed dims"
    lie = lie_dims_from_series(series, jmax)
    out = {"lie_dims": lie.list(), "series_source": source, "jmax": jmax}
    if p.degree == 3 and p.metric is not None and closed is not None and jmax >= 3:
        cf = lie_dims_closed_form(p.generator_count - 1, jmax)
        out["closed_form"] = cf.list()
        out["closed_form_from_series"] = list(cf.from_series)
        out["closed_form_agrees"] = cf.list() == lie.list()
    return out, []


def _cert(fn):
    def run(p, args):
        c = fn(p, args.cutoff, strategy=args.field, seed=args.seed)
        return {}, [c]
    return run


def _cmd_dnzero(p, args):
    certs = [dN_zero_check(p, args.cutoff, strategy=args.field, seed=args.seed)]
    if _is_yang_mills(p):
        certs.append(ym_M_certificate(p, args.cutoff, strategy=args.field, seed=args.seed))
    return {}, certs


def _is_yang_mills(p: Presentation) -> bool:
    return p.degree == 3 and p.metric is not None and p == yang_mills(p.metric)


def _cmd_dualcheck(p, args):
    if _is_yang_mills(p):
        ok = dual_relation_check(p.metric)
        return {"dual_relation_check": ok, "relations": "cubic Yang-Mills dual"}, []
    if p.degree == 2 and p.generator_count == 4 and p == self_duality(1):
        ok = sd_dual_check()
        return {"dual_relation_check": ok, "relations": "self-duality dual"}, []
    raise InputError("dualcheck needs a Yang-Mills preset or sd+")


def _load_rep(path: str) -> RepCandidate:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    mats = doc.get("matrices") if isinstance(doc, dict) else doc
    try:
        return RepCandidate.from_lists([[[Fraction(str(x)) for x in r] for r in m] for m in mats])
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{path}: bad matrices: {exc}") from None


def _cmd_repcheck(p, args):
    if not args.rep:
        raise InputError("repcheck needs --rep FILE")
    rep = _load_rep(args.rep)
    try:
        ok = representation_check(p, rep)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return {"representation": ok, "size": rep.size}, []


def _cmd_report(p, args):
    results = {}
    results.update(_cmd_dims(p, args)[0])
    results["dual_dims"] = _cmd_dual_dims(p, args)[0]["dual_dims"]
    certs = []
    for fn in (koszul_certificate, gorenstein_certificate, euler_check):
        certs.append(fn(p, args.cutoff, strategy=args.field, seed=args.seed))
    certs.extend(_cmd_dnzero(p, args)[1])
    return results, certs


COMMANDS = {
    "dims": _cmd_dims,
    "dual-dims": _cmd_dual_dims,
    "series": _cmd_series,
    "lie-dims": _cmd_lie_dims,
    "koszul": _cert(koszul_certificate),
    "gorenstein": _cert(gorenstein_certificate),
    "dnzero": _cmd_dnzero,
    "euler": _cert(euler_check),
    "dualcheck": _cmd_dualcheck,
    "repcheck": _cmd_repcheck,
    "report": _cmd_report,
}


# --------------------------------------------------------------------------
# output


def _jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return str(x) if abs(x) >= SAFE_INT else x
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float):
        return x
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return str(x)


def _failing(results: dict, certs) -> bool:
    if any(not c.passed for c in certs):
        return True
    for key in ("dual_relation_check", "representation", "pq_one", "closed_form_agrees"):
        if results.get(key) is False:
            return True
    return False


def _render_text(report: dict) -> str:
    lines = [f"koszulkit {report['meta']['version']}: {report['meta']['command']}",
             f"input: {report['input']['label']} ({report['input']['fingerprint'][:12]})"]
    for k in sorted(report["results"]):
        lines.append(f"{k}: {report['results'][k]}")
    for c in report["certificates"]:
        line = c["label"]
        if c["witness"]:
            line += f" witness={c['witness']}"
        lines.append(line)
    return "\n".join(lines) + "\n"


def _render_csv(report: dict) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    res = report["results"]
    listy = [k for k in sorted(res) if isinstance(res[k], list)]
    if listy:
        w.writerow(["n"] + listy)
        longest = max(len(res[k]) for k in listy)
        for i in range(longest):
            w.writerow([i] + [res[k][i] if i < len(res[k]) else "" for k in listy])
    for c in report["certificates"]:
        w.writerow(["certificate", c["kind"], c["verdict"], c["cutoff"]])
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="koszulkit", description="Exact computations for N-homogeneous algebras.")
    ap.add_argument("verb", choices=VERBS)
    src = ap.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="ym, sd+, sd-, heisenberg, free:G, poly:G, dual-numbers")
    src.add_argument("--input", help="presentation JSON file")
    ap.add_argument("--metric", help="euclidN, minkowskiN or diag:a,b,... (Yang-Mills only)")
    ap.add_argument("--cutoff", type=int, help="degree cutoff (default 8, or 10 for <= 2 generators)")
    ap.add_argument("--jmax", type=int, default=10)
    ap.add_argument("--format", choices=("json", "csv", "text"), default="json")
    ap.add_argument("--field", choices=("modular", "exact", "verify"), default="verify")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--rep", help="JSON file with generator matrices (repcheck)")
    ap.add_argument("--timing", action="store_true", help="include wall time in meta")
    return ap


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    start = time.perf_counter()
    try:
        if args.input:
            if args.metric:
                raise InputError("--metric applies to presets only")
            p = parse_presentation(args.input)
            source = {"file": args.input}
        else:
            try:
                p = preset(args.preset, args.metric)
            except ValueError as exc:
                raise InputError(str(exc)) from None
            source = {"preset": args.preset, "metric": args.metric}
        if args.cutoff is None:
            args.cutoff = default_cutoff(p.generator_count)
        if args.cutoff < 0 or args.jmax < 1:
            raise InputError("cutoff must be >= 0 and jmax >= 1")
        if p.generator_count**args.cutoff > 1 << 20 and args.verb not in ("lie-dims", "dualcheck", "repcheck"):
            raise InputError(f"cutoff {args.cutoff} exceeds the resource bound for {p.generator_count} generators")
        results, certs = COMMANDS[args.verb](p, args)
    except (InputError, ResourceLimitError) as exc:
        print(f"koszulkit: error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"koszulkit: error: {exc}", file=sys.stderr)
        return 2
    meta = {"tool": "koszulkit", "version": __version__, "command": args.verb, "cutoff": args.cutoff,
            "field": args.field, "seed": args.seed}
    if args.verb == "lie-dims":
        meta["jmax"] = args.jmax
    if args.timing:
        meta["seconds"] = round(time.perf_counter() - start, 3)
    report = {
        "meta": meta,
        "input": {"fingerprint": p.fingerprint(), "label": p.label, "generators": list(p.generators),
                  "degree": p.degree, "relator_dim": p.relators.dim, "source": source},
        "results": results,
        "certificates": [c.to_json() for c in certs],
    }
    report = _jsonable(report)
    if args.format == "json":
        out.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    elif args.format == "csv":
        out.write(_render_csv(report))
    else:
        out.write(_render_text(report))
    return 1 if _failing(results, certs) else 0


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
