"""
Command-line entry point

    python -m src.cli [--verbose] [--seed N] [--manifest run.json] <command> ...
    python -m src.cli --corpus DIR [--summary out.csv] [budget flags]

Commands: parse, classify, normalize, check, find, saturate, finsat, replay.

Exit code: 0 = thành công / true, 1 = false / không tìm thấy trong giới hạn,
2 = lỗi sử dụng hoặc đầu vào (kèm tên file và dòng nếu có).
Mọi mô hình được kiểm tra trước khi ghi; file được ghi qua write_atomic.
"""

import argparse
import hashlib
import io as _io
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd
from pydantic import BaseModel, Field

from src.analysis.finder import find_model
from src.analysis.modelcheck import (
    CheckViolation, check_model, evaluate, transitivity_violations, ubiquity_violations,
)
from src.config import Budgets, SaturationOptions, SearchConfig
from src.data.io import structure_lines, read_structure, write_atomic, write_trace
from src.exceptions import InputError, TriguardError
from src.logic.fragments import classify_fragment
from src.logic.normalform import enhance_tg_normal_form, recognize_normal_form, to_normal_form
from src.logic.parser import format_document, parse_document
from src.logic.signature import Signature
from src.logic.syntax import Formula
from src.models.deciders import decide_finsat_gftg, decide_finsat_gfutg
from src.models.saturation import saturation_pipeline
from src.structures.structure import Structure

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2

LOGICS = ("gftg", "gfutg")


class RunManifest(BaseModel):
    """
    Bản ghi một lần chạy CLI

    Attributes:
        command: Tên lệnh (hoặc "corpus")
        argv: Đối số (không gồm --manifest) để chạy lại
        inputs, outputs: Đường dẫn → fingerprint nội dung
        config: Budgets / flags đã dùng
        seed: Seed
        seconds: Thời gian chạy
        verdicts: Kết quả (theo lệnh hoặc theo instance)
        exit_code: Exit code
    """

    command: str
    argv: List[str]
    inputs: Dict[str, str] = Field(default_factory=dict)
    outputs: Dict[str, str] = Field(default_factory=dict)
    config: Dict[str, Any] = Field(default_factory=dict)
    seed: int = 0
    seconds: float = 0.0
    verdicts: Dict[str, Any] = Field(default_factory=dict)
    exit_code: int = EXIT_OK


def fingerprint(path) -> str:
    """
    sha256 của nội dung file; với CSV bỏ cột thời gian "seconds" (không tất định)
    """
    path = Path(path)
    if path.suffix == ".csv":
        frame = pd.read_csv(path)
        frame = frame.drop(columns=["seconds"], errors="ignore")
        data = frame.to_csv(index=False).encode("utf-8")
    else:
        data = path.read_bytes()
    return hashlib.sha256(data).hexdigest()


class _Run:
    """Thu thập input/output/verdict cho manifest"""

    def __init__(self, command: str, argv: Sequence[str], seed: int):
        self.manifest = RunManifest(command=command, argv=list(argv), seed=seed)

    def read_text(self, path: str) -> str:
        if path == "-":
            return sys.stdin.read()
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise InputError(f"{path}: {e.strerror or e}") from e
        self.manifest.inputs[path] = hashlib.sha256(text.encode("utf-8")).hexdigest()
        return text

    def document(self, path: str) -> Tuple[Signature, Formula]:
        text = self.read_text(path)
        try:
            return parse_document(text)
        except ValueError as e:
            raise InputError(f"{path}: {e}") from e

    def write(self, path, lines: Sequence[str]) -> Path:
        written = write_atomic(path, lines)
        self.manifest.outputs[str(path)] = fingerprint(written)
        return written

    def record(self, path) -> None:
        self.manifest.outputs[str(path)] = fingerprint(path)


def _emit(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True, default=str))


def _violation_dict(v: CheckViolation) -> dict:
    return {"kind": v.kind, "conjunct": v.conjunct, "elements": list(v.elements), "relation": v.relation}


def _semantic_violations(s: Structure, ubiquitous: bool, transitive: bool) -> List[CheckViolation]:
    found = []
    if ubiquitous:
        found += ubiquity_violations(s)
    if transitive:
        found += transitivity_violations(s)
    return found


def _verified(model: Structure, sig: Signature, phi: Formula, ubiquitous: bool = False) -> Structure:
    """Reduct của model về sig, sau khi kiểm tra nó thỏa phi"""
    reduct = model.reduct(sig)
    if not evaluate(reduct, phi) or _semantic_violations(reduct, ubiquitous, bool(sig.transitive_symbols)):
        raise TriguardError("Produced model failed verification against the input sentence")
    return reduct


def _write_or_print(run: _Run, out: Optional[str], lines: Sequence[str]) -> None:
    if out:
        run.write(out, lines)
    else:
        print("\n".join(lines))


def _budgets(args) -> Budgets:
    values = {
        "alpha_max": args.alpha_max,
        "beta_max": args.beta_max,
        "find_max": args.find_max,
        "max_candidates": args.max_candidates,
        "max_saturation_seed": args.max_seed_size,
        "max_grid_side": args.max_grid_side,
        "seed": args.seed,
    }
    return Budgets(**{k: v for k, v in values.items() if v is not None})


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_parse(args, run: _Run) -> int:
    sig, f = run.document(args.file)
    _write_or_print(run, args.out, format_document(sig, f).rstrip("\n").split("\n"))
    return EXIT_OK


def cmd_classify(args, run: _Run) -> int:
    sig, f = run.document(args.file)
    report = classify_fragment(f, sig)
    run.manifest.verdicts = dict(report.membership)
    _emit({
        "membership": report.membership,
        "violations": {
            name: [{"path": list(v.path), "rule": v.rule} for v in found]
            for name, found in report.violations.items()
        },
    })
    return EXIT_OK


def cmd_normalize(args, run: _Run) -> int:
    sig, f = run.document(args.file)
    disjuncts = list(to_normal_form(f, sig))
    if args.tg:
        disjuncts = [enhance_tg_normal_form(nf) for nf in disjuncts]
    stem = Path(args.file).stem if args.file != "-" else "stdin"
    chunks = []
    for index, nf in enumerate(disjuncts):
        text = format_document(nf.signature, nf.to_formula())
        if args.out_dir:
            run.write(Path(args.out_dir) / f"{stem}.{index}.gf", text.rstrip("\n").split("\n"))
        else:
            chunks.append(f"# disjunct {index}\n{text}")
    if chunks:
        print("\n".join(chunks), end="")
    run.manifest.verdicts = {"disjuncts": len(disjuncts)}
    logger.info("%d normal-form disjuncts", len(disjuncts))
    return EXIT_OK if disjuncts else EXIT_FALSE


def cmd_check(args, run: _Run) -> int:
    sig, f = run.document(args.phi)
    s = read_structure(args.model, signature=sig)
    run.manifest.inputs[args.model] = fingerprint(args.model)
    nf = recognize_normal_form(f, sig)
    if nf is not None:
        report = check_model(s, nf, args.ubiquitous, args.transitive, limit=args.limit)
        verdict, violations, method = report.verdict, report.violations, "normal_form"
    else:
        violations = _semantic_violations(s, args.ubiquitous, args.transitive)[: args.limit]
        verdict = evaluate(s, f) and not violations
        method = "evaluate"
    run.manifest.verdicts = {"verdict": verdict}
    _emit({"verdict": verdict, "method": method, "violations": [_violation_dict(v) for v in violations]})
    return EXIT_OK if verdict else EXIT_FALSE


def cmd_find(args, run: _Run) -> int:
    sig, f = run.document(args.file)
    if args.ubiquitous and sig.universal_symbol is None:
        raise InputError(f"{args.file}: --ubiquitous needs a declared universal symbol")
    cfg = SearchConfig(
        max_domain_size=args.max_size,
        ubiquitous=args.ubiquitous,
        transitive=args.transitive,
        max_distinct_elements_per_fact=args.max_fact_elems,
        ramified=args.ramified,
        seed=args.seed,
    )
    run.manifest.config = cfg.model_dump()
    best = None
    for nf in to_normal_form(f, sig):
        model = find_model(nf, cfg)
        if model is not None and (best is None or model.size < best.size):
            best = model
    if best is None:
        run.manifest.verdicts = {"found": False}
        _emit({"found": False, "max_size": args.max_size})
        return EXIT_FALSE
    model = _verified(best, sig, f, args.ubiquitous)
    run.manifest.verdicts = {"found": True, "size": model.size}
    _write_or_print(run, args.out, structure_lines(model))
    return EXIT_OK


def _saturate_first(sig: Signature, f: Formula, budgets: Budgets, options: SaturationOptions):
    for nf in to_normal_form(f, sig):
        if options.tg_mode:
            nf = enhance_tg_normal_form(nf)
        result = saturation_pipeline(nf, budgets, tg_mode=options.tg_mode, options=options)
        if result is not None:
            return result
    return None


def cmd_saturate(args, run: _Run) -> int:
    sig, f = run.document(args.phi)
    if sig.universal_symbol is None:
        raise InputError(f"{args.phi}: saturation needs a declared universal symbol")
    budgets = _budgets(args)
    tg_mode = args.tg or bool(sig.transitive_symbols)
    options = SaturationOptions(
        constants=args.constants or bool(sig.constants),
        tg_mode=tg_mode,
        check_every_step=args.check_steps,
        check_stride=args.check_stride,
    )
    run.manifest.config = {"budgets": budgets.model_dump(), "options": options.model_dump()}
    result = _saturate_first(sig, f, budgets, options)
    if result is None:
        run.manifest.verdicts = {"saturated": False}
        _emit({"saturated": False})
        return EXIT_FALSE
    model = _verified(result.model, sig, f, ubiquitous=True)
    run.write(args.out, structure_lines(model))
    if args.trace:
        write_trace(result.trace, args.trace)
        run.record(args.trace)
    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        from src.visualization.plots import ConstructionVisualizer

        ConstructionVisualizer().plot_saturation_progress(result.trace, save_path=args.plot)
    summary = result.summary().to_dict()
    run.manifest.verdicts = {"saturated": True, **summary}
    _emit({"saturated": True, **summary})
    return EXIT_OK


def _decide(logic: str, f: Formula, sig: Signature, budgets: Budgets):
    if logic == "gftg":
        return decide_finsat_gftg(f, sig, budgets)
    return decide_finsat_gfutg(f, sig, budgets)


def cmd_finsat(args, run: _Run) -> int:
    sig, f = run.document(args.file)
    budgets = _budgets(args)
    run.manifest.config = {"logic": args.logic, "budgets": budgets.model_dump()}
    result = _decide(args.logic, f, sig, budgets)
    summary = result.summary().to_dict()
    run.manifest.verdicts = summary
    if result and args.certificate:
        run.write(args.certificate, structure_lines(result.certificate))
    _emit(summary)
    return EXIT_OK if result else EXIT_FALSE


def cmd_replay(args, run: _Run) -> int:
    """Chạy lại argv của manifest và so sánh fingerprint các output"""
    try:
        manifest = RunManifest.model_validate_json(run.read_text(args.manifest_file))
    except ValueError as e:
        raise InputError(f"{args.manifest_file}: {e}") from e
    code = main(manifest.argv)
    mismatched = sorted(
        path for path, digest in manifest.outputs.items()
        if not Path(path).exists() or fingerprint(path) != digest
    )
    identical = code == manifest.exit_code and not mismatched
    run.manifest.verdicts = {"identical": identical}
    _emit({"identical": identical, "exit_code": code, "mismatched": mismatched})
    return EXIT_OK if identical else EXIT_FALSE


# ---------------------------------------------------------------------------
# Corpus batch mode
# ---------------------------------------------------------------------------

def solve_instance(sig: Signature, f: Formula, budgets: Budgets) -> dict:
    """
    Chọn thủ tục theo fragment và chạy

    - có hằng (và U): saturation pipeline trên từng disjunct
    - GFU+TG / TGF+TG không hằng: decide_finsat_gfutg
    - GF+TG: decide_finsat_gftg
    """
    report = classify_fragment(f, sig)
    row = {"logic": None, "verdict": "unsupported", "model_size": None, "steps": None, "method": None}
    if sig.constants:
        if sig.universal_symbol is None or not report.member("GFU"):
            return row
        options = SaturationOptions(constants=True)
        result = _saturate_first(sig, f, budgets, options)
        row.update(logic="gfu")
        if result is None:
            return {**row, "verdict": "unsat-in-budget"}
        model = _verified(result.model, sig, f, ubiquitous=True)
        return {**row, "verdict": "sat", "model_size": model.size, "steps": len(result.trace), "method": "saturation"}
    if sig.universal_symbol is not None and (report.member("GFU+TG") or report.member("TGF+TG")):
        logic = "gfutg"
    elif report.member("GF+TG"):
        logic = "gftg"
    else:
        return row
    result = _decide(logic, f, sig, budgets)
    return {
        **row,
        "logic": logic,
        "verdict": "sat" if result else "unsat-in-budget",
        "model_size": result.certificate.size if result else None,
        "method": result.method,
    }


def run_corpus(args, run: _Run) -> int:
    directory = Path(args.corpus)
    if not directory.is_dir():
        raise InputError(f"{directory}: not a directory")
    budgets = _budgets(args)
    run.manifest.config = {"budgets": budgets.model_dump()}
    rows = []
    for path in sorted(directory.glob("*.gf")):
        start = time.perf_counter()
        try:
            sig, f = run.document(str(path))
            row = solve_instance(sig, f, budgets)
        except (TriguardError, ValueError) as e:
            logger.warning("%s: %s", path.name, e)
            row = {"logic": None, "verdict": "error", "model_size": None, "steps": None, "method": None}
        rows.append({"instance": path.stem, **row, "seconds": round(time.perf_counter() - start, 3)})
        logger.info("%s: %s", path.stem, row["verdict"])
    columns = ["instance", "logic", "verdict", "model_size", "steps", "method", "seconds"]
    frame = pd.DataFrame(rows, columns=columns)
    buffer = _io.StringIO()
    frame.to_csv(buffer, index=False)
    summary = Path(args.summary) if args.summary else directory / "summary.csv"
    run.write(summary, buffer.getvalue().rstrip("\n").split("\n"))
    run.manifest.verdicts = {row["instance"]: row["verdict"] for row in rows}
    print(frame.drop(columns=["seconds"]).to_string(index=False))
    return EXIT_FALSE if (frame["verdict"] == "error").any() else EXIT_OK


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

def _add_budget_flags(parser: argparse.ArgumentParser, nested: bool = False) -> None:
    # on subcommands SUPPRESS keeps the top-level values when a flag is absent
    default = argparse.SUPPRESS if nested else None
    group = parser.add_argument_group(title="Budgets", description="Defaults come from TRIGUARD_* variables")
    group.add_argument("--alpha-max", type=int, default=default, help="maximum number of 1-types per candidate")
    group.add_argument("--beta-max", type=int, default=default, help="maximum number of 2-types per candidate")
    group.add_argument("--find-max", type=int, default=default, help="domain-size bound of the model finder")
    group.add_argument("--max-candidates", type=int, default=default, help="candidates tried per normal-form disjunct")
    group.add_argument("--max-seed-size", type=int, default=default, help="bound on the size of the phi* model")
    group.add_argument("--max-grid-side", type=int, default=default,
                       help="bound on the grid side of GF+TG certificates")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="triguard", description="Finite satisfiability for guarded logics")
    parser.add_argument("--verbose", "-v", action="store_true", help="log at DEBUG level")
    parser.add_argument("--seed", type=int, default=0, help="finder seed, recorded in the manifest")
    parser.add_argument("--manifest", help="write a run manifest (JSON) to this path")
    parser.add_argument("--corpus", help="batch mode: run every *.gf file of a directory")
    parser.add_argument("--summary", help="CSV summary path for --corpus (default DIR/summary.csv)")
    _add_budget_flags(parser)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("parse", help="parse a .gf document and print it normalized")
    p.add_argument("file", help="formula file or - for stdin")
    p.add_argument("--out")

    p = sub.add_parser("classify", help="fragment membership as JSON")
    p.add_argument("file")

    p = sub.add_parser("normalize", help="normal-form disjuncts")
    p.add_argument("file")
    p.add_argument("--tg", action="store_true", help="enhanced normal form with ntr/tr conjuncts")
    p.add_argument("--out-dir", help="write one numbered .gf file per disjunct")

    p = sub.add_parser("check", help="check a JSON-lines model against a formula")
    p.add_argument("model")
    p.add_argument("phi")
    p.add_argument("--ubiquitous", action="store_true")
    p.add_argument("--transitive", action="store_true")
    p.add_argument("--limit", type=int, default=20, help="maximum number of reported violations")

    p = sub.add_parser("find", help="bounded model search")
    p.add_argument("file")
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--ubiquitous", action="store_true")
    p.add_argument("--transitive", action="store_true")
    p.add_argument("--ramified", action="store_true")
    p.add_argument("--max-fact-elems", type=int)
    p.add_argument("--out")

    p = sub.add_parser("saturate", help="U-saturation pipeline for GFU / GFU+TG")
    p.add_argument("--phi", required=True)
    p.add_argument("--constants", action="store_true", help="use harmonized operations")
    p.add_argument("--tg", action="store_true", help="leave transitive facts untouched")
    p.add_argument("--check-steps", action="store_true", help="check invariants after every step")
    p.add_argument("--check-stride", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--trace")
    p.add_argument("--plot", help="PNG of the U-pair growth")

    p = sub.add_parser("finsat", help="bounded finite-satisfiability decision")
    p.add_argument("file")
    p.add_argument("--logic", choices=LOGICS, required=True)
    p.add_argument("--certificate", help="write the certificate model here")

    p = sub.add_parser("replay", help="re-run a manifest and compare outputs")
    p.add_argument("manifest_file")

    for name in ("saturate", "finsat"):
        _add_budget_flags(sub.choices[name], nested=True)
    return parser


COMMANDS = {
    "parse": cmd_parse,
    "classify": cmd_classify,
    "normalize": cmd_normalize,
    "check": cmd_check,
    "find": cmd_find,
    "saturate": cmd_saturate,
    "finsat": cmd_finsat,
    "replay": cmd_replay,
}


def _strip_manifest(argv: Sequence[str]) -> List[str]:
    result, skip = [], False
    for item in argv:
        if skip:
            skip = False
        elif item == "--manifest":
            skip = True
        elif not item.startswith("--manifest="):
            result.append(item)
    return result


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    if args.command is None and not args.corpus:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE

    run = _Run(args.command or "corpus", _strip_manifest(argv), args.seed)
    start = time.perf_counter()
    try:
        code = run_corpus(args, run) if args.corpus else COMMANDS[args.command](args, run)
    except (TriguardError, ValueError, OSError) as e:
        print(f"triguard: error: {e}", file=sys.stderr)
        code = EXIT_USAGE
    run.manifest.seconds = round(time.perf_counter() - start, 3)
    run.manifest.exit_code = code
    if args.manifest:
        write_atomic(args.manifest, [run.manifest.model_dump_json(indent=2)])
    return code


if __name__ == "__main__":
    sys.exit(main())
