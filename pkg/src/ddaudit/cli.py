"""Command-line entry point orchestrating the audit pipeline."""

import argparse
import csv
import json
import os
import sys

from . import audit, corpus, pipeline, sectioner
from .icd9 import load_dictionary, parse_code, save_dictionary
from .nerl import AnnotationExample, ContextModel, fine_tune, load_model, save_model, train_unsupervised
from .service import AnnotationService

SPANS_HEADER = [
    "admission_id",
    "start",
    "end",
    "surface",
    "concept_id",
    "code",
    "confidence",
    "status",
]
PARTITION_HEADER = ["admission_id", "code", "bucket", "span_start", "span_end", "span_text"]
SECTIONS_HEADER = ["admission_id", "heading", "start", "end", "body"]


def _env_default(name, fallback, cast=str):
    value = os.environ.get("AUDIT_" + name)
    return cast(value) if value is not None else fallback


def _write_config(args, out_dir):
    os.makedirs(out_dir, exist_ok=True)
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    with open(os.path.join(out_dir, "config.json"), "w", encoding="utf-8") as f:
        json.dump(config, f, sort_keys=True, indent=2)
        f.write("\n")


def _load_rules(args):
    return sectioner.load_rules(args.rules) if args.rules else None


def cmd_synth(args):
    _write_config(args, args.out)
    config = corpus.SynthConfig(
        n_admissions=args.n_admissions,
        undercode_rate=args.undercode_rate,
        synonym_noise_rate=args.noise_rate,
        seed=args.seed,
    )
    bundle, ground_truth = corpus.generate_synthetic(config)
    corpus.save_notes(bundle.notes, os.path.join(args.out, "notes.csv"))
    corpus.save_assignments(bundle.assignments, os.path.join(args.out, "assignments.csv"))
    save_dictionary(corpus.vocabulary_dictionary(), os.path.join(args.out, "dictionary.csv"))
    with open(os.path.join(args.out, "ground_truth.csv"), "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["admission_id", "code"])
        for adm_id in sorted(ground_truth):
            for code in sorted(ground_truth[adm_id]):
                writer.writerow([adm_id, code.canonical])
    print("wrote synthetic corpus (%d admissions) to %s" % (args.n_admissions, args.out))


def cmd_extract_dd(args):
    _write_config(args, args.out)
    notes = corpus.load_notes(args.notes)
    rules = _load_rules(args)
    sections = pipeline.extract_sections(notes, rules)
    with open(os.path.join(args.out, "sections.csv"), "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SECTIONS_HEADER)
        for adm_id in sorted(sections):
            s = sections[adm_id]
            writer.writerow([adm_id, s.heading, s.start, s.end, s.body])
    section_stats = sectioner.corpus_section_stats(notes, rules)
    payload = {"found": section_stats.found, "missing": section_stats.missing}
    if section_stats.token_lengths:
        payload["token_lengths"] = vars(section_stats.token_lengths)
    with open(os.path.join(args.out, "section_stats.json"), "w", encoding="utf-8") as f:
        json.dump(payload, f, sort_keys=True, indent=2)
        f.write("\n")
    print("extracted %d DD sections (%d missing)" % (section_stats.found, section_stats.missing))


def cmd_train(args):
    _write_config(args, args.out)
    notes = corpus.load_notes(args.notes)
    dictionary = load_dictionary(args.dictionary)
    sections = pipeline.extract_sections(notes, _load_rules(args))
    model = ContextModel(
        dimension=args.dim,
        similarity_threshold=args.threshold_sim,
        seed=args.seed,
        dictionary_hash=dictionary.content_hash(),
    )
    texts = [sections[a].body for a in sorted(sections)]
    train_unsupervised(texts, dictionary, model)
    save_model(model, os.path.join(args.out, "model.json"))
    print("trained model over %d DD sections" % len(texts))


def _load_optional_model(args):
    if args.model and os.path.exists(args.model):
        return load_model(args.model)
    return None


def cmd_annotate(args):
    _write_config(args, args.out)
    notes = corpus.load_notes(args.notes)
    dictionary = load_dictionary(args.dictionary)
    model = _load_optional_model(args)
    sections = pipeline.extract_sections(notes, _load_rules(args))
    results = pipeline.annotate_sections(sections, dictionary, model, threads=args.threads)
    with open(os.path.join(args.out, "spans.csv"), "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SPANS_HEADER)
        for r in results:
            for s in r.spans:
                writer.writerow(
                    [
                        r.admission_id,
                        s.start,
                        s.end,
                        s.surface,
                        s.concept_id,
                        s.code.canonical,
                        "%.6f" % s.confidence,
                        s.status,
                    ]
                )
    print("annotated %d DD sections" % len(results))


def _run_full(args):
    notes = corpus.load_notes(args.notes)
    assignments, errors = corpus.load_assignments(args.assignments)
    if errors:
        print("warning: %d assignment rows had invalid codes" % len(errors), file=sys.stderr)
    dictionary = load_dictionary(args.dictionary)
    model = _load_optional_model(args)
    return pipeline.run_audit(
        notes,
        assignments,
        dictionary,
        model,
        k=args.top_k,
        rules=_load_rules(args),
        threads=args.threads,
    ), dictionary


def cmd_partition(args):
    _write_config(args, args.out)
    run, _ = _run_full(args)
    path = os.path.join(args.out, "partition.csv")
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(PARTITION_HEADER)
        for r in run["records"]:
            span = min(r.spans, key=lambda s: s.start) if r.spans else None
            writer.writerow(
                [
                    r.admission_id,
                    r.code.canonical,
                    r.bucket,
                    span.start if span else "",
                    span.end if span else "",
                    span.surface if span else "",
                ]
            )
    print("wrote %d partition records to %s" % (len(run["records"]), path))


def cmd_report(args):
    _write_config(args, args.out)
    run, _ = _run_full(args)
    audit.write_report(
        run["report"],
        os.path.join(args.out, "report.json"),
        os.path.join(args.out, "per_code.csv"),
    )
    print("wrote report for %d admissions" % run["report"]["n_admissions"])


def cmd_serve(args):
    import uvicorn

    from .webapp import create_app

    run, dictionary = _run_full(args)
    excerpts = {a: s.body for a, s in run["sections"].items()}
    service = AnnotationService(
        run["records"], excerpts, concept_of=pipeline.concept_for_code(dictionary)
    )
    ui_dir = args.ui_dir or os.path.join(os.path.dirname(__file__), "..", "..", "frontend", "dist")
    app = create_app(service, ui_dir=ui_dir)
    uvicorn.run(app, host="127.0.0.1", port=args.port)


def cmd_fine_tune(args):
    _write_config(args, args.out)
    with open(args.annotations, encoding="utf-8") as f:
        raw = json.load(f)
    annotations = [
        AnnotationExample(
            doc_id=a["doc_id"],
            start=a["start"],
            end=a["end"],
            surface=a["surface"],
            concept_id=a["concept_id"],
            correct=a["correct"],
            annotator_id=a.get("annotator_id", ""),
        )
        for a in raw
    ]
    notes = corpus.load_notes(args.notes)
    sections = pipeline.extract_sections(notes, _load_rules(args))
    documents = {a: s.body for a, s in sections.items()}
    dictionary = load_dictionary(args.dictionary)
    model = _load_optional_model(args) or ContextModel(
        seed=args.seed, dictionary_hash=dictionary.content_hash()
    )
    dictionary, model, metrics = fine_tune(
        annotations, dictionary, model, documents, seed=args.seed
    )
    save_dictionary(dictionary, os.path.join(args.out, "dictionary.csv"))
    save_model(model, os.path.join(args.out, "model.json"))
    with open(os.path.join(args.out, "fine_tune_metrics.json"), "w", encoding="utf-8") as f:
        json.dump(
            {
                "precision": metrics.precision,
                "recall": metrics.recall,
                "f1": metrics.f1,
                "n_train": metrics.n_train,
                "n_test": metrics.n_test,
                "n_rejected": len(metrics.rejected),
            },
            f,
            sort_keys=True,
            indent=2,
        )
        f.write("\n")
    print(
        "fine-tuned on %d annotations: P=%.3f R=%.3f F1=%.3f"
        % (metrics.n_train, metrics.precision, metrics.recall, metrics.f1)
    )


def cmd_emit_silver(args):
    _write_config(args, args.out)
    if not os.path.exists(args.validation):
        raise SystemExit(
            "validation results %s not found: run the `serve` validation step "
            "and export failing codes first" % args.validation
        )
    run, _ = _run_full(args)
    with open(args.validation, encoding="utf-8") as f:
        raw = json.load(f)
    validation = {parse_code(code): bool(passed) for code, passed in raw.items()}
    path = os.path.join(args.out, "silver_standard.csv")
    rows = corpus.emit_silver_standard(run["records"], validation, path)
    print("wrote %d silver-standard rows to %s" % (len(rows), path))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ddaudit",
        description="Audit clinical code assignments against discharge-summary text.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common_io(p, notes=True, dictionary=False, assignments=False, model=False):
        p.add_argument("--out", required=True, help="output artifact directory")
        p.add_argument("--seed", type=int, default=_env_default("SEED", 0, int))
        if notes:
            p.add_argument("--notes", required=True, help="notes CSV (ROW_ID,HADM_ID,CATEGORY,TEXT)")
            p.add_argument("--rules", default=_env_default("RULES", None), help="heading rule file")
        if dictionary:
            p.add_argument("--dictionary", required=True, help="concept dictionary CSV")
        if assignments:
            p.add_argument("--assignments", required=True, help="assigned codes CSV")
            p.add_argument("--top-k", type=int, default=_env_default("TOP_K", 400, int))
        if model:
            p.add_argument("--model", default=_env_default("MODEL", None), help="context model JSON")
            p.add_argument("--threads", type=int, default=_env_default("THREADS", 1, int))

    p = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=_env_default("SEED", 0, int))
    p.add_argument("--n-admissions", type=int, default=500)
    p.add_argument("--undercode-rate", type=float, default=0.0)
    p.add_argument("--noise-rate", type=float, default=0.0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract-dd", help="extract Discharge Diagnosis sections")
    common_io(p)
    p.set_defaults(func=cmd_extract_dd)

    p = sub.add_parser("train", help="unsupervised context-model training")
    common_io(p, dictionary=True)
    p.add_argument("--dim", type=int, default=300)
    p.add_argument("--threshold-sim", type=float, default=0.3)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("annotate", help="run NER+L over DD sections")
    common_io(p, dictionary=True, model=True)
    p.set_defaults(func=cmd_annotate)

    p = sub.add_parser("partition", help="produce P_A / P_NA / A_NP records")
    common_io(p, dictionary=True, assignments=True, model=True)
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("report", help="full audit report")
    common_io(p, dictionary=True, assignments=True, model=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("serve", help="annotation service + UI")
    common_io(p, dictionary=True, assignments=True, model=True)
    p.add_argument("--port", type=int, default=_env_default("PORT", 8000, int))
    p.add_argument("--ui-dir", default=None)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("fine-tune", help="fine-tune from exported annotations")
    common_io(p, dictionary=True, model=True)
    p.add_argument("--annotations", required=True, help="exported annotations JSON")
    p.set_defaults(func=cmd_fine_tune)

    p = sub.add_parser("emit-silver", help="emit the silver-standard dataset")
    common_io(p, dictionary=True, assignments=True, model=True)
    p.add_argument("--validation", required=True, help="JSON map code -> passed")
    p.set_defaults(func=cmd_emit_silver)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args) or 0


if __name__ == "__main__":
    sys.exit(main())
