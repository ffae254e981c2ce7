"""Command-line interface: ``artcode-mr <gen|extract|train|eval|verify|report>``.

Every subcommand accepts ``--config FILE`` holding a JSON object whose keys
are the long flag names (dashes or underscores); explicit flags win.
Exit status is 0 on success, 2 on usage errors and 1 on runtime failures.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .artcode.dataset import ARTCODE, NON_ARTCODE, generate_dataset, load_manifest
from .classifier import TrainConfig, load_model, save_model, train
from .errors import ArtcodeError, InvalidSpec
from .evaluation import (DEFAULT_NTREES_GRID, CvPlan, FeatureBank, coin_records, model_records,
                         ntrees_sweep, out_of_fold_records, rectification_report, rho_groups, run_cv,
                         write_sweep_csv)
from .features import SohConfig, extract_soh, read_feature_csv, write_feature_csv
from .mr import MrConfig, Thresholds, WeightVector, build_masks, read_rho_csv, write_rho_csv
from .stats import VerifyConfig, run_verification
from .stats.verify import write_report


class UsageError(Exception):
    pass


def _write_json(path, data) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


# --- shared flag groups ---------------------------------------------------


def _add_soh(p):
    g = p.add_argument_group("features")
    g.add_argument("--bins", type=int, default=36, help="orientation bins")
    g.add_argument("--unsigned", action="store_true", help="fold orientations into [0, 180)")
    g.add_argument("--mag-threshold", type=float, default=8 / 255,
                   help="ignore gradients below this fraction of the image maximum")


def _soh(a) -> SohConfig:
    return SohConfig(bin_count=a.bins, signed=not a.unsigned, mag_threshold=a.mag_threshold)


def _add_train(p):
    g = p.add_argument_group("classifier")
    g.add_argument("--algo", choices=("rf", "svm"), default="rf")
    g.add_argument("--ntrees", type=int, default=30)
    g.add_argument("--max-depth", type=int, default=8)
    g.add_argument("--min-leaf", type=int, default=2)
    g.add_argument("--feature-subsample", type=int, default=None)
    g.add_argument("--cost-pos", type=float, default=2.0, help="SVM cost of missing an Artcode")
    g.add_argument("--cost-neg", type=float, default=1.0)
    g.add_argument("--epochs", type=int, default=200)
    g.add_argument("--lr", type=float, default=0.5)
    g.add_argument("--l2", type=float, default=0.01)


def _train_cfg(a) -> TrainConfig:
    return TrainConfig(algo=a.algo, n_trees=a.ntrees, max_depth=a.max_depth, min_leaf=a.min_leaf,
                       feature_subsample=a.feature_subsample, svm_cost_pos=a.cost_pos,
                       svm_cost_neg=a.cost_neg, svm_epochs=a.epochs, svm_lr=a.lr, svm_l2=a.l2, seed=a.seed)


def _add_mr(p):
    g = p.add_argument_group("metamorphic relations")
    g.add_argument("--n-sep", type=int, default=4, choices=(4, 9, 16), help="separation tiles")
    g.add_argument("--w-s", type=float, default=0.1, help="separation block weight")
    g.add_argument("--w-o", type=float, default=0.15, help="occlusion block weight")
    g.add_argument("--t1", type=float, default=0.2)
    g.add_argument("--t2", type=float, default=0.2)
    g.add_argument("--raw-proba", action="store_true", help="sum block probabilities instead of votes")


def _mr_cfg(a) -> MrConfig:
    w = WeightVector(a.n_sep, 4, a.w_s, a.w_o)
    return MrConfig(a.n_sep, 4, w, Thresholds(a.t1, a.t2, w.rho_max), binary=not a.raw_proba)


def _add_cv(p):
    g = p.add_argument_group("cross-validation")
    g.add_argument("--folds", type=int, default=5)
    g.add_argument("--repeats", type=int, default=5)
    g.add_argument("--no-stratify", action="store_true")


def _bank(a, mr: MrConfig) -> FeatureBank:
    manifest = load_manifest(a.manifest)
    first = manifest.image(manifest.entries[0])
    return FeatureBank.from_manifest(manifest, build_masks((first.width, first.height), mr.n, mr.m), _soh(a))


# --- subcommands ----------------------------------------------------------


def cmd_gen(a):
    opts = {"canvas": (a.width, a.height), "copies": a.copies, "background": not a.no_background,
            "artcode_like_fraction": a.artcode_like_fraction, "n_regions": a.regions, "noise_level": a.noise}
    manifest = generate_dataset(a.artcodes, a.non_artcodes, a.seed, a.out, **opts)
    print(f"wrote {len(manifest)} images and {Path(a.out) / 'manifest.json'}")


def cmd_extract(a):
    manifest = load_manifest(a.manifest)
    cfg = _soh(a)
    feats = [extract_soh(manifest.image(e), cfg).values for e in manifest]
    write_feature_csv(a.out, [e.id for e in manifest], [e.label for e in manifest], np.vstack(feats))
    print(f"wrote {len(feats)} x {cfg.dim} features to {a.out}")


def cmd_train(a):
    _, labels, feats = read_feature_csv(a.features)
    model = train(feats, labels, _train_cfg(a))
    save_model(model, a.out)
    print(f"wrote {a.algo} model to {a.out}")


def cmd_eval(a):
    mr = _mr_cfg(a)
    bank = _bank(a, mr)
    plan = CvPlan(a.folds, a.repeats, not a.no_stratify, a.seed)
    cfg = _train_cfg(a)
    result = run_cv(bank, cfg, mr, plan)
    _write_json(a.out, {"algo": a.algo, "ntrees": a.ntrees, "t1": a.t1, "t2": a.t2,
                        "folds": a.folds, "repeats": a.repeats, "seed": a.seed, **result.to_json()})
    if a.records:
        write_rho_csv(a.records, result.records)
    if a.curves:
        grid = a.grid or list(DEFAULT_NTREES_GRID)
        write_sweep_csv(a.curves, ntrees_sweep(bank, cfg, mr, plan, grid))
    o, g = result.original, result.gains()
    print(f"original recall {o.recall:.6f} mcc {o.mcc:.6f}; augmented gain recall {g['recall']:+.6f} "
          f"mcc {g['mcc']:+.6f}")


def cmd_verify(a):
    mr = _mr_cfg(a)
    bank = _bank(a, mr)
    truth = {i: (ARTCODE if lab else NON_ARTCODE) for i, lab in zip(bank.ids, bank.labels)}
    if a.labeler == "coin":
        records = coin_records(bank.ids, mr, a.seed)
    elif a.model:
        records = model_records(bank, load_model(a.model), mr)
    else:
        records = out_of_fold_records(bank, _train_cfg(a), mr, a.folds, a.seed)
    if a.records:
        write_rho_csv(a.records, records)
    g_a, g_n = rho_groups(records, truth, mr.weights.rho_max)
    cfg = VerifyConfig(k_groups=a.k_groups, alpha=a.alpha, seed=a.seed, verdict_rule=a.verdict_rule,
                       mc_samples=a.mc_samples, alternative=a.alternative)
    report = run_verification(g_a, g_n, cfg)
    Path(a.out).parent.mkdir(parents=True, exist_ok=True)
    write_report(report, a.out, a.table)
    sys.stdout.write(report.render_table())


def cmd_report(a):
    records = read_rho_csv(a.records)
    truth = {e.id: e.label for e in load_manifest(a.manifest)}
    summary = rectification_report(records, truth)
    _write_json(a.out, summary.to_json())
    if a.scatter:
        with open(a.scatter, "w", newline="") as fh:
            out = csv.writer(fh, lineterminator="\n")
            out.writerow(["id", "rho", "class", "rectified"])
            for r in records:
                out.writerow([r.image_id, repr(r.rho), truth[r.image_id], str(r.rectified).lower()])
    print(f"net rectification {100 * summary.net_percentage:.2f}%")


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="artcode-mr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON file of flag values")
        p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)
        return p

    p = command("gen", cmd_gen, "render a synthetic dataset")
    p.add_argument("--artcodes", type=int, default=47)
    p.add_argument("--non-artcodes", type=int, default=116)
    p.add_argument("--out", required=True)
    p.add_argument("--width", type=int, default=256)
    p.add_argument("--height", type=int, default=256)
    p.add_argument("--copies", type=int, default=3, help="marker copies per image")
    p.add_argument("--no-background", action="store_true")
    p.add_argument("--artcode-like-fraction", type=float, default=0.2)
    p.add_argument("--regions", type=int, default=5)
    p.add_argument("--noise", type=float, default=0.0)

    p = command("extract", cmd_extract, "manifest to SOH feature CSV")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    _add_soh(p)

    p = command("train", cmd_train, "feature CSV to model file")
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    _add_train(p)

    p = command("eval", cmd_eval, "cross-validate original and augmented classifiers")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="metrics JSON")
    p.add_argument("--curves", help="CSV of metrics over the nTrees grid")
    p.add_argument("--grid", type=int, nargs="+", help="nTrees values for --curves")
    p.add_argument("--records", help="CSV dump of rho-records")
    _add_train(p)
    _add_mr(p)
    _add_cv(p)
    _add_soh(p)

    p = command("verify", cmd_verify, "group-level statistical verification")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="report JSON")
    p.add_argument("--table", help="text table of the report")
    p.add_argument("--records", help="CSV dump of rho-records")
    p.add_argument("--model", help="score with this model instead of out-of-fold training")
    p.add_argument("--labeler", choices=("model", "coin"), default="model")
    p.add_argument("--k-groups", type=int, default=20)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--mc-samples", type=int, default=100_000)
    p.add_argument("--verdict-rule", choices=("median_p", "fraction_significant"), default="median_p")
    p.add_argument("--alternative", choices=("two-sided", "greater", "less"), default="two-sided")
    _add_train(p)
    _add_mr(p)
    p.add_argument("--folds", type=int, default=5)
    _add_soh(p)

    p = command("report", cmd_report, "rectification summary from a rho-record dump")
    p.add_argument("--records", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True, help="summary JSON")
    p.add_argument("--scatter", help="CSV of id, rho, class, rectified")
    return parser


def _apply_config(parser, argv):
    """Parse ``argv`` after loading defaults from the subcommand's ``--config`` file."""
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    subparsers = parser._subparsers._group_actions[0].choices
    command = next((tok for tok in argv if tok in subparsers), None)
    if known.config and command:
        try:
            data = json.loads(Path(known.config).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config {known.config}: {exc}") from exc
        if not isinstance(data, dict):
            raise UsageError("config file must hold a JSON object")
        sub = subparsers[command]
        actions = {act.dest: act for act in sub._actions}
        values = {}
        for key, value in data.items():
            dest = key.replace("-", "_")
            if dest not in actions or dest in ("config", "func", "help"):
                raise UsageError(f"unknown config key {key!r} for {command}")
            values[dest] = value
            actions[dest].required = False
        sub.set_defaults(**values)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"artcode-mr: error: {exc}", file=sys.stderr)
        return 2
    try:
        args.func(args)
    except InvalidSpec as exc:
        print(f"artcode-mr: error: {exc}", file=sys.stderr)
        return 2
    except (ArtcodeError, OSError) as exc:
        print(f"artcode-mr: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
