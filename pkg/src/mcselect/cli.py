"""Command-line pipeline: split, train, select, compare, simulate, report."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np
import tomli

from . import core, datasets, mcdm, policies, splitplan, stats, synth, trainer
from .core import Activation
from .seeding import child_seed

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3


class ConfigError(Exception):
    pass


class DataError(Exception):
    pass


DEFAULT_CONFIG = {
    "split": {"k": 6, "experiment_repeats": 2},
    "grid": {"max_neurons": 20, "activations": ["ReLU", "Tanh", "Sigmoid"]},
    "train": {"max_epochs": 100, "patience": 10, "batch_size": 32,
              "learning_rate": 0.05, "weight_decay": 1e-4},
    "select": {"policies": [p.value for p in policies.PolicyId],
               "aggregations": ["Individual"], "weights": {}},
    "compare": {"alpha": 0.05},
    "simulate": {"n_per_role": 2000, "trials": 200, "n_candidates": 0,
                 "noise": {"train": 0.05, "validation": 0.05,
                           "holdout": 0.2, "test": 0.0},
                 "pool": [{"name": "A", "p_clean": 0.8, "p_noise": 1.0},
                          {"name": "B", "p_clean": 1.0, "p_noise": 0.0}]},
    "output": {"dir": "out", "seed": 0},
}


def load_config(path) -> dict:
    cfg = json.loads(json.dumps(DEFAULT_CONFIG))  # deep copy
    if path is not None:
        try:
            with open(path, "rb") as fh:
                user = tomli.load(fh)
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except tomli.TOMLDecodeError as exc:
            raise ConfigError(f"invalid config: {exc}") from exc
        for section, value in user.items():
            if isinstance(value, dict) and isinstance(cfg.get(section), dict):
                cfg[section].update(value)
            else:
                cfg[section] = value
    if "datasets" not in cfg:
        cfg["datasets"] = [{"id": "two_moons", "name": "two_moons", "n": 600,
                            "label_flip": 0.1}]
    return cfg


def _apply_overrides(cfg: dict, args) -> dict:
    if args.seed is not None:
        cfg["output"]["seed"] = args.seed
    if args.out is not None:
        cfg["output"]["dir"] = args.out
    if getattr(args, "policies", None):
        cfg["select"]["policies"] = args.policies.split(",")
    if getattr(args, "aggregations", None):
        cfg["select"]["aggregations"] = args.aggregations.split(",")
    if getattr(args, "alpha", None) is not None:
        cfg["compare"]["alpha"] = args.alpha
    return cfg


def _out_dir(cfg) -> Path:
    out = Path(cfg["output"]["dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_dataset(spec: dict, master_seed: int):
    ds_id = spec.get("id") or spec.get("name") or spec.get("path")
    if ds_id is None:
        raise ConfigError("dataset entry needs an id, name, or path")
    if "path" in spec:
        try:
            x, y = datasets.load_csv_dataset(spec["path"])
        except (OSError, ValueError) as exc:
            raise DataError(f"cannot read dataset {spec['path']}: {exc}") from exc
        return str(ds_id), x, y
    name = spec.get("name", "two_moons")
    if name not in datasets.BUILTIN_DATASETS:
        raise ConfigError(
            f"unknown dataset {name!r}; valid: {sorted(datasets.BUILTIN_DATASETS)}")
    seed = child_seed(master_seed, "dataset", ds_id)
    kwargs = {k: v for k, v in spec.items() if k not in ("id", "name")}
    x, y = datasets.BUILTIN_DATASETS[name](seed=seed, **kwargs)
    return str(ds_id), x, y


def _grid_from_config(cfg) -> list:
    acts = [Activation.from_name(a) for a in cfg["grid"]["activations"]]
    return trainer.default_grid(cfg["grid"]["max_neurons"], tuple(acts))


def _train_config(cfg, seed: int) -> trainer.TrainConfig:
    t = cfg["train"]
    return trainer.TrainConfig(
        max_epochs=int(t["max_epochs"]), patience=int(t["patience"]),
        batch_size=int(t["batch_size"]),
        learning_rate=float(t["learning_rate"]),
        weight_decay=float(t["weight_decay"]), seed=seed)


def cmd_split(cfg) -> int:
    out = _out_dir(cfg)
    master = int(cfg["output"]["seed"])
    k = int(cfg["split"]["k"])
    repeats = int(cfg["split"]["experiment_repeats"])
    for spec in cfg["datasets"]:
        ds_id, _, y = _load_dataset(spec, master)
        seed = child_seed(master, "split", ds_id)
        try:
            assignment = splitplan.stratified_kfold(y, k, seed)
        except splitplan.InfeasibleSplitError as exc:
            raise DataError(f"{ds_id}: {exc}") from exc
        runs = splitplan.build_run_schedule(k, repeats)
        splitplan.write_plan(out / f"plan_{ds_id}.json", assignment, runs, seed)
        counts = [int(np.sum(np.asarray(y) == c)) for c in sorted(set(y.tolist()))]
        imb = splitplan.imbalance(counts)
        print(f"{ds_id}: k={k} runs={len(runs)} imbalance={imb:.4f}")
    return EXIT_OK


def cmd_train(cfg, jobs: int = 1) -> int:
    out = _out_dir(cfg)
    master = int(cfg["output"]["seed"])
    grid = _grid_from_config(cfg)
    for spec in cfg["datasets"]:
        ds_id, x, y = _load_dataset(spec, master)
        plan_path = out / f"plan_{ds_id}.json"
        if not plan_path.exists():
            raise DataError(f"missing split plan {plan_path}; run `split` first")
        assignment, runs = splitplan.read_plan(plan_path)
        cfg_train = _train_config(cfg, child_seed(master, "trainer", ds_id))
        pool = trainer.generate_pool(x, y, assignment, runs, grid, cfg_train,
                                     dataset_id=ds_id, jobs=jobs)
        violations = core.validate_pool(pool)
        if violations:
            raise DataError(f"{ds_id}: generated pool invalid: {violations[:3]}")
        core.write_pool_csv(pool, out / f"pool_{ds_id}.csv")
        print(f"{ds_id}: {len(pool.records)} records")
    return EXIT_OK


def _selected_results(cfg, pool_by_run, weights):
    results = []
    audit = []
    for policy_name in cfg["select"]["policies"]:
        policy = policies.PolicyId.from_name(policy_name)
        for agg_name in cfg["select"]["aggregations"]:
            agg = policies.AggregationId.from_name(agg_name)
            if agg is policies.AggregationId.GLOBAL:
                batch = policies.select_global(policy, pool_by_run, weights)
            else:
                select = (policies.select_individual
                          if agg is policies.AggregationId.INDIVIDUAL
                          else policies.select_local)
                batch = [select(policy, pool_by_run[r], weights)
                         for r in sorted(pool_by_run)]
            results.extend(batch)
            for res in batch:
                audit.append({
                    "policy": res.policy.value,
                    "aggregation": res.aggregation.value,
                    "dataset_id": res.selected.dataset_id,
                    "run_id": res.run_id,
                    "closeness": res.score,
                    "pareto_retained": res.pareto_retained,
                    "tiebreak_trace": res.tiebreak_trace,
                })
    return results, audit


def cmd_select(cfg) -> int:
    out = _out_dir(cfg)
    weights = cfg["select"].get("weights") or None
    all_results, all_audit = [], []
    for spec in cfg["datasets"]:
        ds_id = str(spec.get("id") or spec.get("name") or spec.get("path"))
        pool_path = out / f"pool_{ds_id}.csv"
        if not pool_path.exists():
            raise DataError(f"missing pool {pool_path}; run `train` first")
        pool = core.read_pool_csv(pool_path)
        violations = core.validate_pool(pool)
        if violations:
            raise DataError(f"{ds_id}: invalid pool: {violations[:3]}")
        pool_by_run = {}
        for rec in pool.records:
            pool_by_run.setdefault(rec.run_id, core.CandidatePool(
                records=[], provenance=pool.provenance)).records.append(rec)
        results, audit = _selected_results(cfg, pool_by_run, weights)
        all_results.extend(results)
        all_audit.extend(audit)
    policies.write_selections_csv(all_results, out / "selections.csv")
    with open(out / "selection_audit.json", "w") as fh:
        json.dump(all_audit, fh, indent=1, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(all_results)} selections")
    return EXIT_OK


def _read_selections(path):
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            rows.append(row)
    if not rows:
        raise DataError(f"no selections in {path}")
    return rows


def cmd_compare(cfg) -> int:
    out = _out_dir(cfg)
    alpha = float(cfg["compare"]["alpha"])
    rows = _read_selections(out / "selections.csv")
    per_policy = {}
    for row in rows:
        metrics = core.SetMetrics(
            train=float(row["acc_train"]), validation=float(row["acc_validation"]),
            holdout=float(row["acc_holdout"]), test=float(row["acc_test"]))
        rep = stats.disagreement(metrics)
        label = f"{row['aggregation']}-{row['policy']}"
        key = (row["dataset_id"], int(row["run_id"]))
        entry = per_policy.setdefault(label, {})
        entry[key] = {
            "neurons": float(row["neurons"]),
            "epochs": float(row["epochs_trained"]),
            "train": metrics.train, "validation": metrics.validation,
            "holdout": metrics.holdout, "test": metrics.test,
            "dis_train_validation": rep.train_validation,
            "dis_holdout_test": rep.holdout_test,
            "dis_all": rep.all,
        }
    columns = ["neurons", "epochs", "train", "validation", "holdout", "test",
               "dis_train_validation", "dis_holdout_test", "dis_all"]
    with open(out / "policy_means.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["policy"] + [f"{c}_{s}" for c in columns
                                      for s in ("mean", "std")])
        for label in sorted(per_policy):
            vals = per_policy[label]
            row_out = [label]
            for c in columns:
                series = np.array([v[c] for v in vals.values()])
                row_out += [repr(float(series.mean())), repr(float(series.std()))]
            writer.writerow(row_out)
    for target, field in (("test_accuracy", "test"), ("all_disagreement", "dis_all")):
        series = {label: {k: v[field] for k, v in vals.items()}
                  for label, vals in sorted(per_policy.items())}
        try:
            matrix = stats.comparison_matrix(series, target, alpha)
        except ValueError as exc:
            raise DataError(str(exc)) from exc
        stats.write_matrix_csv(matrix, out / f"wilcoxon_{target}.csv")
        with open(out / f"wilcoxon_{target}.txt", "w") as fh:
            direction = "higher" if field == "test" else "smaller"
            fh.write(f"preferred direction: {direction}\n")
            fh.write(stats.matrix_to_text(matrix))
    print("wrote policy_means.csv and wilcoxon matrices")
    return EXIT_OK


def cmd_simulate(cfg) -> int:
    out = _out_dir(cfg)
    master = int(cfg["output"]["seed"])
    sim = cfg["simulate"]
    noise = {splitplan.Role.TRAIN: sim["noise"].get("train", 0.0),
             splitplan.Role.VALIDATION: sim["noise"].get("validation", 0.0),
             splitplan.Role.HOLDOUT: sim["noise"].get("holdout", 0.0),
             splitplan.Role.TEST: sim["noise"].get("test", 0.0)}
    n_cands = int(sim.get("n_candidates", 0))
    policy_ids = [policies.PolicyId.from_name(p)
                  for p in cfg["select"]["policies"]]
    report = {}
    for policy in policy_ids:
        regrets, fitter_picks = [], 0
        for trial in range(int(sim["trials"])):
            seed = child_seed(master, "simulate", trial)
            if n_cands > 0:
                cands = synth.sample_candidates(n_cands, seed)
            else:
                cands = [synth.SyntheticCandidate(
                    name=c["name"], p_clean=float(c["p_clean"]),
                    p_noise=float(c["p_noise"]))
                    for c in sim["pool"]]
            task = synth.make_noisy_task(int(sim["n_per_role"]),
                                         {"kind": "linear"}, noise, seed)
            rep = synth.evaluate_selection_regret(policy, cands, task)
            regrets.append(rep.regret)
            fitter_picks += int(rep.picked_noise_fitter)
        report[policy.value] = {
            "mean_regret": float(np.mean(regrets)),
            "noise_fitter_pick_frequency": fitter_picks / len(regrets),
            "trials": len(regrets),
        }
    with open(out / "simulation_report.json", "w") as fh:
        json.dump(report, fh, indent=1, sort_keys=True)
        fh.write("\n")
    for policy, entry in report.items():
        print(f"{policy}: mean_regret={entry['mean_regret']:.4f} "
              f"noise_fitter_freq={entry['noise_fitter_pick_frequency']:.3f}")
    return EXIT_OK


def cmd_report(cfg) -> int:
    out = _out_dir(cfg)
    for spec in cfg["datasets"]:
        ds_id = str(spec.get("id") or spec.get("name") or spec.get("path"))
        pool_path = out / f"pool_{ds_id}.csv"
        if not pool_path.exists():
            raise DataError(f"missing pool {pool_path}; run `train` first")
        pool = core.read_pool_csv(pool_path)
        points = np.array([[r.metrics.holdout, r.metrics.test]
                           for r in pool.records])
        with open(out / f"scatter_{ds_id}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["holdout", "test"])
            for h, t in points:
                writer.writerow([repr(float(h)), repr(float(t))])
        matrix = mcdm.DecisionMatrix(
            alternatives=list(range(len(points))), values=points,
            criteria=[mcdm.CriterionSpec("holdout", mcdm.Direction.MAXIMIZE),
                      mcdm.CriterionSpec("test", mcdm.Direction.MAXIMIZE)])
        front = sorted(mcdm.pareto_filter(matrix),
                       key=lambda i: (points[i][0], points[i][1]))
        with open(out / f"front_{ds_id}.csv", "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["holdout", "test"])
            for i in front:
                writer.writerow([repr(float(points[i][0])),
                                 repr(float(points[i][1]))])
        print(f"{ds_id}: {len(points)} points, front size {len(front)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mcselect",
        description="Model selection with single- and multi-criteria policies")
    parser.add_argument("--config", default=None, help="TOML config path")
    parser.add_argument("--seed", type=int, default=None, help="master seed")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker processes for training")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("split", help="write fold assignment and run schedule")
    sub.add_parser("train", help="train the candidate pool")
    p_select = sub.add_parser("select", help="run selection policies")
    p_select.add_argument("--policies", default=None)
    p_select.add_argument("--aggregations", default=None)
    p_compare = sub.add_parser("compare", help="statistical policy comparison")
    p_compare.add_argument("--alpha", type=float, default=None)
    p_sim = sub.add_parser("simulate", help="noisy-task selection-regret trials")
    p_sim.add_argument("--policies", default=None)
    sub.add_parser("report", help="emit scatter and Pareto-front plot data")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        if args.command == "split":
            return cmd_split(cfg)
        if args.command == "train":
            return cmd_train(cfg, jobs=args.jobs)
        if args.command == "select":
            return cmd_select(cfg)
        if args.command == "compare":
            return cmd_compare(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "report":
            return cmd_report(cfg)
        raise ConfigError(f"unknown command {args.command}")
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
