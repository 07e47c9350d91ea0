"""Regenerates the frontend test fixtures from the primary package.

Run from the repo root (the primary package must be installed):

    python3 frontend/test/fixtures/make_fixtures.py

Products, all through the public document/HTTP formats:
  hierarchies.json — 50 random annotated hierarchy exports (layout tests)
  filters.json     — one generate payload plus 20 filter specs with the
                     service's authoritative rule-id responses (view tests)
"""

import json
import random
from pathlib import Path

import numpy as np

import rulespace as rs
from rulespace import serialize
from rulespace.labeler import demo_labels
from rulespace.pipeline import generate

HERE = Path(__file__).parent
ROOT = Path(__file__).resolve().parents[3]
FIXTURES = ROOT / "tests" / "fixtures"

DIABETES_EXPR = "Glucose >= 134 or BMI >= 36"


def random_dataset(seed: int) -> rs.Dataset:
    r = np.random.default_rng(seed)
    n = int(r.integers(80, 500))
    d = int(r.integers(2, 8))
    k = int(r.choice([2, 2, 3]))
    rows = np.round(r.normal(0, 10, size=(n, d)), 2)
    feats = [rs.FeatureMeta(f"f{j}", "numeric", j) for j in range(d)]
    z = np.zeros(n, dtype=np.int64)
    ds = rs.Dataset(feats, rows, z, z.copy(), [str(c) for c in range(k)])
    expr = f"f0 >= {float(np.quantile(rows[:, 0], 0.55))!r}"
    labels = demo_labels(ds, expr, noise=float(r.uniform(0, 0.15)), seed=seed)
    if k == 3:
        labels = labels + demo_labels(
            ds, f"f1 >= {float(np.quantile(rows[:, 1], 0.5))!r}", noise=0.1, seed=seed + 1)
    ds.predictions = labels.astype(np.int64)
    ds.true_labels = (rows[:, 0] > 0).astype(np.int64) if k == 2 else labels.copy()
    return ds


def make_hierarchies() -> None:
    exports = []
    seed = 0
    while len(exports) < 50:
        seed += 1
        ds = random_dataset(seed)
        r = np.random.default_rng(seed)
        constraints = rs.Constraints(
            min_fidelity=float(r.uniform(0.7, 0.9)),
            min_coverage=int(r.integers(3, 15)),
            max_num_condition=int(r.integers(1, 5)),
            num_bin=int(r.integers(2, 5)),
        )
        result = generate(ds, constraints, rs.ForestConfig(n_trees=8, rng_seed=seed))
        if result.number_of_rules == 0:
            continue
        payload = serialize.hierarchy_payload(result.hierarchy, result.data)
        payload["class_names"] = list(ds.class_names)
        exports.append(payload)
    (HERE / "hierarchies.json").write_text(json.dumps(exports))
    print(f"wrote hierarchies.json ({len(exports)} exports)")


def make_filters() -> None:
    from fastapi.testclient import TestClient

    from rulespace.service import ServiceSettings, create_app

    ds_path = FIXTURES / "diabetes_surrogate.csv"
    ds = rs.load_dataset(ds_path, "Outcome", _label_copy(ds_path))
    preds = demo_labels(ds, DIABETES_EXPR, noise=0.15, seed=7)
    app = create_app(ServiceSettings(data_dir=FIXTURES.resolve()))
    with TestClient(app) as client:
        sid = client.post("/sessions", json={
            "data_path": "diabetes_surrogate.csv",
            "predictions_content": "\n".join(str(int(v)) for v in preds) + "\n",
            "label_column": "Outcome",
        }).json()["session_id"]
        # min_fidelity 0.88 forces a rich minimal set (20+ rules over all
        # seven features) so the filter cases discriminate
        gen = client.post(f"/sessions/{sid}/generate", json={
            "constraints": {"min_fidelity": 0.88, "min_coverage": 5,
                            "max_num_condition": 3, "num_bin": 3},
            "forest": {"n_trees": 60}, "seed": 0,
        }).json()["payload"]

        feature_names = [f["name"] for f in gen["features"]]
        rnd = random.Random(17)
        cases = []
        for _ in range(20):
            spec = {}
            if rnd.random() < 0.6:
                spec["required_features"] = sorted(
                    rnd.sample(feature_names, rnd.randint(1, 2)))
            if rnd.random() < 0.6:
                spec["feature_values"] = {
                    rnd.choice(feature_names): sorted(
                        rnd.sample(range(3), rnd.randint(1, 2)))}
            if rnd.random() < 0.6:
                spec["predictions"] = [rnd.choice(gen["class_names"])]
            resp = client.get(f"/sessions/{sid}/rules",
                              params={"filter": json.dumps(spec)})
            cases.append({"spec": spec, "rule_ids": resp.json()["payload"]["rule_ids"]})
        (HERE / "filters.json").write_text(json.dumps({"generated": gen, "cases": cases}))
        print(f"wrote filters.json ({len(cases)} filter cases, "
              f"{gen['rule_set']['number_of_rules']} rules)")


def _label_copy(csv_path: Path) -> str:
    import csv as _csv
    import tempfile
    with open(csv_path, newline="") as fh:
        reader = _csv.DictReader(fh)
        values = [row["Outcome"] for row in reader]
    tmp = tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False)
    tmp.write("\n".join(values) + "\n")
    tmp.close()
    return tmp.name


if __name__ == "__main__":
    make_hierarchies()
    make_filters()
