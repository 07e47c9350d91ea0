"""HTTP interface for the explorer.

Holds per-session generation state: a session wraps one ingested dataset and
caches discretizations per bin count and forests per (bin count, forest
config, seed), so interactive parameter changes only pay for the stages they
invalidate. Response bodies are canonical JSON (sorted keys), so identical
requests with the same seed return byte-identical bodies; wall-clock timing
travels in the X-Elapsed-Seconds header instead.
"""

from __future__ import annotations

import json
import tempfile
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Response
from pydantic import BaseModel, Field

from . import analysis, serialize
from .extraction import Constraints, rule_text
from .forest import ForestConfig, train_forest
from .hierarchy import node_rule
from .pipeline import GenerateResult, generate
from .tabular import Dataset, DiscretizedDataset, IngestError, compute_binning, discretize, load_dataset


@dataclass
class ServiceSettings:
    data_dir: Path | None = None
    session_cap: int = 32
    time_budget: float = 60.0
    default_seed: int = 0
    max_upload_bytes: int = 32 * 1024 * 1024
    ui_dir: Path | None = None


@dataclass
class Session:
    session_id: str
    dataset: Dataset
    fingerprint: str
    created: float
    last_access: float
    disc_cache: dict[int, DiscretizedDataset] = field(default_factory=dict)
    forest_cache: dict[tuple, object] = field(default_factory=dict)
    result: GenerateResult | None = None
    body_cache: dict[str, str] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)


class CreateSessionRequest(BaseModel):
    data_path: str | None = None
    predictions_path: str | None = None
    data_content: str | None = None
    predictions_content: str | None = None
    label_column: str
    delimiter: str = ","


class ForestOverrides(BaseModel):
    n_trees: int = Field(default=100, ge=1)
    max_depth: int | None = Field(default=None, ge=1)
    min_samples_leaf: int = Field(default=1, ge=1)
    features_per_split: str | int = "sqrt"


class ConstraintsModel(BaseModel):
    min_fidelity: float = Field(default=0.85, gt=0.0, le=1.0)
    min_coverage: int = Field(default=5, ge=1)
    max_num_condition: int = Field(default=3, ge=1)
    num_bin: int = Field(default=3, ge=2)


class GenerateRequest(BaseModel):
    constraints: ConstraintsModel = ConstraintsModel()
    forest: ForestOverrides = ForestOverrides()
    seed: int | None = None


class OverlapRequest(BaseModel):
    anchor: int
    others: list[int]


def _json_response(text: str, status_code: int = 200, headers: dict | None = None) -> Response:
    return Response(content=text, status_code=status_code,
                    media_type="application/json", headers=headers or {})


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or ServiceSettings()
    app = FastAPI(title="rulespace", version="0.1.0")
    sessions: dict[str, Session] = {}
    store_lock = threading.Lock()

    def get_session(session_id: str) -> Session:
        with store_lock:
            session = sessions.get(session_id)
            if session is None:
                raise HTTPException(404, f"unknown session {session_id}")
            session.last_access = time.time()
            return session

    def require_result(session: Session) -> GenerateResult:
        if session.result is None:
            raise HTTPException(409, "no generation has been run for this session yet")
        return session.result

    def resolve_path(raw: str) -> Path:
        path = Path(raw)
        if settings.data_dir is not None:
            path = (settings.data_dir / path).resolve()
            if not path.is_relative_to(settings.data_dir):
                raise HTTPException(400, "path escapes the configured data directory")
        elif not path.is_absolute():
            path = path.resolve()
        if not path.is_file():
            raise HTTPException(400, f"no such file: {raw}")
        return path

    @app.get("/healthz")
    def healthz() -> dict:
        from . import kernels
        return {"status": "ok", "kernel": kernels.IMPL, "sessions": len(sessions)}

    @app.post("/sessions", status_code=201)
    def create_session(req: CreateSessionRequest) -> Response:
        tmp_files: list[Path] = []

        def materialize(content: str | None, path: str | None, tag: str) -> Path:
            if content is not None:
                if len(content.encode()) > settings.max_upload_bytes:
                    raise HTTPException(413, f"{tag} upload exceeds the size cap")
                tmp = Path(tempfile.mkstemp(suffix=f".{tag}.txt")[1])
                tmp.write_text(content)
                tmp_files.append(tmp)
                return tmp
            if path is None:
                raise HTTPException(400, f"provide either {tag}_path or {tag}_content")
            p = resolve_path(path)
            if p.stat().st_size > settings.max_upload_bytes:
                raise HTTPException(413, f"{tag} file exceeds the size cap")
            return p

        try:
            data_file = materialize(req.data_content, req.data_path, "data")
            preds_file = materialize(req.predictions_content, req.predictions_path, "predictions")
            try:
                dataset = load_dataset(data_file, req.label_column, preds_file,
                                       delimiter=req.delimiter)
            except IngestError as e:
                raise HTTPException(400, str(e))
        finally:
            for tmp in tmp_files:
                tmp.unlink(missing_ok=True)

        session = Session(
            session_id=uuid.uuid4().hex,
            dataset=dataset,
            fingerprint=serialize.dataset_fingerprint(dataset),
            created=time.time(),
            last_access=time.time(),
        )
        with store_lock:
            while len(sessions) >= settings.session_cap:
                oldest = min(sessions.values(), key=lambda s: s.last_access)
                del sessions[oldest.session_id]
            sessions[session.session_id] = session
        body = {
            "session_id": session.session_id,
            "fingerprint": session.fingerprint,
            "n_instances": dataset.n,
            "n_features": dataset.d,
            "class_names": dataset.class_names,
            "features": [f.name for f in dataset.features],
        }
        return _json_response(json.dumps(body, sort_keys=True), status_code=201)

    @app.post("/sessions/{session_id}/generate")
    def generate_rules(session_id: str, req: GenerateRequest) -> Response:
        session = get_session(session_id)
        if not session.lock.acquire(blocking=False):
            raise HTTPException(409, "a generate request is already running for this session")
        try:
            constraints = Constraints(**req.constraints.model_dump())
            seed = settings.default_seed if req.seed is None else req.seed
            config = ForestConfig(rng_seed=seed, **req.forest.model_dump())
            try:
                constraints.validate()
                config.validate()
            except ValueError as e:
                raise HTTPException(422, str(e))

            started = time.perf_counter()
            deadline = started + settings.time_budget
            disc = session.disc_cache.get(constraints.num_bin)
            if disc is None:
                disc = discretize(session.dataset, compute_binning(session.dataset, constraints.num_bin))
                session.disc_cache[constraints.num_bin] = disc
            forest_key = (constraints.num_bin, config.n_trees, config.max_depth,
                          config.min_samples_leaf, config.features_per_split, config.rng_seed)
            forest = session.forest_cache.get(forest_key)
            try:
                if forest is None:
                    forest = train_forest(disc, config, deadline=deadline)
                    session.forest_cache[forest_key] = forest
                result = generate(session.dataset, constraints, config,
                                  data=disc, forest=forest, deadline=deadline)
            except TimeoutError as e:
                raise HTTPException(503, f"{e} (budget {settings.time_budget}s)")
            elapsed = time.perf_counter() - started

            session.result = result
            session.body_cache = {"generate": serialize.dumps(serialize.generate_document(result))}
            return _json_response(session.body_cache["generate"],
                                  headers={"X-Elapsed-Seconds": f"{elapsed:.6f}",
                                           "X-Dataset-Fingerprint": session.fingerprint})
        finally:
            session.lock.release()

    @app.get("/sessions/{session_id}/rules")
    def list_rules(session_id: str, filter: str | None = None) -> Response:
        session = get_session(session_id)
        result = require_result(session)
        spec = _parse_filter(filter, result.data)
        ids = analysis.filter_rules(result.minimal, spec)
        body = {
            "fingerprint": session.fingerprint,
            "seed": result.seed,
            "rule_ids": ids,
            "rules": [serialize.rule_payload(*result.minimal.rules[i], result.data, rule_id=i)
                      for i in ids],
        }
        return _json_response(serialize.dumps(serialize.document("rule-list", body)))

    @app.get("/sessions/{session_id}/hierarchy")
    def hierarchy(session_id: str) -> Response:
        session = get_session(session_id)
        result = require_result(session)
        payload = serialize.hierarchy_payload(result.hierarchy, result.data)
        payload["fingerprint"] = session.fingerprint
        payload["seed"] = result.seed
        payload["class_names"] = list(result.data.base.class_names)
        return _json_response(serialize.dumps(serialize.document("hierarchy", payload)))

    @app.get("/sessions/{session_id}/nodes/{node_id}")
    def node_detail(session_id: str, node_id: int) -> Response:
        session = get_session(session_id)
        result = require_result(session)
        tree = result.hierarchy
        if not 0 <= node_id < len(tree.nodes):
            raise HTTPException(404, f"no hierarchy node {node_id}")
        node = tree.nodes[node_id]
        rule = node_rule(tree, node_id)
        if rule.is_trivial:
            text = (f"all instances ({node.stats.cover_count} of {result.data.n}); "
                    f"majority prediction {result.data.base.class_names[rule.consequent]}")
        else:
            text = rule_text(rule, result.data)
        payload = {
            "fingerprint": session.fingerprint,
            "seed": result.seed,
            "node": serialize.hierarchy_payload(tree, result.data)["nodes"][node_id],
            "rule_id": node.rule_id,
            "text": text,
            "conditions": [serialize.condition_payload(c, result.data) for c in rule.conditions],
            "consequent": rule.consequent,
            "consequent_name": result.data.base.class_names[rule.consequent],
            "stats": {
                "cover_count": node.stats.cover_count,
                "per_class_count": node.stats.per_class_count,
                "per_class_error_count": node.stats.per_class_error_count,
                "per_true_class_count": node.stats.per_true_class_count,
            },
        }
        return _json_response(serialize.dumps(serialize.document("node-detail", payload)))

    @app.post("/sessions/{session_id}/overlap")
    def rule_overlap(session_id: str, req: OverlapRequest) -> Response:
        session = get_session(session_id)
        result = require_result(session)
        try:
            report = analysis.overlap(result.minimal, req.anchor, req.others, result.data)
        except KeyError as e:
            raise HTTPException(404, str(e.args[0]))
        payload = {
            "fingerprint": session.fingerprint,
            "seed": result.seed,
            "anchor": report.anchor,
            "counts": {str(k): v for k, v in report.counts.items()},
        }
        return _json_response(serialize.dumps(serialize.document("overlap", payload)))

    if settings.ui_dir is not None and settings.ui_dir.is_dir():
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=settings.ui_dir, html=True), name="ui")

    return app


def _parse_filter(raw: str | None, data: DiscretizedDataset) -> analysis.FilterSpec:
    """Decode the `filter` query parameter (JSON). Features may be named or
    indexed; predictions may be class names or ids."""
    if not raw:
        return analysis.FilterSpec()
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as e:
        raise HTTPException(400, f"filter is not valid JSON: {e}")
    base = data.base

    def feat(x) -> int:
        if isinstance(x, str):
            try:
                return base.feature_index(x)
            except KeyError:
                raise HTTPException(400, f"unknown feature {x!r}")
        if not 0 <= int(x) < base.d:
            raise HTTPException(400, f"feature index {x} out of range")
        return int(x)

    def cls(x) -> int:
        if isinstance(x, str) and x in base.class_names:
            return base.class_names.index(x)
        try:
            idx = int(x)
        except (TypeError, ValueError):
            raise HTTPException(400, f"unknown class {x!r}")
        if not 0 <= idx < base.k:
            raise HTTPException(400, f"class id {idx} out of range")
        return idx

    try:
        return analysis.FilterSpec.make(
            required_features=[feat(x) for x in obj.get("required_features", [])],
            feature_values={feat(f): [int(b) for b in bins]
                            for f, bins in obj.get("feature_values", {}).items()},
            predictions=[cls(x) for x in obj.get("predictions", [])],
        )
    except (AttributeError, TypeError, ValueError) as e:
        raise HTTPException(400, f"malformed filter: {e}")
