/** Thin client over the generation service's JSON API. */

import type {
  FilterSpecJson, GeneratePayload, OverlapPayload, RuleJson, SessionInfo,
} from "./types.js";

interface Envelope<T> {
  format: string;
  version: number;
  kind: string;
  payload: T;
}

async function unwrap<T>(resp: Response): Promise<T> {
  if (!resp.ok) {
    let detail = resp.statusText;
    try {
      const body = await resp.json();
      if (body.detail) detail = String(body.detail);
    } catch {
      /* non-JSON error body */
    }
    throw new Error(`${resp.status}: ${detail}`);
  }
  const body = (await resp.json()) as Envelope<T> | T;
  return (body as Envelope<T>).payload !== undefined
    ? (body as Envelope<T>).payload
    : (body as T);
}

export class ApiClient {
  constructor(private base: string = "") {}

  async createSession(req: {
    data_path?: string;
    data_content?: string;
    predictions_path?: string;
    predictions_content?: string;
    label_column: string;
    delimiter?: string;
  }): Promise<SessionInfo> {
    const resp = await fetch(`${this.base}/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(req),
    });
    if (!resp.ok) {
      const body = await resp.json().catch(() => ({}));
      throw new Error(`${resp.status}: ${body.detail ?? resp.statusText}`);
    }
    return (await resp.json()) as SessionInfo;
  }

  async generate(
    sessionId: string,
    constraints: { min_fidelity: number; min_coverage: number; max_num_condition: number; num_bin: number },
    seed?: number,
    nTrees?: number,
  ): Promise<{ payload: GeneratePayload; elapsedSeconds: number | null }> {
    const body: Record<string, unknown> = { constraints };
    if (seed !== undefined) body.seed = seed;
    if (nTrees !== undefined) body.forest = { n_trees: nTrees };
    const resp = await fetch(`${this.base}/sessions/${sessionId}/generate`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
    const elapsed = resp.headers.get("X-Elapsed-Seconds");
    const payload = await unwrap<GeneratePayload>(resp);
    return { payload, elapsedSeconds: elapsed === null ? null : Number(elapsed) };
  }

  async rules(sessionId: string, filter?: FilterSpecJson):
      Promise<{ rule_ids: number[]; rules: RuleJson[] }> {
    const url = new URL(`${this.base}/sessions/${sessionId}/rules`, window.location.origin);
    if (filter && Object.keys(filter).length > 0) {
      url.searchParams.set("filter", JSON.stringify(filter));
    }
    return unwrap(await fetch(url));
  }

  async nodeDetail(sessionId: string, nodeId: number): Promise<{
    text: string;
    rule_id: number | null;
    consequent_name: string;
    stats: { cover_count: number; per_class_count: number[]; per_class_error_count: number[] };
  }> {
    return unwrap(await fetch(`${this.base}/sessions/${sessionId}/nodes/${nodeId}`));
  }

  async overlap(sessionId: string, anchor: number, others: number[]): Promise<OverlapPayload> {
    const resp = await fetch(`${this.base}/sessions/${sessionId}/overlap`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ anchor, others }),
    });
    return unwrap(resp);
  }
}
