/** Thin typed client over the hxai HTTP service. All state lives server
 * side; this client never derives metric values. */

import type {
  Artifact,
  CausalSpec,
  HypothesisResult,
  Question,
  QuestionAccepted,
  QuestionStatus,
  Report,
  SessionInfo,
  StakeholderRole,
  TreatmentDef,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
    private readonly authToken?: string,
  ) {}

  private headers(): Record<string, string> {
    const out: Record<string, string> = { 'Content-Type': 'application/json' };
    if (this.authToken) out['Authorization'] = `Bearer ${this.authToken}`;
    return out;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: this.headers(),
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const text = await resp.text();
    let parsed: unknown = null;
    try {
      parsed = text ? JSON.parse(text) : null;
    } catch {
      throw new ApiError(resp.status, 'bad_json', `non-JSON response from ${path}`);
    }
    if (!resp.ok) {
      const err = parsed as { error?: string; message?: string } | null;
      throw new ApiError(resp.status, err?.error ?? 'http_error', err?.message ?? text);
    }
    return parsed as T;
  }

  health(): Promise<{ status: string }> {
    return this.request('GET', '/health');
  }

  registerDataset(body: Record<string, unknown>): Promise<{ id: string }> {
    return this.request('POST', '/datasets', body);
  }

  registerModel(body: Record<string, unknown>): Promise<{ name: string; task: string }> {
    return this.request('POST', '/models', body);
  }

  createSession(body: {
    id?: string;
    dataset: string;
    models: string[];
    seed?: number;
    stakeholder_role?: StakeholderRole;
    causal_spec?: CausalSpec;
    baselines?: Record<string, unknown>;
    forecast?: Record<string, unknown>;
  }): Promise<SessionInfo> {
    return this.request('POST', '/sessions', body);
  }

  postQuestion(sessionId: string, question: Question): Promise<QuestionAccepted> {
    return this.request('POST', `/sessions/${sessionId}/questions`, question);
  }

  questionStatus(sessionId: string, questionId: string): Promise<QuestionStatus> {
    return this.request('GET', `/sessions/${sessionId}/questions/${questionId}`);
  }

  artifact(sessionId: string, index: number): Promise<Artifact> {
    return this.request('GET', `/sessions/${sessionId}/artifacts/${index}`);
  }

  postHypothesis(
    sessionId: string,
    body: {
      model?: string;
      treatment_def: TreatmentDef;
      expected_direction?: string;
      adjust?: string;
    },
  ): Promise<HypothesisResult> {
    return this.request('POST', `/sessions/${sessionId}/hypotheses`, body);
  }

  report(sessionId: string): Promise<Report> {
    return this.request('GET', `/sessions/${sessionId}/report`);
  }
}
