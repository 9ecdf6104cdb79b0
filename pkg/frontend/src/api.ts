/**
 * Typed client for the vetting service HTTP API.
 *
 * All requests go through one fetch wrapper that surfaces the server's error
 * envelope ({code, message, detail}) as ApiRequestError, so callers can react
 * to `conflict` (refetch) differently from `not_found` or transport failures.
 */

import type {
  CandidateRow,
  DecisionResult,
  NodeContext,
  Page,
  SourceSummary,
  Verdict,
} from './types.js';

export class ApiRequestError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.code = code;
    this.status = status;
  }
}

export interface CandidateQuery {
  sourceId?: string;
  status?: string;
  offset?: number;
  limit?: number;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

let idempotencyCounter = 0;

export function nextIdempotencyKey(): string {
  idempotencyCounter += 1;
  const rand = Math.random().toString(36).slice(2, 10);
  return `ui-${Date.now()}-${idempotencyCounter}-${rand}`;
}

export class ApiClient {
  private readonly base: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl = '', fetchImpl?: FetchLike) {
    this.base = baseUrl.replace(/\/$/, '');
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let response: Response;
    try {
      response = await this.fetchImpl(this.base + path, init);
    } catch (err) {
      throw new ApiRequestError('unreachable', String(err), 0);
    }
    if (!response.ok) {
      let code = 'internal';
      let message = `HTTP ${response.status}`;
      try {
        const body = await response.json();
        code = body.code ?? code;
        message = body.message ?? message;
      } catch {
        // non-JSON error body; keep the status line
      }
      throw new ApiRequestError(code, message, response.status);
    }
    return (await response.json()) as T;
  }

  sources(offset = 0, limit = 50): Promise<Page<SourceSummary>> {
    return this.request(`/api/sources?offset=${offset}&limit=${limit}`);
  }

  candidates(query: CandidateQuery = {}): Promise<Page<CandidateRow>> {
    const params = new URLSearchParams();
    if (query.sourceId !== undefined) params.set('source_id', query.sourceId);
    if (query.status !== undefined) params.set('status', query.status);
    params.set('offset', String(query.offset ?? 0));
    params.set('limit', String(query.limit ?? 50));
    return this.request(`/api/candidates?${params.toString()}`);
  }

  node(nodeId: string): Promise<NodeContext> {
    return this.request(`/api/taxonomy/node/${encodeURIComponent(nodeId)}`);
  }

  decide(
    sourceId: string,
    targetId: string,
    verdict: Verdict,
    note?: string,
    actor = 'reviewer',
    idempotencyKey?: string,
  ): Promise<DecisionResult> {
    return this.request('/api/decisions', {
      method: 'POST',
      headers: {
        'Content-Type': 'application/json',
        'Idempotency-Key': idempotencyKey ?? nextIdempotencyKey(),
      },
      body: JSON.stringify({
        source_id: sourceId,
        target_id: targetId,
        verdict,
        actor,
        note: note ?? null,
      }),
    });
  }
}
