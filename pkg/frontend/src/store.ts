/**
 * Review session state: the loaded rows, the cursor, progress counters, and
 * the optimistic accept/reject flow.
 *
 * A decision is applied to the row immediately, then reconciled with the
 * server: on success the optimistic status stands (the server echoes it); on
 * `conflict` the queue statuses are refetched (another tab may have decided
 * the same pair); on any other failure the row reverts and the error message
 * is surfaced for a toast.
 */

import { ApiClient, ApiRequestError } from './api.js';
import { fetchAllCandidates } from './queue.js';
import type {
  CandidateRow,
  CandidateStatus,
  SessionProgress,
  Verdict,
} from './types.js';
import { pairKey } from './types.js';

export interface DecideOutcome {
  ok: boolean;
  status: CandidateStatus;
  logLength?: number;
  error?: string;
}

export class ReviewStore {
  readonly api: ApiClient;
  rows: CandidateRow[] = [];
  cursor = 0;
  sourceFilter: string | undefined;
  statusFilter: string | undefined;
  lastError: string | null = null;
  private readonly startedAt: number;
  private readonly now: () => number;

  constructor(api: ApiClient, now: () => number = Date.now) {
    this.api = api;
    this.now = now;
    this.startedAt = now();
  }

  async load(): Promise<void> {
    this.rows = await fetchAllCandidates(this.api, {
      sourceId: this.sourceFilter,
      status: this.statusFilter,
    });
    if (this.cursor >= this.rows.length) {
      this.cursor = Math.max(0, this.rows.length - 1);
    }
  }

  /** Re-pull statuses from the server without disturbing the cursor. */
  async refetchStatuses(): Promise<void> {
    const fresh = await fetchAllCandidates(this.api, {
      sourceId: this.sourceFilter,
    });
    const statusByPair = new Map<string, CandidateStatus>(
      fresh.map((row) => [pairKey(row.source_id, row.target_id), row.status]),
    );
    for (const row of this.rows) {
      const status = statusByPair.get(pairKey(row.source_id, row.target_id));
      if (status !== undefined) {
        row.status = status;
      }
    }
  }

  current(): CandidateRow | undefined {
    return this.rows[this.cursor];
  }

  moveCursor(delta: number): void {
    if (this.rows.length === 0) {
      this.cursor = 0;
      return;
    }
    this.cursor = Math.min(this.rows.length - 1, Math.max(0, this.cursor + delta));
  }

  async decide(row: CandidateRow, verdict: Verdict, note?: string): Promise<DecideOutcome> {
    const previous = row.status;
    row.status = verdict; // optimistic
    this.lastError = null;
    try {
      const result = await this.api.decide(
        row.source_id,
        row.target_id,
        verdict,
        note,
      );
      row.status = result.status;
      return { ok: true, status: result.status, logLength: result.log_length };
    } catch (err) {
      if (err instanceof ApiRequestError && err.code === 'conflict') {
        await this.refetchStatuses();
        return { ok: false, status: row.status, error: err.message };
      }
      row.status = previous; // rollback
      const message = err instanceof Error ? err.message : String(err);
      this.lastError = message;
      return { ok: false, status: previous, error: message };
    }
  }

  async decideCurrent(verdict: Verdict, note?: string): Promise<DecideOutcome | undefined> {
    const row = this.current();
    if (!row) {
      return undefined;
    }
    const outcome = await this.decide(row, verdict, note);
    if (outcome.ok) {
      this.moveCursor(1);
    }
    return outcome;
  }

  progress(sourcesTotal: number): SessionProgress {
    const decided = this.rows.filter((r) => r.status !== 'candidate').length;
    const decidedSources = new Set<string>();
    const openSources = new Set<string>();
    for (const row of this.rows) {
      if (row.status === 'candidate') {
        openSources.add(row.source_id);
      } else {
        decidedSources.add(row.source_id);
      }
    }
    const vetted = [...decidedSources].filter((s) => !openSources.has(s)).length;
    return {
      sourcesTotal,
      sourcesVetted: vetted,
      candidatesTotal: this.rows.length,
      candidatesDecided: decided,
      startedAt: this.startedAt,
      elapsedMs: this.now() - this.startedAt,
    };
  }
}
