/**
 * Review queue assembly: pages the candidate listing exhaustively, keeping
 * the server's deterministic order, and can partition rows into sections by
 * an artifact metadata cluster for reviewers who work cluster-by-cluster.
 */

import type { ApiClient, CandidateQuery } from './api.js';
import type { CandidateRow, SourceSummary } from './types.js';

export const PAGE_SIZE = 20;

export interface QueueSection {
  cluster: string;
  rows: CandidateRow[];
}

/** Fetch every page for a query; row order mirrors the API sort exactly. */
export async function fetchAllCandidates(
  api: ApiClient,
  query: Omit<CandidateQuery, 'offset' | 'limit'> = {},
  pageSize = PAGE_SIZE,
): Promise<CandidateRow[]> {
  const rows: CandidateRow[] = [];
  let offset = 0;
  for (;;) {
    const page = await api.candidates({ ...query, offset, limit: pageSize });
    rows.push(...page.items);
    offset += page.items.length;
    if (offset >= page.total || page.items.length === 0) {
      return rows;
    }
  }
}

/**
 * Group rows into sections by the cluster of their source artifact.
 * Sections appear in first-seen order; rows keep their in-section order, so
 * the concatenation of all sections is a permutation-free re-slicing of the
 * input.
 */
export function groupByCluster(
  rows: CandidateRow[],
  clusterOf: Map<string, string | null>,
): QueueSection[] {
  const sections = new Map<string, CandidateRow[]>();
  for (const row of rows) {
    const cluster =
      clusterOf.get(row.source_id) ?? clusterOf.get(row.target_id) ?? 'unclustered';
    const key = cluster ?? 'unclustered';
    if (!sections.has(key)) {
      sections.set(key, []);
    }
    sections.get(key)!.push(row);
  }
  return [...sections.entries()].map(([cluster, sectionRows]) => ({
    cluster,
    rows: sectionRows,
  }));
}

export function clusterIndex(sources: SourceSummary[]): Map<string, string | null> {
  return new Map(sources.map((s) => [s.id, s.cluster]));
}
