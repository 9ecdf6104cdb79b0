import { describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { clusterIndex, fetchAllCandidates, groupByCluster } from '../src/queue.js';
import { makeRow, makeState, mockFetch } from './mockServer.js';

describe('fetchAllCandidates', () => {
  it('walks every page and preserves server order', async () => {
    const rows = Array.from({ length: 47 }, (_, i) =>
      makeRow('S0', `T${String(i + 1).padStart(2, '0')}`, ['n1', 'n2']),
    );
    const state = makeState(rows);
    const api = new ApiClient('http://mock', mockFetch(state));
    const fetched = await fetchAllCandidates(api, { sourceId: 'S0' }, 20);
    expect(fetched).toHaveLength(47);
    const pages = state.requests.filter((r) => r.includes('/api/candidates'));
    expect(pages).toHaveLength(3); // 20 + 20 + 7
    const direct = await api.candidates({ sourceId: 'S0', limit: 100 });
    expect(fetched.map((r) => r.target_id)).toEqual(
      direct.items.map((r) => r.target_id),
    );
  });

  it('returns empty for an empty listing', async () => {
    const api = new ApiClient('http://mock', mockFetch(makeState([])));
    expect(await fetchAllCandidates(api)).toEqual([]);
  });
});

describe('groupByCluster', () => {
  it('sections partition the row list without reordering', () => {
    const rows = [
      makeRow('A', 'X', ['n1']),
      makeRow('B', 'Y', ['n1']),
      makeRow('A', 'Z', ['n1']),
      makeRow('C', 'W', ['n1']),
    ];
    const clusters = new Map<string, string | null>([
      ['A', 'core'],
      ['B', 'billing'],
      ['C', null],
    ]);
    const sections = groupByCluster(rows, clusters);
    expect(sections.map((s) => s.cluster)).toEqual(['core', 'billing', 'unclustered']);
    const flattened = sections.flatMap((s) => s.rows);
    expect(flattened).toHaveLength(rows.length);
    const union = new Set(flattened.map((r) => `${r.source_id}:${r.target_id}`));
    expect(union.size).toBe(rows.length);
    expect(sections[0].rows.map((r) => r.target_id)).toEqual(['X', 'Z']);
  });

  it('clusterIndex maps source summaries', () => {
    const index = clusterIndex([
      { id: 'A', kind: 'buc', title: null, candidates: 0, decided: 0, cluster: 'core' },
      { id: 'B', kind: 'buc', title: null, candidates: 0, decided: 0, cluster: null },
    ]);
    expect(index.get('A')).toBe('core');
    expect(index.get('B')).toBeNull();
  });
});
