/**
 * End-to-end round trip against the real backend: builds a fixture
 * workspace, serves it with the Python service, and drives the same client
 * stack the browser runs (ApiClient + ReviewStore + pagination).
 *
 * Covers: accept-3/reject-2 producing a 5-entry server decision log and an
 * export of exactly the accepted pairs; last-write-wins across two "tabs"
 * after refetch; 47-row pagination whose matched-label sets byte-match the
 * raw API payload.
 */

import { execFile, spawn, type ChildProcess } from 'node:child_process';
import { promisify } from 'node:util';
import { mkdtempSync, readFileSync } from 'node:fs';
import { tmpdir } from 'node:os';
import { join } from 'node:path';
import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { ApiClient } from '../src/api.js';
import { fetchAllCandidates } from '../src/queue.js';
import { ReviewStore } from '../src/store.js';

const run = promisify(execFile);
const PORT = 8793;
const BASE = `http://127.0.0.1:${PORT}`;
const REPO_ROOT = join(__dirname, '..', '..');

let serverProcess: ChildProcess | undefined;
let workspace: string;

async function waitForServer(timeoutMs = 30_000): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  for (;;) {
    try {
      const response = await fetch(`${BASE}/api/sources`);
      if (response.ok) return;
    } catch {
      // not up yet
    }
    if (Date.now() > deadline) {
      throw new Error('backend did not come up in time');
    }
    await new Promise((resolve) => setTimeout(resolve, 250));
  }
}

beforeAll(async () => {
  workspace = mkdtempSync(join(tmpdir(), 'ttl-ui-fixture-'));
  await run('python3', [join(__dirname, '..', 'scripts', 'make_fixture.py'), workspace], {
    cwd: REPO_ROOT,
  });
  serverProcess = spawn(
    'python3',
    ['-m', 'ttl.cli', 'serve', '--project', workspace, '--port', String(PORT)],
    { cwd: REPO_ROOT, stdio: 'ignore' },
  );
  await waitForServer();
}, 60_000);

afterAll(() => {
  serverProcess?.kill('SIGTERM');
});

function decisionLogLength(): number {
  const text = readFileSync(join(workspace, 'decisions.log'), 'utf-8');
  return text.split('\n').filter((line) => line.trim().length > 0).length;
}

describe('view fidelity (47-candidate source)', () => {
  it('paginates to exactly 47 rows that byte-match the API payload', async () => {
    const api = new ApiClient(BASE);
    const rows = await fetchAllCandidates(api, { sourceId: 'S0' }, 20);
    expect(rows).toHaveLength(47);

    // Raw payload, fetched outside the client stack, compared byte-for-byte.
    const rawItems: unknown[] = [];
    for (const offset of [0, 20, 40]) {
      const response = await fetch(
        `${BASE}/api/candidates?source_id=S0&offset=${offset}&limit=20`,
      );
      const body = await response.json();
      expect(body.total).toBe(47);
      rawItems.push(...body.items);
    }
    expect(rawItems).toHaveLength(47);
    for (let i = 0; i < 47; i++) {
      const viewLabels = JSON.stringify(rows[i].matched_labels);
      const rawLabels = JSON.stringify((rawItems[i] as any).matched_labels);
      expect(viewLabels).toBe(rawLabels);
    }
  });

  it('taxonomy context breadcrumbs come from the API', async () => {
    const api = new ApiClient(BASE);
    const context = await api.node('n05');
    expect(context.breadcrumb.map((b) => b.node_id)).toEqual(['root', 'n05']);
    expect(context.synonyms).toEqual(['c5']);
    await expect(api.node('missing')).rejects.toMatchObject({ code: 'not_found' });
  });
});

describe('round trip: vetting through the UI stack', () => {
  it('accept 3 + reject 2 -> log length 5 and export of the 3 accepted pairs', async () => {
    const store = new ReviewStore(new ApiClient(BASE));
    store.sourceFilter = 'S0';
    await store.load();
    expect(store.rows.length).toBe(47);

    const targets = store.rows.slice(0, 5);
    for (const [i, row] of targets.entries()) {
      const outcome = await store.decide(row, i < 3 ? 'accepted' : 'rejected');
      expect(outcome.ok).toBe(true);
    }
    expect(decisionLogLength()).toBe(5);

    await run(
      'python3',
      ['-c',
       'import sys; from ttl.project import load_project, export_accepted; ' +
       'export_accepted(load_project(sys.argv[1]))',
       workspace],
      { cwd: REPO_ROOT },
    );
    const exported = readFileSync(join(workspace, 'exports', 'accepted.csv'), 'utf-8')
      .trim()
      .split('\n')
      .slice(1)
      .map((line) => line.split(',').slice(0, 2).join(','));
    const acceptedPairs = targets
      .slice(0, 3)
      .map((row) => `${row.source_id},${row.target_id}`)
      .sort();
    expect(exported.sort()).toEqual(acceptedPairs);
  });

  it('conflicting second-tab decision resolves to last-write-wins after refetch', async () => {
    const tabA = new ReviewStore(new ApiClient(BASE));
    const tabB = new ReviewStore(new ApiClient(BASE));
    tabA.sourceFilter = 'S0';
    tabB.sourceFilter = 'S0';
    await tabA.load();
    await tabB.load();

    const pick = tabA.rows.findIndex((r) => r.status === 'candidate');
    const pairOfA = tabA.rows[pick];
    const pairOfB = tabB.rows.find(
      (r) => r.source_id === pairOfA.source_id && r.target_id === pairOfA.target_id,
    )!;

    await tabA.decide(pairOfA, 'accepted');
    await tabB.decide(pairOfB, 'rejected');
    expect(pairOfA.status).toBe('accepted'); // tab A has not refetched yet

    await tabA.refetchStatuses();
    expect(pairOfA.status).toBe('rejected'); // server truth wins
    expect(decisionLogLength()).toBe(7);
  });
});
