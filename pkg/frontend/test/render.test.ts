import { describe, expect, it } from 'vitest';

import { keyAction } from '../src/keyboard.js';
import {
  escapeHtml,
  renderContext,
  renderProgress,
  renderQueue,
  renderRow,
} from '../src/render.js';
import { makeRow } from './mockServer.js';

describe('renderRow', () => {
  it('shows exactly the API matched labels, no re-derivation', () => {
    const row = makeRow('S0', 'T01', ['n1', 'n2', 'n3']);
    const html = renderRow(row, false);
    for (const label of row.matched_labels) {
      expect(html).toContain(`data-node="${label.node_id}"`);
      expect(html).toContain(`title ${label.node_id}`);
      expect(html).toContain(label.source_score.toFixed(6));
      expect(html).toContain(label.target_score.toFixed(6));
    }
    expect(html).toContain('<td class="count">3</td>');
  });

  it('escapes artifact text', () => {
    const row = makeRow('S<script>', 'T01', ['n1']);
    row.source.excerpt = '<img src=x onerror=alert(1)>';
    const html = renderRow(row, false);
    expect(html).not.toContain('<img');
    expect(html).toContain('&lt;img');
  });

  it('marks the selected row', () => {
    const rows = [makeRow('S0', 'T01', ['n1']), makeRow('S0', 'T02', ['n1'])];
    const html = renderQueue(rows, 1);
    const selectedCount = html.split('class="row').length - 1;
    expect(selectedCount).toBe(2);
    expect(html.match(/selected/g)?.length).toBe(1);
  });
});

describe('renderContext', () => {
  it('renders an ancestor breadcrumb plus description and synonyms', () => {
    const html = renderContext({
      node_id: 'n3',
      title: 'online charging',
      description: 'realtime credit control',
      synonyms: ['OCS'],
      breadcrumb: [
        { node_id: 'root', title: 'charging' },
        { node_id: 'n3', title: 'online charging' },
      ],
    });
    expect(html).toContain('charging <span class="sep">›</span> online charging');
    expect(html).toContain('realtime credit control');
    expect(html).toContain('OCS');
  });

  it('breadcrumb of length one for a root label', () => {
    const html = renderContext({
      node_id: 'root',
      title: 'charging',
      description: null,
      synonyms: [],
      breadcrumb: [{ node_id: 'root', title: 'charging' }],
    });
    expect(html).toContain('charging');
    expect(html).not.toContain('sep');
  });
});

describe('renderProgress', () => {
  it('formats counts and elapsed time', () => {
    const html = renderProgress({
      sourcesTotal: 4,
      sourcesVetted: 1,
      candidatesTotal: 47,
      candidatesDecided: 5,
      startedAt: 0,
      elapsedMs: 95_000,
    });
    expect(html).toContain('1/4 sources');
    expect(html).toContain('5/47 candidates decided');
    expect(html).toContain('1m 35s');
  });
});

describe('keyboard map', () => {
  it('covers the full accept/reject loop without a pointer', () => {
    expect(keyAction({ key: 'j' })).toBe('next');
    expect(keyAction({ key: 'ArrowDown' })).toBe('next');
    expect(keyAction({ key: 'k' })).toBe('prev');
    expect(keyAction({ key: 'a' })).toBe('accept');
    expect(keyAction({ key: 'r' })).toBe('reject');
    expect(keyAction({ key: 'Enter' })).toBe('context');
    expect(keyAction({ key: 'g' })).toBe('refresh');
  });

  it('ignores chords and unmapped keys', () => {
    expect(keyAction({ key: 'a', ctrlKey: true })).toBeNull();
    expect(keyAction({ key: 'q' })).toBeNull();
  });
});

describe('escapeHtml', () => {
  it('escapes the five specials', () => {
    expect(escapeHtml(`<>&"'`)).toBe('&lt;&gt;&amp;&quot;&#39;');
  });
});
