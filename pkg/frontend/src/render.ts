/**
 * Pure HTML-string renderers for the workbench; no DOM access here, so the
 * full view layer is testable in Node. main.ts mounts the strings and wires
 * events.
 */

import type {
  CandidateRow,
  NodeContext,
  SessionProgress,
  SourceSummary,
} from './types.js';
import { KEY_HELP } from './keyboard.js';

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, '&amp;')
    .replace(/</g, '&lt;')
    .replace(/>/g, '&gt;')
    .replace(/"/g, '&quot;')
    .replace(/'/g, '&#39;');
}

export function renderProgress(progress: SessionProgress): string {
  const minutes = Math.floor(progress.elapsedMs / 60000);
  const seconds = Math.floor((progress.elapsedMs % 60000) / 1000);
  return (
    `<span class="progress-sources">${progress.sourcesVetted}/${progress.sourcesTotal} sources</span>` +
    ` · <span class="progress-candidates">${progress.candidatesDecided}/${progress.candidatesTotal} candidates decided</span>` +
    ` · <span class="progress-elapsed">${minutes}m ${String(seconds).padStart(2, '0')}s</span>`
  );
}

export function renderSourceOption(source: SourceSummary, selected: boolean): string {
  const label = source.title ? `${source.id} — ${source.title}` : source.id;
  return `<option value="${escapeHtml(source.id)}"${selected ? ' selected' : ''}>` +
    `${escapeHtml(label)} (${source.decided}/${source.candidates})</option>`;
}

export function renderRow(row: CandidateRow, selected: boolean): string {
  const labels = row.matched_labels
    .map(
      (l) =>
        `<span class="label" data-node="${escapeHtml(l.node_id)}" ` +
        `title="source ${l.source_score.toFixed(6)} / target ${l.target_score.toFixed(6)}">` +
        `${escapeHtml(l.title)}</span>`,
    )
    .join(' ');
  const classes = ['row', `status-${row.status}`];
  if (selected) classes.push('selected');
  return (
    `<tr class="${classes.join(' ')}" data-source="${escapeHtml(row.source_id)}" ` +
    `data-target="${escapeHtml(row.target_id)}">` +
    `<td class="pair"><strong>${escapeHtml(row.source_id)}</strong> ↔ ` +
    `<strong>${escapeHtml(row.target_id)}</strong><br>` +
    `<span class="excerpt">${escapeHtml(row.source.excerpt)}</span><br>` +
    `<span class="excerpt">${escapeHtml(row.target.excerpt)}</span></td>` +
    `<td class="labels">${labels}</td>` +
    `<td class="count">${row.match_count}</td>` +
    `<td class="status">${row.status}</td>` +
    `</tr>`
  );
}

export function renderQueue(rows: CandidateRow[], cursor: number): string {
  if (rows.length === 0) {
    return '<p class="empty">No candidates match the current filter.</p>';
  }
  const body = rows.map((row, i) => renderRow(row, i === cursor)).join('\n');
  return (
    '<table class="queue"><thead><tr>' +
    '<th>pair</th><th>matched labels</th><th>overlap</th><th>status</th>' +
    `</tr></thead><tbody>${body}</tbody></table>`
  );
}

export function renderContext(context: NodeContext): string {
  const trail = context.breadcrumb
    .map((b) => escapeHtml(b.title))
    .join(' <span class="sep">›</span> ');
  const synonyms = context.synonyms.length
    ? `<p class="synonyms">also known as: ${context.synonyms.map(escapeHtml).join(', ')}</p>`
    : '';
  const description = context.description
    ? `<p class="description">${escapeHtml(context.description)}</p>`
    : '';
  return `<nav class="breadcrumb">${trail}</nav>${description}${synonyms}`;
}

export function renderHelp(): string {
  const rows = KEY_HELP.map(
    ([keys, what]) => `<tr><td><kbd>${escapeHtml(keys)}</kbd></td><td>${escapeHtml(what)}</td></tr>`,
  ).join('');
  return `<table class="help">${rows}</table>`;
}

export function renderToast(message: string): string {
  return `<div class="toast">${escapeHtml(message)}</div>`;
}
