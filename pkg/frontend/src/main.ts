/**
 * Browser bootstrap: wires the API client, review store, renderers, and the
 * keyboard loop into the static page served by the backend at /.
 */

import { ApiClient } from './api.js';
import { keyAction } from './keyboard.js';
import { clusterIndex } from './queue.js';
import {
  renderContext,
  renderHelp,
  renderProgress,
  renderQueue,
  renderSourceOption,
  renderToast,
} from './render.js';
import { ReviewStore } from './store.js';
import type { SourceSummary } from './types.js';

const api = new ApiClient('');
const store = new ReviewStore(api);
let sources: SourceSummary[] = [];
let helpVisible = false;

function el(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node;
}

function draw(): void {
  el('queue').innerHTML = renderQueue(store.rows, store.cursor);
  el('progress').innerHTML = renderProgress(store.progress(sources.length));
  el('help').innerHTML = helpVisible ? renderHelp() : '';
  const selected = document.querySelector('.row.selected');
  selected?.scrollIntoView({ block: 'nearest' });
}

function toast(message: string): void {
  el('toast').innerHTML = renderToast(message);
  window.setTimeout(() => {
    el('toast').innerHTML = '';
  }, 4000);
}

async function showContext(): Promise<void> {
  const row = store.current();
  if (!row || row.matched_labels.length === 0) return;
  const panels: string[] = [];
  for (const label of row.matched_labels) {
    try {
      panels.push(renderContext(await api.node(label.node_id)));
    } catch (err) {
      panels.push(renderToast(`label ${label.node_id}: ${String(err)}`));
    }
  }
  el('context').innerHTML = panels.join('<hr>');
}

async function reloadSources(): Promise<void> {
  const page = await api.sources(0, 500);
  sources = page.items;
  const options = ['<option value="">all sources</option>'];
  for (const source of sources) {
    options.push(renderSourceOption(source, source.id === store.sourceFilter));
  }
  (el('source-select') as HTMLSelectElement).innerHTML = options.join('');
}

async function handleKey(event: KeyboardEvent): Promise<void> {
  if ((event.target as HTMLElement)?.tagName === 'SELECT') return;
  const action = keyAction(event);
  if (!action) return;
  event.preventDefault();
  switch (action) {
    case 'next':
      store.moveCursor(1);
      break;
    case 'prev':
      store.moveCursor(-1);
      break;
    case 'accept':
    case 'reject': {
      const outcome = await store.decideCurrent(
        action === 'accept' ? 'accepted' : 'rejected',
      );
      if (outcome && !outcome.ok) {
        toast(outcome.error ?? 'decision failed');
      }
      break;
    }
    case 'context':
      await showContext();
      break;
    case 'refresh':
      await store.refetchStatuses();
      toast('statuses refreshed');
      break;
    case 'help':
      helpVisible = !helpVisible;
      break;
  }
  draw();
}

async function boot(): Promise<void> {
  await reloadSources();
  await store.load();
  draw();

  document.addEventListener('keydown', (event) => {
    void handleKey(event);
  });

  el('source-select').addEventListener('change', (event) => {
    const value = (event.target as HTMLSelectElement).value;
    store.sourceFilter = value || undefined;
    store.cursor = 0;
    void store.load().then(draw);
  });

  el('status-select').addEventListener('change', (event) => {
    const value = (event.target as HTMLSelectElement).value;
    store.statusFilter = value || undefined;
    store.cursor = 0;
    void store.load().then(draw);
  });

  el('queue').addEventListener('click', (event) => {
    const label = (event.target as HTMLElement).closest('.label');
    if (label) {
      const nodeId = (label as HTMLElement).dataset.node;
      if (nodeId) {
        void api.node(nodeId).then((ctx) => {
          el('context').innerHTML = renderContext(ctx);
        });
      }
      return;
    }
    const tr = (event.target as HTMLElement).closest('tr.row');
    if (tr) {
      const source = (tr as HTMLElement).dataset.source;
      const target = (tr as HTMLElement).dataset.target;
      store.cursor = store.rows.findIndex(
        (r) => r.source_id === source && r.target_id === target,
      );
      draw();
    }
  });

  window.setInterval(() => {
    el('progress').innerHTML = renderProgress(store.progress(sources.length));
  }, 1000);
}

void boot().catch((err) => {
  document.body.innerHTML = `<pre>failed to load: ${String(err)}</pre>`;
});
