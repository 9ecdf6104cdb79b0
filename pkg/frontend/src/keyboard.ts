/**
 * Keyboard map for the review loop. The whole accept/reject cycle is
 * reachable without a pointer: navigate, decide, inspect labels, page.
 */

export type KeyAction =
  | 'next'
  | 'prev'
  | 'accept'
  | 'reject'
  | 'context'
  | 'refresh'
  | 'help';

export interface KeyLike {
  key: string;
  ctrlKey?: boolean;
  metaKey?: boolean;
  altKey?: boolean;
}

const BINDINGS: Record<string, KeyAction> = {
  j: 'next',
  ArrowDown: 'next',
  k: 'prev',
  ArrowUp: 'prev',
  a: 'accept',
  r: 'reject',
  Enter: 'context',
  t: 'context',
  g: 'refresh',
  '?': 'help',
};

export function keyAction(event: KeyLike): KeyAction | null {
  if (event.ctrlKey || event.metaKey || event.altKey) {
    return null;
  }
  return BINDINGS[event.key] ?? null;
}

export const KEY_HELP: ReadonlyArray<[string, string]> = [
  ['j / ↓', 'next candidate'],
  ['k / ↑', 'previous candidate'],
  ['a', 'accept'],
  ['r', 'reject'],
  ['t / Enter', 'show matched-label context'],
  ['g', 'refresh statuses from server'],
  ['?', 'toggle this help'],
];
