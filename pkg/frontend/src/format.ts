/**
 * View-model helpers: decision badges, relative times, durations.
 * Pure functions so the rendering layer stays trivial.
 */

import { Decision, GateEvent } from './types.js';

/** Client-side view of one event row in the feed table. */
export interface EventRow {
  event: GateEvent;
  badge: string;
  label: string;
  when: string;
  confidencePct: string;
}

const BADGES: Record<Decision, string> = {
  OPEN: 'badge-open',
  DENY: 'badge-deny',
  DENY_ALARM: 'badge-alarm',
  MANUAL_REVIEW: 'badge-review',
  MANUAL_OPEN: 'badge-manual',
};

/** CSS class for a decision; alarms get the attention-grabbing style. */
export function decisionBadge(decision: string): string {
  return BADGES[decision as Decision] ?? 'badge-unknown';
}

export function isAlarm(decision: string): boolean {
  return decision === 'DENY_ALARM';
}

/** Compact "how long ago" for the feed; falls back to a date for old rows. */
export function relativeTime(ts: number, now: number): string {
  const delta = Math.max(0, now - ts);
  if (delta < 5_000) return 'just now';
  if (delta < 60_000) return `${Math.floor(delta / 1000)}s ago`;
  if (delta < 3_600_000) return `${Math.floor(delta / 60_000)}m ago`;
  if (delta < 86_400_000) return `${Math.floor(delta / 3_600_000)}h ago`;
  return new Date(ts).toISOString().slice(0, 10);
}

/** Parking durations: "41s", "12m 05s", "3h 07m". */
export function formatDuration(ms: number): string {
  const seconds = Math.floor(ms / 1000);
  if (seconds < 60) return `${seconds}s`;
  const minutes = Math.floor(seconds / 60);
  const pad = (n: number) => String(n).padStart(2, '0');
  if (minutes < 60) return `${minutes}m ${pad(seconds % 60)}s`;
  return `${Math.floor(minutes / 60)}h ${pad(minutes % 60)}m`;
}

export function formatConfidence(confidence: number): string {
  return `${Math.round(confidence * 100)}%`;
}

export function toEventRow(event: GateEvent, now: number): EventRow {
  return {
    event,
    badge: decisionBadge(event.decision),
    label: event.decision.replace('_', ' '),
    when: relativeTime(event.ts, now),
    confidencePct: formatConfidence(event.confidence),
  };
}
