import { describe, expect, it } from 'vitest';

import {
  decisionBadge,
  formatConfidence,
  formatDuration,
  isAlarm,
  relativeTime,
  toEventRow,
} from '../src/format.js';
import { GateEvent } from '../src/types.js';

describe('decisionBadge', () => {
  it('maps every decision to its css class', () => {
    expect(decisionBadge('OPEN')).toBe('badge-open');
    expect(decisionBadge('DENY')).toBe('badge-deny');
    expect(decisionBadge('DENY_ALARM')).toBe('badge-alarm');
    expect(decisionBadge('MANUAL_REVIEW')).toBe('badge-review');
    expect(decisionBadge('MANUAL_OPEN')).toBe('badge-manual');
  });

  it('falls back for unexpected values', () => {
    expect(decisionBadge('SOMETHING_NEW')).toBe('badge-unknown');
  });
});

describe('isAlarm', () => {
  it('flags only DENY_ALARM', () => {
    expect(isAlarm('DENY_ALARM')).toBe(true);
    expect(isAlarm('DENY')).toBe(false);
    expect(isAlarm('OPEN')).toBe(false);
  });
});

describe('relativeTime', () => {
  const now = 1_000_000_000_000;

  it('buckets by age', () => {
    expect(relativeTime(now - 1_000, now)).toBe('just now');
    expect(relativeTime(now - 42_000, now)).toBe('42s ago');
    expect(relativeTime(now - 5 * 60_000, now)).toBe('5m ago');
    expect(relativeTime(now - 3 * 3_600_000, now)).toBe('3h ago');
  });

  it('shows a date for old rows and never goes negative', () => {
    expect(relativeTime(now - 3 * 86_400_000, now)).toMatch(/^\d{4}-\d{2}-\d{2}$/);
    expect(relativeTime(now + 5_000, now)).toBe('just now');
  });
});

describe('formatDuration', () => {
  it('renders seconds, minutes and hours', () => {
    expect(formatDuration(41_000)).toBe('41s');
    expect(formatDuration(125_000)).toBe('2m 05s');
    expect(formatDuration(3 * 3_600_000 + 7 * 60_000)).toBe('3h 07m');
  });
});

describe('toEventRow', () => {
  it('derives badge, label, time and confidence', () => {
    const event: GateEvent = {
      event_id: 9,
      ts: 5_000,
      gate_id: 'G1',
      direction: 'IN',
      plate: '12A34567',
      decision: 'DENY_ALARM',
      confidence: 0.953,
      frame_ref: null,
    };
    const row = toEventRow(event, 65_000);
    expect(row.badge).toBe('badge-alarm');
    expect(row.label).toBe('DENY ALARM');
    expect(row.when).toBe('1m ago');
    expect(row.confidencePct).toBe('95%');
    expect(formatConfidence(1)).toBe('100%');
  });
});
