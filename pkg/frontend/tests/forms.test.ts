import { describe, expect, it } from 'vitest';

import { parseEntryForm } from '../src/forms.js';

describe('parseEntryForm', () => {
  it('builds a minimal body, trimming and uppercasing the plate', () => {
    const parsed = parseEntryForm({ plate: ' 12a34567 ', listKind: 'WHITE' });
    expect(parsed).toEqual({ ok: true, body: { plate: '12A34567', list_kind: 'WHITE' } });
  });

  it('assembles the full validity window verbatim', () => {
    const parsed = parseEntryForm({
      plate: '12A34567',
      listKind: 'BLACK',
      validFrom: '2024-05-06T00:00:00Z',
      validTo: '2024-05-07T00:00:00Z',
      days: ['MON', 'TUE'],
      hourStart: '08:00',
      hourEnd: '18:00',
      note: 'blue sedan',
    });
    expect(parsed).toEqual({
      ok: true,
      body: {
        plate: '12A34567',
        list_kind: 'BLACK',
        valid_from: Date.parse('2024-05-06T00:00:00Z'),
        valid_to: Date.parse('2024-05-07T00:00:00Z'),
        allowed_days: ['MON', 'TUE'],
        allowed_hours: ['08:00', '18:00'],
        note: 'blue sedan',
      },
    });
  });

  it('rejects an empty plate', () => {
    expect(parseEntryForm({ plate: '  ', listKind: 'WHITE' }))
      .toEqual({ ok: false, error: 'plate is required' });
  });

  it('rejects an unknown list kind', () => {
    const parsed = parseEntryForm({ plate: '12A34567', listKind: 'GRAY' });
    expect(parsed.ok).toBe(false);
  });

  it('rejects unparseable and inverted date ranges', () => {
    expect(parseEntryForm({ plate: '12A34567', listKind: 'WHITE', validFrom: 'soon' }).ok)
      .toBe(false);
    const inverted = parseEntryForm({
      plate: '12A34567',
      listKind: 'WHITE',
      validFrom: '2024-05-07T00:00:00Z',
      validTo: '2024-05-06T00:00:00Z',
    });
    expect(inverted).toEqual({ ok: false, error: 'valid from must not be after valid to' });
  });

  it('rejects unknown weekdays', () => {
    const parsed = parseEntryForm({ plate: '12A34567', listKind: 'WHITE', days: ['FUN'] });
    expect(parsed).toEqual({ ok: false, error: 'unknown weekday FUN' });
  });

  it('requires the hour range to be complete and well-formed', () => {
    expect(parseEntryForm({ plate: '12A34567', listKind: 'WHITE', hourStart: '08:00' }))
      .toEqual({ ok: false, error: 'hour range needs both a start and an end' });
    expect(parseEntryForm({
      plate: '12A34567', listKind: 'WHITE', hourStart: '8am', hourEnd: '6pm',
    }).ok).toBe(false);
    expect(parseEntryForm({
      plate: '12A34567', listKind: 'WHITE', hourStart: '22:00', hourEnd: '06:00',
    })).toEqual({
      ok: true,
      body: { plate: '12A34567', list_kind: 'WHITE', allowed_hours: ['22:00', '06:00'] },
    });
  });
});
