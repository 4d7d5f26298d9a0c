/**
 * List-editor form parsing: turns raw field strings into an API entry
 * body, with client-side structural checks before the service sees it.
 */

import { EntryBody, ListKind } from './types.js';

export const WEEKDAYS = ['MON', 'TUE', 'WED', 'THU', 'FRI', 'SAT', 'SUN'] as const;

const HOUR_PATTERN = /^([01][0-9]|2[0-3]):[0-5][0-9]$/;

export interface EntryFormFields {
  plate: string;
  listKind: string;
  /** datetime-local values, empty for unconstrained. */
  validFrom?: string;
  validTo?: string;
  days?: string[];
  hourStart?: string;
  hourEnd?: string;
  note?: string;
}

export type ParsedEntryForm =
  | { ok: true; body: EntryBody }
  | { ok: false; error: string };

function parseWhen(value: string | undefined, label: string):
    { ok: true; ms?: number } | { ok: false; error: string } {
  if (!value || value.trim() === '') return { ok: true };
  const ms = Date.parse(value);
  if (Number.isNaN(ms)) return { ok: false, error: `${label}: not a valid date` };
  return { ok: true, ms };
}

/** Validate and assemble the POST /lists body; plate grammar stays server-side. */
export function parseEntryForm(fields: EntryFormFields): ParsedEntryForm {
  const plate = fields.plate.trim().toUpperCase();
  if (plate === '') return { ok: false, error: 'plate is required' };
  if (fields.listKind !== 'WHITE' && fields.listKind !== 'BLACK') {
    return { ok: false, error: 'list kind must be WHITE or BLACK' };
  }

  const from = parseWhen(fields.validFrom, 'valid from');
  if (!from.ok) return from;
  const to = parseWhen(fields.validTo, 'valid to');
  if (!to.ok) return to;
  if (from.ms !== undefined && to.ms !== undefined && from.ms > to.ms) {
    return { ok: false, error: 'valid from must not be after valid to' };
  }

  const days = (fields.days ?? []).filter((d) => d !== '');
  for (const day of days) {
    if (!(WEEKDAYS as readonly string[]).includes(day)) {
      return { ok: false, error: `unknown weekday ${day}` };
    }
  }

  const start = fields.hourStart?.trim() ?? '';
  const end = fields.hourEnd?.trim() ?? '';
  if ((start === '') !== (end === '')) {
    return { ok: false, error: 'hour range needs both a start and an end' };
  }
  if (start !== '' && (!HOUR_PATTERN.test(start) || !HOUR_PATTERN.test(end))) {
    return { ok: false, error: 'hours must be HH:MM (24-hour)' };
  }

  const body: EntryBody = { plate, list_kind: fields.listKind as ListKind };
  if (from.ms !== undefined) body.valid_from = from.ms;
  if (to.ms !== undefined) body.valid_to = to.ms;
  if (days.length > 0) body.allowed_days = days;
  if (start !== '') body.allowed_hours = [start, end];
  const note = fields.note?.trim() ?? '';
  if (note !== '') body.note = note;
  return { ok: true, body };
}
