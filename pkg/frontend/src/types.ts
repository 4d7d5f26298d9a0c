/**
 * Wire types for the gate service HTTP/JSON API.
 * Field names mirror the service responses exactly.
 */

export type Direction = 'IN' | 'OUT';
export type ListKind = 'WHITE' | 'BLACK';
export type Decision = 'OPEN' | 'DENY' | 'DENY_ALARM' | 'MANUAL_REVIEW' | 'MANUAL_OPEN';

export interface GateEvent {
  event_id: number;
  ts: number;
  gate_id: string;
  direction: Direction;
  plate: string;
  decision: Decision;
  confidence: number;
  frame_ref: string | null;
  operator_id?: string;
  reason?: string;
}

export interface AccessEntry {
  plate: string;
  list_kind: ListKind;
  valid_from: number | null;
  valid_to: number | null;
  allowed_days: string[] | null;
  allowed_hours: [string, string] | null;
  note: string;
}

export interface EntryBody {
  plate: string;
  list_kind: ListKind;
  valid_from?: number;
  valid_to?: number;
  allowed_days?: string[];
  allowed_hours?: [string, string];
  note?: string;
}

export interface ReportRow {
  plate: string;
  note: string;
  in_ts: number;
  gate_in: string;
  decision: Decision;
  out_ts: number | null;
  duration: number | null;
  gate_out: string | null;
}

export interface TrafficFilter {
  from?: number;
  to?: number;
  gate_id?: string;
  plate?: string;
  decision?: string;
}

export interface Occupancy {
  count: number;
  plates: string[];
  anomalies: number;
}

export interface Health {
  status: string;
  gates: string[];
}
