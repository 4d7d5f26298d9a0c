/**
 * Typed client for the gate service HTTP/JSON API.
 * Every console interaction with the service goes through this module.
 */

import {
  AccessEntry,
  Direction,
  EntryBody,
  GateEvent,
  Health,
  ListKind,
  Occupancy,
  ReportRow,
  TrafficFilter,
} from './types.js';

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.name = 'ApiError';
    this.status = status;
  }
}

/** Pull a human-readable message out of a service error body. */
function errorMessage(status: number, body: unknown): string {
  if (body && typeof body === 'object') {
    const record = body as Record<string, unknown>;
    if (typeof record.error === 'string') return record.error;
    if (typeof record.detail === 'string') return record.detail;
    if (Array.isArray(record.detail)) {
      const parts = record.detail
        .map((d) => (d && typeof d === 'object' ? String((d as { msg?: unknown }).msg ?? '') : ''))
        .filter((m) => m.length > 0);
      if (parts.length > 0) return parts.join('; ');
    }
  }
  return `request failed with status ${status}`;
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class GateClient {
  readonly baseUrl: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn: FetchLike = fetch) {
    this.baseUrl = baseUrl.replace(/\/+$/, '');
    this.fetchFn = fetchFn;
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    let body: unknown = null;
    try {
      body = await response.json();
    } catch {
      body = null;
    }
    if (!response.ok) {
      throw new ApiError(response.status, errorMessage(response.status, body));
    }
    return body as T;
  }

  /** Long-poll for events after `since`; resolves with [] on an idle cycle. */
  async events(since: number, signal?: AbortSignal): Promise<GateEvent[]> {
    const body = await this.request<{ events: GateEvent[] }>(
      `/events?since=${since}`, { signal });
    return body.events;
  }

  async listEntries(): Promise<AccessEntry[]> {
    const body = await this.request<{ entries: AccessEntry[] }>('/lists');
    return body.entries;
  }

  async upsertEntry(entry: EntryBody): Promise<AccessEntry> {
    const body = await this.request<{ entry: AccessEntry }>('/lists', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(entry),
    });
    return body.entry;
  }

  async removeEntry(listKind: ListKind, plate: string): Promise<boolean> {
    const body = await this.request<{ removed: boolean }>(
      `/lists/${listKind}/${encodeURIComponent(plate)}`, { method: 'DELETE' });
    return body.removed;
  }

  async manualOpen(gateId: string, operatorId: string, reason: string,
                   direction: Direction = 'IN'): Promise<GateEvent> {
    const body = await this.request<{ event: GateEvent }>(
      `/gates/${encodeURIComponent(gateId)}/open`, {
        method: 'POST',
        headers: { 'Content-Type': 'application/json' },
        body: JSON.stringify({ operator_id: operatorId, reason, direction }),
      });
    return body.event;
  }

  async occupancy(): Promise<Occupancy> {
    return this.request<Occupancy>('/occupancy');
  }

  async traffic(filter: TrafficFilter): Promise<ReportRow[]> {
    const params = new URLSearchParams();
    if (filter.from !== undefined) params.set('from', String(filter.from));
    if (filter.to !== undefined) params.set('to', String(filter.to));
    if (filter.gate_id) params.set('gate_id', filter.gate_id);
    if (filter.plate) params.set('plate', filter.plate);
    if (filter.decision) params.set('decision', filter.decision);
    const query = params.toString();
    const body = await this.request<{ rows: ReportRow[] }>(
      `/reports/traffic${query ? `?${query}` : ''}`);
    return body.rows;
  }

  async health(): Promise<Health> {
    return this.request<Health>('/health');
  }
}
