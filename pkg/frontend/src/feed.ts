/**
 * Live event feed: one long-poll in flight at a time, a strictly
 * advancing since-cursor, and automatic resume after connection loss.
 */

import { GateClient } from './api.js';
import { isAlarm } from './format.js';
import { GateEvent } from './types.js';

export type FeedStatus = 'idle' | 'live' | 'reconnecting' | 'stopped';

export interface FeedCallbacks {
  onRows?: (rows: readonly GateEvent[]) => void;
  onAlarm?: (event: GateEvent) => void;
  onStatus?: (status: FeedStatus) => void;
}

export interface FeedOptions extends FeedCallbacks {
  /** Pause between polls after an idle (empty) cycle. */
  idleDelayMs?: number;
  /** Pause before retrying after a failed poll. */
  retryDelayMs?: number;
  /** Rows kept for display; oldest beyond this are dropped. */
  maxRows?: number;
}

export class EventFeed {
  private readonly client: GateClient;
  private readonly idleDelayMs: number;
  private readonly retryDelayMs: number;
  private readonly maxRows: number;
  private readonly callbacks: FeedCallbacks;

  private _rows: GateEvent[] = [];
  private _cursor = 0;
  private _status: FeedStatus = 'idle';
  private running = false;
  private inflight: AbortController | null = null;
  private wake: (() => void) | null = null;

  constructor(client: GateClient, options: FeedOptions = {}) {
    this.client = client;
    this.idleDelayMs = options.idleDelayMs ?? 1000;
    this.retryDelayMs = options.retryDelayMs ?? 2000;
    this.maxRows = options.maxRows ?? 200;
    this.callbacks = options;
  }

  /** Rows sorted by event_id descending, duplicate-free. */
  get rows(): readonly GateEvent[] {
    return this._rows;
  }

  get cursor(): number {
    return this._cursor;
  }

  get status(): FeedStatus {
    return this._status;
  }

  /** Poll until stop(); resolves once the loop has wound down. */
  async start(): Promise<void> {
    if (this.running) return;
    this.running = true;
    while (this.running) {
      this.inflight = new AbortController();
      try {
        const events = await this.client.events(this._cursor, this.inflight.signal);
        this.setStatus('live');
        const fresh = this.ingest(events);
        if (fresh.length > 0) {
          this.callbacks.onRows?.(this._rows);
          for (const event of fresh) {
            if (isAlarm(event.decision)) this.callbacks.onAlarm?.(event);
          }
        } else {
          await this.sleep(this.idleDelayMs);
        }
      } catch (err) {
        if (!this.running || (err instanceof Error && err.name === 'AbortError')) break;
        this.setStatus('reconnecting');
        await this.sleep(this.retryDelayMs);
        // The cursor is untouched: the next poll resumes exactly where the
        // last successful one ended, so no event is skipped or repeated.
      } finally {
        this.inflight = null;
      }
    }
    this.setStatus('stopped');
  }

  stop(): void {
    this.running = false;
    this.inflight?.abort();
    this.wake?.();
  }

  /** Keep new events only, advance the cursor, maintain descending order. */
  private ingest(events: GateEvent[]): GateEvent[] {
    const fresh = events
      .filter((event) => event.event_id > this._cursor)
      .sort((a, b) => a.event_id - b.event_id);
    if (fresh.length === 0) return fresh;
    this._cursor = fresh[fresh.length - 1].event_id;
    this._rows = [...fresh].reverse().concat(this._rows).slice(0, this.maxRows);
    return fresh;
  }

  private setStatus(status: FeedStatus): void {
    if (this._status === status) return;
    this._status = status;
    this.callbacks.onStatus?.(status);
  }

  private sleep(ms: number): Promise<void> {
    return new Promise((resolve) => {
      const timer = setTimeout(() => {
        this.wake = null;
        resolve();
      }, ms);
      this.wake = () => {
        clearTimeout(timer);
        this.wake = null;
        resolve();
      };
    });
  }
}
