/**
 * Occupancy widget state: polls the counter on a short interval and
 * reports values or an unreachable flag to the view.
 */

import { GateClient } from './api.js';
import { Occupancy } from './types.js';

export interface OccupancyCallbacks {
  onValue: (occupancy: Occupancy) => void;
  onError?: (message: string) => void;
}

export class OccupancyPoller {
  private readonly client: GateClient;
  private readonly intervalMs: number;
  private readonly callbacks: OccupancyCallbacks;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(client: GateClient, callbacks: OccupancyCallbacks, intervalMs = 2000) {
    this.client = client;
    this.callbacks = callbacks;
    this.intervalMs = intervalMs;
  }

  start(): void {
    if (this.timer !== null) return;
    void this.poll();
    this.timer = setInterval(() => void this.poll(), this.intervalMs);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async poll(): Promise<void> {
    try {
      this.callbacks.onValue(await this.client.occupancy());
    } catch (err) {
      this.callbacks.onError?.(err instanceof Error ? err.message : String(err));
    }
  }
}
