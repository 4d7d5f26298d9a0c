import { describe, expect, it } from 'vitest';

import { ApiError, GateClient } from '../src/api.js';

/** fetch stand-in that records calls and replays canned responses. */
function fakeFetch(responses: Array<{ status?: number; body?: unknown; raw?: string }>) {
  const calls: Array<{ url: string; init?: RequestInit }> = [];
  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({ url, init });
    const next = responses.shift() ?? { status: 200, body: {} };
    const text = next.raw ?? JSON.stringify(next.body ?? {});
    return new Response(text, {
      status: next.status ?? 200,
      headers: { 'Content-Type': 'application/json' },
    });
  };
  return { calls, fetchFn };
}

describe('GateClient', () => {
  it('polls events with the cursor in the query string', async () => {
    const { calls, fetchFn } = fakeFetch([{ body: { events: [{ event_id: 4 }] } }]);
    const client = new GateClient('http://svc:8080/', fetchFn);
    const events = await client.events(3);
    expect(calls[0].url).toBe('http://svc:8080/events?since=3');
    expect(events).toEqual([{ event_id: 4 }]);
  });

  it('posts list entries as JSON and unwraps the stored entry', async () => {
    const { calls, fetchFn } = fakeFetch([{ body: { entry: { plate: '12A34567' } } }]);
    const client = new GateClient('http://svc:8080', fetchFn);
    const entry = await client.upsertEntry({ plate: '12A34567', list_kind: 'WHITE' });
    expect(calls[0].url).toBe('http://svc:8080/lists');
    expect(calls[0].init?.method).toBe('POST');
    expect(JSON.parse(String(calls[0].init?.body)))
      .toEqual({ plate: '12A34567', list_kind: 'WHITE' });
    expect(entry).toEqual({ plate: '12A34567' });
  });

  it('deletes entries by kind and plate', async () => {
    const { calls, fetchFn } = fakeFetch([{ body: { removed: true } }]);
    const client = new GateClient('http://svc:8080', fetchFn);
    expect(await client.removeEntry('BLACK', '12A34567')).toBe(true);
    expect(calls[0].url).toBe('http://svc:8080/lists/BLACK/12A34567');
    expect(calls[0].init?.method).toBe('DELETE');
  });

  it('opens gates with operator, reason and a default IN direction', async () => {
    const { calls, fetchFn } = fakeFetch([{ body: { event: { event_id: 1 } } }]);
    const client = new GateClient('http://svc:8080', fetchFn);
    await client.manualOpen('G2', 'op7', 'delivery van');
    expect(calls[0].url).toBe('http://svc:8080/gates/G2/open');
    expect(JSON.parse(String(calls[0].init?.body)))
      .toEqual({ operator_id: 'op7', reason: 'delivery van', direction: 'IN' });
  });

  it('builds traffic queries from only the provided filters', async () => {
    const { calls, fetchFn } = fakeFetch([{ body: { rows: [] } }, { body: { rows: [] } }]);
    const client = new GateClient('http://svc:8080', fetchFn);
    await client.traffic({ from: 0, to: 5000, decision: 'DENY_ALARM' });
    expect(calls[0].url).toBe('http://svc:8080/reports/traffic?from=0&to=5000&decision=DENY_ALARM');
    await client.traffic({});
    expect(calls[1].url).toBe('http://svc:8080/reports/traffic');
  });

  it('surfaces service error messages with their status', async () => {
    const { fetchFn } = fakeFetch([
      { status: 422, body: { error: "plate 'HELLO' does not match the grammar" } },
    ]);
    const client = new GateClient('http://svc:8080', fetchFn);
    await expect(client.upsertEntry({ plate: 'HELLO', list_kind: 'WHITE' }))
      .rejects.toMatchObject({
        name: 'ApiError',
        status: 422,
        message: "plate 'HELLO' does not match the grammar",
      });
  });

  it('joins validation detail arrays and tolerates non-JSON bodies', async () => {
    const { fetchFn } = fakeFetch([
      { status: 422, body: { detail: [{ msg: 'field required' }] } },
      { status: 500, raw: 'boom' },
    ]);
    const client = new GateClient('http://svc:8080', fetchFn);
    await expect(client.occupancy()).rejects.toThrow('field required');
    await expect(client.occupancy()).rejects.toThrow('request failed with status 500');
  });

  it('is importable with a real fetch default', () => {
    expect(() => new GateClient('http://svc:8080')).not.toThrow();
    expect(new ApiError(404, 'x').status).toBe(404);
  });
});
