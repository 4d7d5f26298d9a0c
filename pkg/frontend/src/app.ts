/**
 * DOM wiring for the operator console. All logic lives in the other
 * modules; this file only connects them to the page.
 */

import { ApiError, GateClient } from './api.js';
import { EventFeed, FeedStatus } from './feed.js';
import { formatDuration, toEventRow } from './format.js';
import { parseEntryForm } from './forms.js';
import { OccupancyPoller } from './occupancy.js';
import { AccessEntry, ReportRow } from './types.js';

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function escapeHtml(text: string): string {
  return text.replace(/[&<>"']/g, (c) =>
    ({ '&': '&amp;', '<': '&lt;', '>': '&gt;', '"': '&quot;', "'": '&#39;' }[c] as string));
}

/** Short beep, used for alarm rows; browsers require a prior user gesture. */
function beep(): void {
  const Ctor = window.AudioContext
    ?? (window as unknown as { webkitAudioContext?: typeof AudioContext }).webkitAudioContext;
  if (!Ctor) return;
  const ctx = new Ctor();
  const osc = ctx.createOscillator();
  const gain = ctx.createGain();
  osc.type = 'square';
  osc.frequency.value = 880;
  gain.gain.setValueAtTime(0.25, ctx.currentTime);
  gain.gain.exponentialRampToValueAtTime(0.001, ctx.currentTime + 0.6);
  osc.connect(gain).connect(ctx.destination);
  osc.start();
  osc.stop(ctx.currentTime + 0.6);
  osc.onended = () => void ctx.close();
}

function apiBase(): string {
  const fromQuery = new URLSearchParams(window.location.search).get('api');
  return fromQuery ?? `http://${window.location.hostname || '127.0.0.1'}:8080`;
}

const client = new GateClient(apiBase());

// ---- live feed -------------------------------------------------------------

const feedBody = el<HTMLTableSectionElement>('feed-body');
const banner = el<HTMLDivElement>('status-banner');

function renderFeed(rows: readonly import('./types.js').GateEvent[]): void {
  const now = Date.now();
  feedBody.innerHTML = rows.map((event) => {
    const row = toEventRow(event, now);
    const operator = event.operator_id
      ? ` <span class="operator">by ${escapeHtml(event.operator_id)}</span>` : '';
    return `<tr class="${row.badge === 'badge-alarm' ? 'row-alarm' : ''}">
      <td>${event.event_id}</td>
      <td>${row.when}</td>
      <td>${escapeHtml(event.gate_id)} ${event.direction}</td>
      <td class="plate">${escapeHtml(event.plate) || '&mdash;'}</td>
      <td><span class="badge ${row.badge}">${row.label}</span>${operator}</td>
      <td>${row.confidencePct}</td>
    </tr>`;
  }).join('');
}

function renderStatus(status: FeedStatus): void {
  banner.hidden = status !== 'reconnecting';
  banner.textContent = 'connection lost — retrying, feed will resume without gaps';
}

const feed = new EventFeed(client, {
  onRows: renderFeed,
  onAlarm: () => beep(),
  onStatus: renderStatus,
});
void feed.start();
setInterval(() => renderFeed(feed.rows), 10_000);   // refresh relative times

// ---- manual open -----------------------------------------------------------

const operatorInput = el<HTMLInputElement>('operator-id');
const openButton = el<HTMLButtonElement>('open-button');
const gateSelect = el<HTMLSelectElement>('gate-select');
const openError = el<HTMLSpanElement>('open-error');

function syncOpenButton(): void {
  openButton.disabled = operatorInput.value.trim() === '';
}
operatorInput.addEventListener('input', syncOpenButton);
syncOpenButton();

openButton.addEventListener('click', () => {
  const reason = window.prompt('Reason for opening the gate?') ?? '';
  openError.textContent = '';
  client.manualOpen(gateSelect.value, operatorInput.value.trim(), reason)
    .catch((err: unknown) => {
      openError.textContent = err instanceof ApiError ? err.message : String(err);
    });
});

void client.health().then((health) => {
  gateSelect.innerHTML = health.gates
    .map((gate) => `<option value="${escapeHtml(gate)}">${escapeHtml(gate)}</option>`)
    .join('');
});

// ---- list editor -----------------------------------------------------------

const listTable = el<HTMLTableSectionElement>('list-body');
const listError = el<HTMLSpanElement>('list-error');

function describeWindow(entry: AccessEntry): string {
  const parts: string[] = [];
  if (entry.valid_from !== null) parts.push(`from ${new Date(entry.valid_from).toISOString()}`);
  if (entry.valid_to !== null) parts.push(`to ${new Date(entry.valid_to).toISOString()}`);
  if (entry.allowed_days !== null) parts.push(entry.allowed_days.join('/'));
  if (entry.allowed_hours !== null) parts.push(entry.allowed_hours.join('–'));
  return parts.join(', ') || 'always';
}

async function refreshLists(): Promise<void> {
  const entries = await client.listEntries();
  listTable.innerHTML = entries.map((entry) => `<tr>
      <td><span class="badge ${entry.list_kind === 'BLACK' ? 'badge-alarm' : 'badge-open'}">
        ${entry.list_kind}</span></td>
      <td class="plate">${escapeHtml(entry.plate)}</td>
      <td>${escapeHtml(describeWindow(entry))}</td>
      <td>${escapeHtml(entry.note)}</td>
      <td><button class="remove" data-kind="${entry.list_kind}"
                  data-plate="${escapeHtml(entry.plate)}">remove</button></td>
    </tr>`).join('');
}

listTable.addEventListener('click', (raw) => {
  const target = raw.target as HTMLElement;
  if (!target.classList.contains('remove')) return;
  const kind = target.dataset.kind as 'WHITE' | 'BLACK';
  void client.removeEntry(kind, target.dataset.plate ?? '').then(refreshLists);
});

el<HTMLFormElement>('entry-form').addEventListener('submit', (submit) => {
  submit.preventDefault();
  listError.textContent = '';
  const form = submit.target as HTMLFormElement;
  const data = new FormData(form);
  const parsed = parseEntryForm({
    plate: String(data.get('plate') ?? ''),
    listKind: String(data.get('list_kind') ?? ''),
    validFrom: String(data.get('valid_from') ?? ''),
    validTo: String(data.get('valid_to') ?? ''),
    days: data.getAll('days').map(String),
    hourStart: String(data.get('hour_start') ?? ''),
    hourEnd: String(data.get('hour_end') ?? ''),
    note: String(data.get('note') ?? ''),
  });
  if (!parsed.ok) {
    listError.textContent = parsed.error;
    return;
  }
  client.upsertEntry(parsed.body)
    .then(() => {
      form.reset();
      return refreshLists();
    })
    .catch((err: unknown) => {
      listError.textContent = err instanceof ApiError ? err.message : String(err);
    });
});

void refreshLists();

// ---- occupancy -------------------------------------------------------------

const occupancyCount = el<HTMLSpanElement>('occupancy-count');
const occupancyDetail = el<HTMLSpanElement>('occupancy-detail');

new OccupancyPoller(client, {
  onValue: (occ) => {
    occupancyCount.textContent = String(occ.count);
    occupancyDetail.textContent =
      occ.anomalies > 0 ? `${occ.anomalies} anomalies` : '';
  },
  onError: () => {
    occupancyCount.textContent = '?';
  },
}).start();

// ---- traffic reports -------------------------------------------------------

const reportBody = el<HTMLTableSectionElement>('report-body');
const reportEmpty = el<HTMLParagraphElement>('report-empty');

function renderReport(rows: ReportRow[]): void {
  reportEmpty.hidden = rows.length > 0;
  reportBody.innerHTML = rows.map((row) => `<tr>
      <td class="plate">${escapeHtml(row.plate) || '&mdash;'}</td>
      <td>${escapeHtml(row.note)}</td>
      <td>${new Date(row.in_ts).toISOString()}</td>
      <td>${row.out_ts !== null ? new Date(row.out_ts).toISOString() : 'still inside'}</td>
      <td>${row.duration !== null ? formatDuration(row.duration) : '&mdash;'}</td>
      <td>${escapeHtml(row.gate_in)}${row.gate_out ? ` → ${escapeHtml(row.gate_out)}` : ''}</td>
      <td><span class="badge ${row.decision === 'DENY_ALARM' ? 'badge-alarm' : 'badge-open'}">
        ${row.decision.replace('_', ' ')}</span></td>
    </tr>`).join('');
}

el<HTMLFormElement>('report-form').addEventListener('submit', (submit) => {
  submit.preventDefault();
  const data = new FormData(submit.target as HTMLFormElement);
  const fromRaw = String(data.get('from') ?? '');
  const toRaw = String(data.get('to') ?? '');
  void client.traffic({
    from: fromRaw ? Date.parse(fromRaw) : undefined,
    to: toRaw ? Date.parse(toRaw) : undefined,
    gate_id: String(data.get('gate_id') ?? '') || undefined,
    plate: String(data.get('plate') ?? '').toUpperCase() || undefined,
    decision: String(data.get('decision') ?? '') || undefined,
  }).then(renderReport);
});

void client.traffic({}).then(renderReport);
