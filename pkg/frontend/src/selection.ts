import type { EventRecord, LayoutDoc, SpiralNode } from './types.js';

/**
 * One coordinated selection shared by every view.
 *
 * The spiral shows one node per (employee, client, day) while the log and
 * timeline panels show raw events, so a selection carries both resolutions:
 * raw event keys for the log/timeline and representative node keys for the
 * spiral. Same-day duplicates map onto their representative node.
 */
export interface SelectionState {
  origin: 'spiral' | 'log' | 'layered' | 'none';
  logKeys: ReadonlySet<string>;
  spiralKeys: ReadonlySet<string>;
  pair: { employeeId: string; clientId: string } | null;
  clientId: string | null;
}

const EMPTY: SelectionState = {
  origin: 'none',
  logKeys: new Set(),
  spiralKeys: new Set(),
  pair: null,
  clientId: null,
};

function dayKeyOf(event: { employee_id: string; client_id: string; timestamp: string }): string {
  return `${event.employee_id}|${event.client_id}|${event.timestamp.slice(0, 10)}`;
}

export class SelectionModel {
  private state: SelectionState = EMPTY;
  private listeners: Array<(state: SelectionState) => void> = [];
  private spiralByKey = new Map<string, SpiralNode>();
  private representativeByDay = new Map<string, string>();
  private rawByKey = new Map<string, EventRecord>();

  get current(): SelectionState {
    return this.state;
  }

  onChange(listener: (state: SelectionState) => void): void {
    this.listeners.push(listener);
  }

  /** Swap in the layouts of a newly shown client. Stale selections clear. */
  loadClient(layout: LayoutDoc, rawEvents: EventRecord[]): void {
    this.spiralByKey.clear();
    this.representativeByDay.clear();
    this.rawByKey.clear();
    for (const node of layout.spiral.nodes) {
      this.spiralByKey.set(node.event_key, node);
      this.representativeByDay.set(dayKeyOf(node.event), node.event_key);
    }
    for (const event of rawEvents) {
      this.rawByKey.set(event.key, event);
    }
    this.clear();
  }

  selectSpiralNode(eventKey: string): void {
    const node = this.spiralByKey.get(eventKey);
    if (!node) {
      this.clear();
      return;
    }
    const day = dayKeyOf(node.event);
    const logKeys = new Set<string>();
    for (const event of this.rawByKey.values()) {
      if (dayKeyOf(event) === day) logKeys.add(event.key);
    }
    if (!logKeys.size) logKeys.add(eventKey);
    this.emit({
      origin: 'spiral',
      logKeys,
      spiralKeys: new Set([eventKey]),
      pair: { employeeId: node.event.employee_id, clientId: node.event.client_id },
      clientId: node.event.client_id,
    });
  }

  selectLogRow(eventKey: string): void {
    const event = this.rawByKey.get(eventKey);
    if (!event) {
      this.clear();
      return;
    }
    const representative = this.representativeByDay.get(dayKeyOf(event));
    this.emit({
      origin: 'log',
      logKeys: new Set([eventKey]),
      spiralKeys: new Set(representative ? [representative] : []),
      pair: { employeeId: event.employee_id, clientId: event.client_id },
      clientId: event.client_id,
    });
  }

  selectLayeredEdge(employeeId: string, clientId: string): void {
    const logKeys = new Set<string>();
    const spiralKeys = new Set<string>();
    for (const event of this.rawByKey.values()) {
      if (event.employee_id !== employeeId || event.client_id !== clientId) continue;
      logKeys.add(event.key);
      const representative = this.representativeByDay.get(dayKeyOf(event));
      if (representative) spiralKeys.add(representative);
    }
    this.emit({ origin: 'layered', logKeys, spiralKeys, pair: { employeeId, clientId }, clientId });
  }

  clear(): void {
    if (this.state !== EMPTY) this.emit(EMPTY);
  }

  private emit(state: SelectionState): void {
    this.state = state;
    for (const listener of this.listeners) listener(state);
  }
}
