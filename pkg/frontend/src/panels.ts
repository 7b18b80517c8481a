import type {
  EventRecord,
  LayeredDoc,
  StackedDoc,
  TimelineBand,
  TimelineDoc,
} from './types.js';
import type { ConsoleConfigDraft } from './draft.js';

const SVG_NS = 'http://www.w3.org/2000/svg';
const BANDS: TimelineBand[] = ['in_shift', 'end_of_shift', 'outside_hours'];
const BAND_Y: Record<TimelineBand, number> = { in_shift: 44, end_of_shift: 74, outside_hours: 104 };

function svgEl<K extends keyof SVGElementTagNameMap>(tag: K): SVGElementTagNameMap[K] {
  return document.createElementNS(SVG_NS, tag);
}

/** Drop the server-rendered spiral frame into a panel as-is. */
export function embedFrame(container: HTMLElement, svg: string): void {
  container.innerHTML = svg;
}

/** Raw event log as a table; rows carry data-key for selection. */
export function renderLog(
  container: HTMLElement,
  events: EventRecord[],
  onPick: (key: string) => void,
): void {
  container.innerHTML = '';
  const table = document.createElement('table');
  table.className = 'log-table';
  const head = document.createElement('tr');
  for (const label of ['timestamp', 'employee', 'client', 'action', 'source']) {
    const th = document.createElement('th');
    th.textContent = label;
    head.appendChild(th);
  }
  table.appendChild(head);
  for (const event of events) {
    const row = document.createElement('tr');
    row.className = 'log-row';
    row.setAttribute('data-key', event.key);
    const cells = [event.timestamp, event.employee_id, event.client_id, event.action, event.source_system];
    for (const value of cells) {
      const td = document.createElement('td');
      td.textContent = value;
      row.appendChild(td);
    }
    table.appendChild(row);
  }
  table.addEventListener('click', (ev) => {
    const row = (ev.target as Element).closest('[data-key]');
    if (row) onPick(row.getAttribute('data-key') ?? '');
  });
  container.appendChild(table);
}

/** Bipartite employee/client graph; edges carry data-employee and data-client. */
export function renderLayered(
  container: HTMLElement,
  doc: LayeredDoc,
  onPickEdge: (employeeId: string, clientId: string) => void,
): void {
  container.innerHTML = '';
  const width = 520;
  const pad = 50;
  const xOf = (x: number) => pad + x * (width - 2 * pad);
  const svg = svgEl('svg');
  svg.setAttribute('viewBox', `0 0 ${width} 220`);
  svg.setAttribute('class', 'layered');

  const employeeX = new Map(doc.employees.map((n) => [n.id, xOf(n.x)]));
  const clientX = new Map(doc.clients.map((n) => [n.id, xOf(n.x)]));

  for (const edge of doc.edges) {
    const line = svgEl('line');
    line.setAttribute('x1', String(employeeX.get(edge.employee_id) ?? pad));
    line.setAttribute('y1', '50');
    line.setAttribute('x2', String(clientX.get(edge.client_id) ?? pad));
    line.setAttribute('y2', '170');
    line.setAttribute('stroke-width', String(Math.max(1, edge.thickness)));
    line.setAttribute('class', 'layered-edge');
    line.setAttribute('data-employee', edge.employee_id);
    line.setAttribute('data-client', edge.client_id);
    svg.appendChild(line);
  }
  const drawNodes = (nodes: LayeredDoc['employees'], xMap: Map<string, number>, y: number) => {
    for (const node of nodes) {
      const cx = xMap.get(node.id) ?? pad;
      const dot = svgEl('circle');
      dot.setAttribute('cx', String(cx));
      dot.setAttribute('cy', String(y));
      dot.setAttribute('r', '7');
      dot.setAttribute('fill', node.color);
      dot.setAttribute('class', 'layered-node');
      svg.appendChild(dot);
      const label = svgEl('text');
      label.setAttribute('x', String(cx));
      label.setAttribute('y', String(y < 110 ? y - 12 : y + 20));
      label.setAttribute('text-anchor', 'middle');
      label.textContent = node.id;
      svg.appendChild(label);
    }
  };
  drawNodes(doc.employees, employeeX, 50);
  drawNodes(doc.clients, clientX, 170);

  svg.addEventListener('click', (ev) => {
    const edge = (ev.target as Element).closest('[data-employee]');
    if (!edge) return;
    onPickEdge(edge.getAttribute('data-employee') ?? '', edge.getAttribute('data-client') ?? '');
  });
  container.appendChild(svg);
}

/** Shift-band timeline; one mark per raw event, keyed for selection. */
export function renderTimeline(
  container: HTMLElement,
  doc: TimelineDoc,
  onPick: (key: string) => void,
): void {
  container.innerHTML = '';
  const step = 72;
  const width = Math.max(200, doc.days.length * step + 40);
  const svg = svgEl('svg');
  svg.setAttribute('viewBox', `0 0 ${width} 140`);
  svg.setAttribute('class', 'timeline');

  const centerOf = new Map<string, number>();
  doc.days.forEach((day, i) => centerOf.set(day.date, 40 + i * step));

  for (const [from, to] of doc.edges) {
    const x1 = centerOf.get(from);
    const x2 = centerOf.get(to);
    if (x1 === undefined || x2 === undefined) continue;
    const line = svgEl('line');
    line.setAttribute('x1', String(x1));
    line.setAttribute('y1', '24');
    line.setAttribute('x2', String(x2));
    line.setAttribute('y2', '24');
    line.setAttribute('class', 'timeline-edge');
    svg.appendChild(line);
  }

  for (const day of doc.days) {
    const cx = centerOf.get(day.date) ?? 0;
    const group = svgEl('g');
    group.setAttribute('class', day.all_red ? 'timeline-day all-red' : 'timeline-day');
    if (day.boxed) {
      const box = svgEl('rect');
      box.setAttribute('x', String(cx - 26));
      box.setAttribute('y', '30');
      box.setAttribute('width', '52');
      box.setAttribute('height', '88');
      box.setAttribute('class', 'timeline-box');
      group.appendChild(box);
    }
    const label = svgEl('text');
    label.setAttribute('x', String(cx));
    label.setAttribute('y', '18');
    label.setAttribute('text-anchor', 'middle');
    label.textContent = day.date.slice(5);
    group.appendChild(label);
    for (const band of BANDS) {
      const keys = day.event_keys[band];
      keys.forEach((key, i) => {
        const dot = svgEl('circle');
        dot.setAttribute('cx', String(cx - 8 * (keys.length - 1) / 2 + 8 * i));
        dot.setAttribute('cy', String(BAND_Y[band]));
        dot.setAttribute('r', '5');
        dot.setAttribute('class', `timeline-mark band-${band}`);
        dot.setAttribute('data-key', key);
        group.appendChild(dot);
      });
    }
    svg.appendChild(group);
  }

  svg.addEventListener('click', (ev) => {
    const mark = (ev.target as Element).closest('[data-key]');
    if (mark) onPick(mark.getAttribute('data-key') ?? '');
  });
  container.appendChild(svg);
}

/** Ranked stacked bars; row order is the server's ranking order. */
export function renderStacked(container: HTMLElement, doc: StackedDoc): void {
  container.innerHTML = '';
  const list = document.createElement('div');
  list.className = 'stacked';
  for (const bar of doc.bars) {
    const row = document.createElement('div');
    row.className = 'stacked-row';
    row.setAttribute('data-client', bar.client_id);
    const label = document.createElement('span');
    label.className = 'stacked-label';
    label.textContent = `${bar.client_id} (${bar.score_exact})`;
    row.appendChild(label);
    const track = document.createElement('div');
    track.className = 'stacked-track';
    for (const segment of bar.segments) {
      const piece = document.createElement('div');
      piece.className = `stacked-seg seg-${segment.factor_id}`;
      piece.setAttribute('data-performance', String(segment.performance));
      piece.style.width = `${(segment.length / 2) * 100}%`;
      piece.title = `${segment.factor_id}: ${segment.length_exact}`;
      track.appendChild(piece);
    }
    row.appendChild(track);
    list.appendChild(row);
  }
  container.appendChild(list);
}

export interface FactorsEditorHooks {
  onSubmit: () => void;
}

/** Factor rank/enable editor bound to a ConsoleConfigDraft. */
export function renderFactorsEditor(
  container: HTMLElement,
  draft: ConsoleConfigDraft,
  hooks: FactorsEditorHooks,
): void {
  container.innerHTML = '';
  const form = document.createElement('div');
  form.className = 'factors-editor';
  for (const factor of draft.factors) {
    const row = document.createElement('div');
    row.className = 'factor-row';
    row.setAttribute('data-factor', factor.factorId);
    const name = document.createElement('span');
    name.className = 'factor-name';
    name.textContent = factor.factorId;
    row.appendChild(name);
    const rank = document.createElement('input');
    rank.type = 'number';
    rank.min = '1';
    rank.value = String(factor.rankPosition);
    rank.className = 'factor-rank';
    rank.addEventListener('input', () => {
      factor.rankPosition = Number(rank.value);
    });
    row.appendChild(rank);
    const enabled = document.createElement('input');
    enabled.type = 'checkbox';
    enabled.checked = factor.enabled;
    enabled.className = 'factor-enabled';
    enabled.addEventListener('change', () => {
      factor.enabled = enabled.checked;
    });
    row.appendChild(enabled);
    form.appendChild(row);
  }
  const errors = document.createElement('ul');
  errors.className = 'factor-errors';
  form.appendChild(errors);
  const submit = document.createElement('button');
  submit.type = 'button';
  submit.className = 'factor-submit';
  submit.textContent = 'Apply ranking';
  submit.addEventListener('click', hooks.onSubmit);
  form.appendChild(submit);
  container.appendChild(form);
}

/** Replace the contents of the editor's error list. */
export function showEditorErrors(container: HTMLElement, messages: string[]): void {
  const list = container.querySelector('.factor-errors');
  if (!list) return;
  list.innerHTML = '';
  for (const message of messages) {
    const item = document.createElement('li');
    item.textContent = message;
    list.appendChild(item);
  }
}
