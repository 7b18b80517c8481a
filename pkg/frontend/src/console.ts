import { ApiError, ConsoleApi } from './api.js';
import { ConsoleConfigDraft } from './draft.js';
import { FramePlayer } from './player.js';
import { SelectionModel, type SelectionState } from './selection.js';
import { StatusMarker } from './status.js';
import {
  embedFrame,
  renderFactorsEditor,
  renderLayered,
  renderLog,
  renderStacked,
  renderTimeline,
  showEditorErrors,
} from './panels.js';
import type { ClientStatus, FrameEntry, RankingsResponse } from './types.js';

const TEMPLATE = `
<header class="console-header">
  <span class="frame-client"></span>
  <span class="frame-score"></span>
  <span class="status-badge"></span>
  <span class="frame-position"></span>
  <button type="button" class="btn-prev">prev</button>
  <button type="button" class="btn-play">play</button>
  <button type="button" class="btn-pause">pause</button>
  <button type="button" class="btn-next">next</button>
  <span class="status-actions">
    <button type="button" class="btn-clear">mark cleared</button>
    <button type="button" class="btn-suspect">mark suspect</button>
    <button type="button" class="btn-blacklist">mark blacklisted</button>
  </span>
  <div class="refresh-prompt" hidden>
    <span>Rankings changed on the server.</span>
    <button type="button" class="btn-refresh-accept">Reload frames</button>
    <button type="button" class="btn-refresh-dismiss">Keep current order</button>
  </div>
  <div class="console-error" role="alert"></div>
</header>
<main class="console-grid">
  <section class="panel panel-spiral"></section>
  <section class="panel panel-timeline"></section>
  <section class="panel panel-layered"></section>
  <section class="panel panel-log"></section>
  <section class="panel panel-stacked"></section>
  <section class="panel panel-editor"></section>
</main>
`;

/**
 * The auditor console: a frame player over the ranked spiral frames with
 * log, timeline, layered, and stacked-bar panels that share one selection.
 * All numbers come from the service; the console only arranges them.
 */
export class AuditorConsole {
  readonly selection = new SelectionModel();
  readonly player = new FramePlayer();
  readonly marker = new StatusMarker();
  draft: ConsoleConfigDraft | null = null;
  loading: Promise<void> = Promise.resolve();

  private readonly api: ConsoleApi;
  private readonly topK: number;
  private readonly spiralPanel: HTMLElement;
  private readonly timelinePanel: HTMLElement;
  private readonly layeredPanel: HTMLElement;
  private readonly logPanel: HTMLElement;
  private readonly stackedPanel: HTMLElement;
  private readonly editorPanel: HTMLElement;
  private readonly header: HTMLElement;
  private lastRankings: RankingsResponse | null = null;
  private frameToken = 0;

  constructor(api: ConsoleApi, root: HTMLElement, options: { topK?: number } = {}) {
    this.api = api;
    this.topK = options.topK ?? 12;
    root.innerHTML = TEMPLATE;
    this.header = this.pick(root, '.console-header');
    this.spiralPanel = this.pick(root, '.panel-spiral');
    this.timelinePanel = this.pick(root, '.panel-timeline');
    this.layeredPanel = this.pick(root, '.panel-layered');
    this.logPanel = this.pick(root, '.panel-log');
    this.stackedPanel = this.pick(root, '.panel-stacked');
    this.editorPanel = this.pick(root, '.panel-editor');

    this.selection.onChange((state) => this.applyHighlights(state));
    this.player.onFrame = (entry) => this.beginFrame(entry);
    this.player.onStalePrompt = () => this.setRefreshPrompt(true);

    this.spiralPanel.addEventListener('click', (ev) => {
      const node = (ev.target as Element).closest('[data-key]');
      if (node) this.selection.selectSpiralNode(node.getAttribute('data-key') ?? '');
    });
    this.wireButton('.btn-prev', () => this.player.step(-1));
    this.wireButton('.btn-next', () => this.player.step(1));
    this.wireButton('.btn-play', () => this.player.play());
    this.wireButton('.btn-pause', () => this.player.pause());
    this.wireButton('.btn-clear', () => this.markCurrent('cleared'));
    this.wireButton('.btn-suspect', () => this.markCurrent('suspect'));
    this.wireButton('.btn-blacklist', () => this.markCurrent('blacklisted'));
    this.wireButton('.btn-refresh-accept', () => {
      this.setRefreshPrompt(false);
      this.player.acceptRefresh();
    });
    this.wireButton('.btn-refresh-dismiss', () => {
      this.setRefreshPrompt(false);
      this.player.dismissRefresh();
    });
  }

  get currentClient(): string | null {
    return this.player.current?.client_id ?? null;
  }

  /** Resolves once the most recent frame render settles. */
  idle(): Promise<void> {
    return this.loading;
  }

  async start(): Promise<void> {
    const [factors, layered, stacked, rankings] = await Promise.all([
      this.api.factors(),
      this.api.layered(),
      this.api.stackedBars(this.topK),
      this.api.rankings(),
    ]);
    this.draft = ConsoleConfigDraft.fromServer(factors);
    this.renderEditor();
    renderLayered(this.layeredPanel, layered, (employeeId, clientId) =>
      this.selection.selectLayeredEdge(employeeId, clientId),
    );
    renderStacked(this.stackedPanel, stacked);
    this.lastRankings = rankings;
    const manifest = await this.api.frames();
    this.player.load(manifest);
    await this.loading;
  }

  /**
   * Mark a client and pull fresh rankings so the stacked bars match the
   * server's order. The frame sequence is only refreshed through the
   * player's prompt, never silently.
   */
  async markStatus(clientId: string, status: ClientStatus): Promise<void> {
    try {
      await this.marker.mark(this.api, clientId, status);
    } catch (error) {
      this.showError(error);
      return;
    }
    this.showError(null);
    await this.refreshRankings();
    await this.player.checkForUpdates(this.api);
    this.renderBadge();
  }

  async submitDraft(): Promise<void> {
    if (!this.draft) return;
    const problems = this.draft.validate();
    if (problems.length) {
      showEditorErrors(this.editorPanel, problems);
      return;
    }
    try {
      await this.api.putFactors(this.draft.toPayload());
    } catch (error) {
      const message = error instanceof ApiError ? error.message : String(error);
      showEditorErrors(this.editorPanel, [message]);
      return;
    }
    this.draft = ConsoleConfigDraft.fromServer(await this.api.factors());
    this.renderEditor();
    await this.refreshRankings();
    await this.player.checkForUpdates(this.api);
  }

  private async refreshRankings(): Promise<void> {
    const [stacked, rankings] = await Promise.all([
      this.api.stackedBars(this.topK),
      this.api.rankings(),
    ]);
    this.lastRankings = rankings;
    renderStacked(this.stackedPanel, stacked);
  }

  private beginFrame(entry: FrameEntry): void {
    const token = ++this.frameToken;
    this.loading = this.loadFrame(entry, token).catch((error) => this.showError(error));
  }

  private async loadFrame(entry: FrameEntry, token: number): Promise<void> {
    const [layout, series, svg] = await Promise.all([
      this.api.layouts(entry.client_id),
      this.api.series(entry.client_id),
      this.api.frameSvg(entry.index),
    ]);
    if (token !== this.frameToken) return;
    this.selection.loadClient(layout, series.raw);
    embedFrame(this.spiralPanel, svg);
    renderTimeline(this.timelinePanel, layout.timeline, (key) => this.selection.selectLogRow(key));
    renderLog(this.logPanel, series.raw, (key) => this.selection.selectLogRow(key));
    this.renderHeader(entry);
  }

  private markCurrent(status: ClientStatus): void {
    const clientId = this.currentClient;
    if (clientId) void this.markStatus(clientId, status);
  }

  private renderEditor(): void {
    if (!this.draft) return;
    renderFactorsEditor(this.editorPanel, this.draft, { onSubmit: () => void this.submitDraft() });
  }

  private renderHeader(entry: FrameEntry): void {
    this.pick(this.header, '.frame-client').textContent = entry.client_id;
    this.pick(this.header, '.frame-score').textContent = entry.score_exact;
    this.pick(this.header, '.frame-position').textContent =
      `${this.player.frameIndex + 1}/${this.player.frameCount}`;
    this.renderBadge();
  }

  private renderBadge(): void {
    const badge = this.pick(this.header, '.status-badge');
    const clientId = this.currentClient;
    if (!clientId) {
      badge.textContent = '';
      badge.className = 'status-badge';
      return;
    }
    const status = this.marker.statusOf(clientId) ?? this.statusFromRanking(clientId) ?? 'cleared';
    badge.textContent = status;
    badge.className = `status-badge status-${status}`;
  }

  /** Read the status badge off the ranking payload's status factor. */
  private statusFromRanking(clientId: string): ClientStatus | null {
    const entry = this.lastRankings?.clients.find((c) => c.client_id === clientId);
    const factor = entry?.factors.find((f) => f.factor_id === 'client_status');
    if (!factor || factor.skipped) return null;
    if (factor.performance >= 2) return 'blacklisted';
    if (factor.performance === 1) return 'suspect';
    return 'cleared';
  }

  private applyHighlights(state: SelectionState): void {
    const mark = (panel: HTMLElement, keys: ReadonlySet<string>) => {
      for (const el of panel.querySelectorAll('[data-key]')) {
        el.classList.toggle('selected', keys.has(el.getAttribute('data-key') ?? ''));
      }
    };
    mark(this.spiralPanel, state.spiralKeys);
    mark(this.logPanel, state.logKeys);
    mark(this.timelinePanel, state.logKeys);
    for (const el of this.layeredPanel.querySelectorAll('[data-employee]')) {
      const hit =
        state.pair !== null &&
        el.getAttribute('data-employee') === state.pair.employeeId &&
        el.getAttribute('data-client') === state.pair.clientId;
      el.classList.toggle('selected', hit);
    }
    for (const el of this.stackedPanel.querySelectorAll('[data-client]')) {
      el.classList.toggle('selected', el.getAttribute('data-client') === state.clientId);
    }
  }

  private setRefreshPrompt(visible: boolean): void {
    const prompt = this.pick(this.header, '.refresh-prompt');
    if (visible) prompt.removeAttribute('hidden');
    else prompt.setAttribute('hidden', '');
  }

  private showError(error: unknown): void {
    const box = this.pick(this.header, '.console-error');
    if (error === null) {
      box.textContent = '';
      return;
    }
    box.textContent = error instanceof Error ? error.message : String(error);
  }

  private wireButton(selector: string, handler: () => void): void {
    this.pick(this.header, selector).addEventListener('click', handler);
  }

  private pick(scope: HTMLElement, selector: string): HTMLElement {
    const el = scope.querySelector(selector);
    if (!el) throw new Error(`missing console element ${selector}`);
    return el as HTMLElement;
  }
}
