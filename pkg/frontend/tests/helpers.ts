import { readFileSync } from 'node:fs';
import { resolve } from 'node:path';
import { ConsoleApi, type FetchLike } from '../src/api.js';
import { AuditorConsole } from '../src/console.js';
import type {
  FactorsResponse,
  LayeredDoc,
  LayoutDoc,
  ManifestResponse,
  RankingsResponse,
  SeriesResponse,
  StackedDoc,
} from '../src/types.js';

export interface ServiceState {
  rankings: RankingsResponse;
  stacked: StackedDoc;
  manifest: ManifestResponse;
}

export interface ConsoleFixture {
  before: ServiceState;
  after: ServiceState;
  blacklist_target: string;
  top_client: string;
  layouts: LayoutDoc;
  layered: LayeredDoc;
  series: SeriesResponse;
  frame_svg: string;
  factors: FactorsResponse;
}

export function loadFixture(): ConsoleFixture {
  const path = resolve(process.cwd(), 'tests/fixtures/console.json');
  return JSON.parse(readFileSync(path, 'utf-8')) as ConsoleFixture;
}

function json(data: unknown, status = 200): Response {
  return new Response(JSON.stringify(data), {
    status,
    headers: { 'Content-Type': 'application/json' },
  });
}

function envelope(status: number, code: string, message: string): Response {
  return json({ code, message, detail: null }, status);
}

const STATUSES = ['cleared', 'suspect', 'blacklisted'];

/**
 * In-memory stand-in for the fraudlens service, replaying payloads the real
 * service produced. Blacklisting the fixture target swaps the replayed
 * snapshot from "before" to "after"; any other status swaps it back, which
 * matches how the recorder derived the two snapshots.
 */
export class FakeService {
  state: 'before' | 'after' = 'before';
  failStatusWith: number | null = null;
  statusCalls: Array<{ clientId: string; status: string }> = [];
  putFactorCalls: unknown[] = [];

  private readonly fx: ConsoleFixture;
  private configDigest: string;

  constructor(fx: ConsoleFixture) {
    this.fx = fx;
    this.configDigest = fx.factors.config_digest;
  }

  get fetch(): FetchLike {
    return (input, init) => this.handle(input, init);
  }

  private snapshot(): ServiceState {
    return this.state === 'before' ? this.fx.before : this.fx.after;
  }

  private async handle(input: string, init?: RequestInit): Promise<Response> {
    const method = (init?.method ?? 'GET').toUpperCase();
    const url = new URL(input, 'http://fake.test');
    const path = url.pathname;

    if (method === 'GET' && path === '/api/rankings/clients') return json(this.snapshot().rankings);
    if (method === 'GET' && path === '/api/frames') return json(this.snapshot().manifest);
    const frame = path.match(/^\/api\/frames\/(\d+)$/);
    if (method === 'GET' && frame) {
      const index = Number(frame[1]);
      if (index >= this.snapshot().manifest.frames.length) {
        return envelope(404, 'not_found', `no frame ${index}`);
      }
      return new Response(this.fx.frame_svg, {
        status: 200,
        headers: { 'Content-Type': 'image/svg+xml' },
      });
    }
    if (method === 'GET' && path === '/api/layouts/layered') return json(this.fx.layered);
    if (method === 'GET' && path === '/api/layouts/stacked-bars') {
      return json(this.snapshot().stacked);
    }
    if (method === 'GET' && path === '/api/config/factors') {
      return json({ config_digest: this.configDigest, factors: this.fx.factors.factors });
    }
    if (method === 'PUT' && path === '/api/config/factors') {
      this.putFactorCalls.push(JSON.parse(String(init?.body ?? 'null')));
      this.configDigest = `${this.fx.factors.config_digest}-v${this.putFactorCalls.length}`;
      return json({
        config_digest: this.configDigest,
        manifest_digest: this.snapshot().manifest.digest,
      });
    }
    const layouts = path.match(/^\/api\/clients\/([^/]+)\/layouts$/);
    if (method === 'GET' && layouts) {
      if (layouts[1] !== this.fx.top_client) {
        return envelope(404, 'not_found', `no layouts fixture for ${layouts[1]}`);
      }
      return json(this.fx.layouts);
    }
    const series = path.match(/^\/api\/clients\/([^/]+)\/series$/);
    if (method === 'GET' && series) {
      if (series[1] !== this.fx.top_client) {
        return envelope(404, 'not_found', `no series fixture for ${series[1]}`);
      }
      return json(this.fx.series);
    }
    const status = path.match(/^\/api\/clients\/([^/]+)\/status$/);
    if (method === 'POST' && status) {
      const clientId = status[1] as string;
      if (this.failStatusWith !== null) {
        const code = this.failStatusWith;
        this.failStatusWith = null;
        return envelope(code, 'rejected', 'status change rejected');
      }
      const body = JSON.parse(String(init?.body ?? '{}')) as { status?: string };
      if (!body.status || !STATUSES.includes(body.status)) {
        return envelope(400, 'invalid_status', `unknown status ${body.status}`);
      }
      if (!this.fx.layered.clients.some((c) => c.id === clientId)) {
        return envelope(404, 'not_found', `unknown client ${clientId}`);
      }
      this.statusCalls.push({ clientId, status: body.status });
      if (clientId === this.fx.blacklist_target) {
        this.state = body.status === 'blacklisted' ? 'after' : 'before';
      }
      const snap = this.snapshot();
      return json({
        client_id: clientId,
        status: body.status,
        ranking: snap.rankings.clients.find((c) => c.client_id === clientId) ?? null,
        rankings_digest: snap.rankings.digest,
        manifest_digest: snap.manifest.digest,
      });
    }
    return envelope(404, 'not_found', `no route ${method} ${path}`);
  }
}

export interface ConsoleHarness {
  fx: ConsoleFixture;
  service: FakeService;
  api: ConsoleApi;
  ui: AuditorConsole;
  root: HTMLElement;
}

/** Boot a console against the fake service and wait for the first frame. */
export async function makeConsole(): Promise<ConsoleHarness> {
  const fx = loadFixture();
  const service = new FakeService(fx);
  const api = new ConsoleApi('', { fetchImpl: service.fetch });
  const root = document.createElement('div');
  document.body.appendChild(root);
  const ui = new AuditorConsole(api, root, { topK: 10 });
  await ui.start();
  return { fx, service, api, ui, root };
}

export function click(el: Element): void {
  el.dispatchEvent(new MouseEvent('click', { bubbles: true }));
}

export function selectedKeys(panel: Element): string[] {
  return [...panel.querySelectorAll('[data-key].selected')].map(
    (el) => el.getAttribute('data-key') ?? '',
  );
}
