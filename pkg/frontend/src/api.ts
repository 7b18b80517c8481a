import type {
  ClientStatus,
  EmployeesResponse,
  ErrorEnvelope,
  EventsPage,
  FactorConfigEntry,
  FactorsResponse,
  IngestResponse,
  LayeredDoc,
  LayoutDoc,
  ManifestResponse,
  PutFactorsResponse,
  RankingsResponse,
  SeriesResponse,
  StackedDoc,
  StatusResponse,
} from './types.js';

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

/** Error raised for any non-2xx response; carries the service's envelope. */
export class ApiError extends Error {
  readonly status: number;
  readonly code: string;
  readonly detail: unknown;

  constructor(status: number, envelope: ErrorEnvelope) {
    super(envelope.message);
    this.name = 'ApiError';
    this.status = status;
    this.code = envelope.code;
    this.detail = envelope.detail;
  }
}

/**
 * Thin typed client for the fraudlens service. The console renders
 * exclusively from these payloads and computes no scores of its own.
 */
export class ConsoleApi {
  private readonly base: string;
  private readonly token: string | null;
  private readonly fetchImpl: FetchLike;

  constructor(base = '', options: { token?: string; fetchImpl?: FetchLike } = {}) {
    this.base = base.replace(/\/+$/, '');
    this.token = options.token ?? null;
    this.fetchImpl = options.fetchImpl ?? ((input, init) => fetch(input, init));
  }

  rankings(window?: string): Promise<RankingsResponse> {
    const suffix = window ? `?window=${encodeURIComponent(window)}` : '';
    return this.requestJson('GET', `/api/rankings/clients${suffix}`);
  }

  employees(): Promise<EmployeesResponse> {
    return this.requestJson('GET', '/api/rankings/employees');
  }

  series(clientId: string): Promise<SeriesResponse> {
    return this.requestJson('GET', `/api/clients/${encodeURIComponent(clientId)}/series`);
  }

  layouts(clientId: string): Promise<LayoutDoc> {
    return this.requestJson('GET', `/api/clients/${encodeURIComponent(clientId)}/layouts`);
  }

  layered(clients?: string[]): Promise<LayeredDoc> {
    const suffix = clients && clients.length ? `?clients=${encodeURIComponent(clients.join(','))}` : '';
    return this.requestJson('GET', `/api/layouts/layered${suffix}`);
  }

  stackedBars(k: number): Promise<StackedDoc> {
    return this.requestJson('GET', `/api/layouts/stacked-bars?k=${k}`);
  }

  frames(): Promise<ManifestResponse> {
    return this.requestJson('GET', '/api/frames');
  }

  async frameSvg(index: number): Promise<string> {
    const response = await this.send('GET', `/api/frames/${index}`);
    if (!response.ok) throw await this.toError(response);
    return response.text();
  }

  factors(): Promise<FactorsResponse> {
    return this.requestJson('GET', '/api/config/factors');
  }

  putFactors(payload: FactorConfigEntry[]): Promise<PutFactorsResponse> {
    return this.requestJson('PUT', '/api/config/factors', payload);
  }

  setStatus(clientId: string, status: ClientStatus, actor = 'console'): Promise<StatusResponse> {
    return this.requestJson('POST', `/api/clients/${encodeURIComponent(clientId)}/status`, {
      status,
      actor,
    });
  }

  ingest(events: object[]): Promise<IngestResponse> {
    return this.requestJson('POST', '/api/ingest', { events });
  }

  events(filter = '', page = 0, pageSize?: number): Promise<EventsPage> {
    const params = new URLSearchParams({ filter, page: String(page) });
    if (pageSize !== undefined) params.set('page_size', String(pageSize));
    return this.requestJson('GET', `/api/events?${params.toString()}`);
  }

  private async requestJson<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.send(method, path, body);
    if (!response.ok) throw await this.toError(response);
    return (await response.json()) as T;
  }

  private send(method: string, path: string, body?: unknown): Promise<Response> {
    const headers: Record<string, string> = {};
    if (this.token) headers['Authorization'] = `Bearer ${this.token}`;
    const init: RequestInit = { method, headers };
    if (body !== undefined) {
      headers['Content-Type'] = 'application/json';
      init.body = JSON.stringify(body);
    }
    return this.fetchImpl(this.base + path, init);
  }

  private async toError(response: Response): Promise<ApiError> {
    let envelope: ErrorEnvelope;
    try {
      envelope = (await response.json()) as ErrorEnvelope;
    } catch {
      envelope = { code: `http_${response.status}`, message: response.statusText, detail: null };
    }
    return new ApiError(response.status, envelope);
  }
}
