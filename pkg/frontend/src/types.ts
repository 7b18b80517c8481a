/** Payload shapes of the fraudlens HTTP API, mirrored from docs/formats.md. */

export interface EventRecord {
  timestamp: string;
  employee_id: string;
  client_id: string;
  action: string;
  source_system: string;
  key: string;
}

export interface FactorScoreEntry {
  factor_id: string;
  performance: number;
  severity: 'low' | 'medium' | 'high';
  skipped: boolean;
  explanation: string;
}

export interface ClientRankingEntry {
  client_id: string;
  score: number;
  score_exact: string;
  factors: FactorScoreEntry[];
  weights: Record<string, string>;
}

export interface RankingsResponse {
  window: { start: string; end: string } | null;
  config_digest: string;
  digest: string;
  clients: ClientRankingEntry[];
}

export interface EmployeeRankingEntry {
  employee_id: string;
  score: number;
  score_exact: string;
  contributing_client: string | null;
  mode: string;
}

export interface EmployeesResponse {
  digest: string;
  employees: EmployeeRankingEntry[];
}

export interface FrameEntry {
  client_id: string;
  score: number;
  score_exact: string;
  path: string | null;
  layout_digest: string | null;
  index: number;
}

export interface ManifestResponse {
  window: { start: string; end: string } | null;
  config_digest: string;
  digest: string;
  frames: FrameEntry[];
}

export interface SpiralNode {
  event: Omit<EventRecord, 'key'>;
  event_key: string;
  angle: number;
  radius: number;
  branch: number;
  day_index: number;
  shape: string;
  color: string;
  color_key: string;
}

export interface SpiralBranch {
  index: number;
  label: string;
  r_start: number;
  r_end: number;
}

export interface SectorRegion {
  kind: 'radial_cluster' | 'billing_window';
  day_start: number;
  day_end: number;
  start_angle: number;
  end_angle: number;
}

export interface SpiralDoc {
  client_id: string;
  mode: string;
  period_days: number;
  r0: number;
  dr: number;
  excluded: number;
  ticks: number[];
  branches: SpiralBranch[];
  regions: SectorRegion[];
  nodes: SpiralNode[];
}

export type TimelineBand = 'in_shift' | 'end_of_shift' | 'outside_hours';

export interface TimelineDay {
  date: string;
  bands: Record<TimelineBand, Omit<EventRecord, 'key'>[]>;
  boxed: boolean;
  all_red: boolean;
  event_keys: Record<TimelineBand, string[]>;
}

export interface TimelineDoc {
  client_id: string;
  days: TimelineDay[];
  edges: [string, string][];
}

export interface LeastSquaresDoc {
  slope: number;
  intercept: number;
  rmse: number;
  phase_shift: number;
  periodic: boolean;
  n: number;
}

export interface PeriodDoc {
  period_days: number | null;
  support: number | null;
  gaps: number[];
}

export interface LayoutDoc {
  client_id: string;
  period: PeriodDoc;
  spiral: SpiralDoc;
  timeline: TimelineDoc;
  regions: SectorRegion[];
  least_squares: LeastSquaresDoc | null;
}

export interface LayeredNode {
  id: string;
  x: number;
  color: string;
}

export interface LayeredEdge {
  employee_id: string;
  client_id: string;
  count: number;
  thickness: number;
}

export interface LayeredDoc {
  employees: LayeredNode[];
  clients: LayeredNode[];
  edges: LayeredEdge[];
}

export interface StackedSegment {
  factor_id: string;
  performance: number;
  length: number;
  length_exact: string;
}

export interface StackedBar {
  client_id: string;
  score: number;
  score_exact: string;
  segments: StackedSegment[];
}

export interface StackedDoc {
  bars: StackedBar[];
}

export interface SeriesResponse {
  client_id: string;
  raw_count: number;
  dedup_count: number;
  raw: EventRecord[];
  dedup: EventRecord[];
}

export interface FactorConfigEntry {
  factor_id: string;
  rank_position: number;
  thresholds: Record<string, unknown>;
  enabled: boolean;
}

export interface FactorsResponse {
  config_digest: string;
  factors: FactorConfigEntry[];
}

export interface PutFactorsResponse {
  config_digest: string;
  manifest_digest: string;
}

export type ClientStatus = 'cleared' | 'suspect' | 'blacklisted';

export interface StatusResponse {
  client_id: string;
  status: ClientStatus;
  ranking: ClientRankingEntry | null;
  rankings_digest: string;
  manifest_digest: string;
}

export interface IngestResponse {
  accepted: number;
  duplicates: number;
  manifest_digest: string;
  top: string[];
}

export interface EventsPage {
  total: number;
  page: number;
  page_size: number;
  events: Omit<EventRecord, 'key'>[];
}

export interface ErrorEnvelope {
  code: string;
  message: string;
  detail: unknown;
}
