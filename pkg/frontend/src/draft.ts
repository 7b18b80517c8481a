import type { FactorConfigEntry, FactorsResponse } from './types.js';

export interface DraftFactor {
  factorId: string;
  rankPosition: number;
  thresholds: Record<string, unknown>;
  enabled: boolean;
}

/** Console-local view toggles and playback state; never sent to the server. */
export interface ConsoleToggles {
  colorByEmployee: boolean;
  sourceShapes: boolean;
  filterExpression: string;
  playback: { index: number; paused: boolean };
}

/**
 * Editable copy of the factor configuration plus console toggles. The draft
 * validates client side before any PUT; the server remains the authority and
 * its rejections are surfaced inline by the console.
 */
export class ConsoleConfigDraft {
  factors: DraftFactor[];
  toggles: ConsoleToggles;

  constructor(factors: DraftFactor[], toggles?: Partial<ConsoleToggles>) {
    this.factors = factors;
    this.toggles = {
      colorByEmployee: false,
      sourceShapes: true,
      filterExpression: '',
      playback: { index: 0, paused: true },
      ...toggles,
    };
  }

  static fromServer(response: FactorsResponse): ConsoleConfigDraft {
    return new ConsoleConfigDraft(
      response.factors.map((f) => ({
        factorId: f.factor_id,
        rankPosition: f.rank_position,
        thresholds: { ...f.thresholds },
        enabled: f.enabled,
      })),
    );
  }

  /** Human-readable problems; empty means the draft may be submitted. */
  validate(): string[] {
    const errors: string[] = [];
    const seen = new Set<string>();
    for (const factor of this.factors) {
      if (seen.has(factor.factorId)) errors.push(`duplicate factor ${factor.factorId}`);
      seen.add(factor.factorId);
      if (!Number.isInteger(factor.rankPosition)) {
        errors.push(`${factor.factorId}: rank must be an integer`);
      }
      errors.push(...this.thresholdErrors(factor));
    }
    const enabled = this.factors.filter((f) => f.enabled);
    const ranks = enabled.map((f) => f.rankPosition).sort((a, b) => a - b);
    const expected = enabled.map((_, i) => i + 1);
    if (ranks.some((rank, i) => rank !== expected[i])) {
      errors.push(`enabled ranks must be exactly 1..${enabled.length} (got ${ranks.join(', ')})`);
    }
    return errors;
  }

  toPayload(): FactorConfigEntry[] {
    return this.factors.map((f) => ({
      factor_id: f.factorId,
      rank_position: f.rankPosition,
      thresholds: { ...f.thresholds },
      enabled: f.enabled,
    }));
  }

  private thresholdErrors(factor: DraftFactor): string[] {
    const errors: string[] = [];
    for (const [key, value] of Object.entries(factor.thresholds)) {
      if (typeof value === 'boolean' || typeof value === 'string') continue;
      if (typeof value !== 'number' || !Number.isFinite(value)) {
        errors.push(`${factor.factorId}.${key}: must be a finite number`);
        continue;
      }
      if (value < 0) errors.push(`${factor.factorId}.${key}: must not be negative`);
      if (key === 'min_support' && (value <= 0 || value > 1)) {
        errors.push(`${factor.factorId}.min_support: must be in (0, 1]`);
      }
    }
    return errors;
  }
}
