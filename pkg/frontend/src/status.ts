import type { ConsoleApi } from './api.js';
import type { ClientStatus, StatusResponse } from './types.js';

/**
 * Optimistic status badges with server reconciliation: the badge flips
 * immediately, the POST confirms it, and a rejection rolls it back.
 */
export class StatusMarker {
  private statuses = new Map<string, ClientStatus>();

  statusOf(clientId: string): ClientStatus | undefined {
    return this.statuses.get(clientId);
  }

  /** Seed a badge from a payload without touching the server. */
  prime(clientId: string, status: ClientStatus): void {
    this.statuses.set(clientId, status);
  }

  async mark(api: ConsoleApi, clientId: string, status: ClientStatus): Promise<StatusResponse> {
    const previous = this.statuses.get(clientId);
    this.statuses.set(clientId, status);
    try {
      const response = await api.setStatus(clientId, status);
      this.statuses.set(clientId, response.status);
      return response;
    } catch (error) {
      if (previous === undefined) this.statuses.delete(clientId);
      else this.statuses.set(clientId, previous);
      throw error;
    }
  }
}
