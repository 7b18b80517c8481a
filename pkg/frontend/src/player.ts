import type { FrameEntry, ManifestResponse } from './types.js';

const DEFAULT_INTERVAL_MS = 2500;

/**
 * Steps through the ranked frame sequence. When the server's manifest digest
 * moves away from the loaded one (re-rank after ingest, config change, or a
 * status mark) the player raises a refresh prompt; it never reorders frames
 * behind the auditor's back.
 */
export class FramePlayer {
  intervalMs = DEFAULT_INTERVAL_MS;
  onFrame: (entry: FrameEntry) => void = () => {};
  onStalePrompt: (fresh: ManifestResponse) => void = () => {};

  private manifest: ManifestResponse | null = null;
  private index = -1;
  private playing = false;
  private timer: ReturnType<typeof setInterval> | null = null;
  private pending: ManifestResponse | null = null;

  get current(): FrameEntry | null {
    if (!this.manifest || this.index < 0) return null;
    return this.manifest.frames[this.index] ?? null;
  }

  get frameIndex(): number {
    return this.index;
  }

  get frameCount(): number {
    return this.manifest ? this.manifest.frames.length : 0;
  }

  get digest(): string | null {
    return this.manifest ? this.manifest.digest : null;
  }

  get paused(): boolean {
    return !this.playing;
  }

  get refreshPending(): ManifestResponse | null {
    return this.pending;
  }

  load(manifest: ManifestResponse): void {
    this.pause();
    this.manifest = manifest;
    this.pending = null;
    this.index = manifest.frames.length ? 0 : -1;
    const entry = this.current;
    if (entry) this.onFrame(entry);
  }

  seek(index: number): void {
    if (!this.manifest || !this.manifest.frames.length) return;
    const clamped = Math.min(Math.max(index, 0), this.manifest.frames.length - 1);
    if (clamped === this.index) return;
    this.index = clamped;
    const entry = this.current;
    if (entry) this.onFrame(entry);
  }

  step(delta = 1): void {
    this.seek(this.index + delta);
  }

  play(): void {
    if (this.playing || !this.manifest || !this.manifest.frames.length) return;
    this.playing = true;
    this.timer = setInterval(() => this.tick(), this.intervalMs);
  }

  pause(): void {
    this.playing = false;
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  /**
   * Compare the server manifest against the loaded one. Returns "loaded"
   * on first load, "unchanged" when digests match, "stale" after arming the
   * refresh prompt.
   */
  async checkForUpdates(source: { frames(): Promise<ManifestResponse> }): Promise<'loaded' | 'unchanged' | 'stale'> {
    const fresh = await source.frames();
    if (!this.manifest) {
      this.load(fresh);
      return 'loaded';
    }
    if (fresh.digest === this.manifest.digest) {
      this.pending = null;
      return 'unchanged';
    }
    this.pending = fresh;
    this.onStalePrompt(fresh);
    return 'stale';
  }

  acceptRefresh(): void {
    if (this.pending) this.load(this.pending);
  }

  dismissRefresh(): void {
    this.pending = null;
  }

  private tick(): void {
    if (!this.manifest) return;
    if (this.index >= this.manifest.frames.length - 1) {
      this.pause();
      return;
    }
    this.step(1);
  }
}
