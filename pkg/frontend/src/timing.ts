export type Clock = () => number;

/**
 * Stopwatch for one trial. Starts only when the caller declares the
 * stimuli rendered, so network time spent fetching SVGs never counts
 * toward the participant's response time.
 */
export class TrialTimer {
  private startedAt: number | null = null;

  constructor(private readonly now: Clock = () => Date.now()) {}

  start(): void {
    this.startedAt = this.now();
  }

  get running(): boolean {
    return this.startedAt !== null;
  }

  /** Seconds since start, at millisecond resolution. */
  elapsedSeconds(): number {
    if (this.startedAt === null) {
      throw new Error("timer read before stimuli rendered");
    }
    return Math.round(this.now() - this.startedAt) / 1000;
  }

  reset(): void {
    this.startedAt = null;
  }
}
