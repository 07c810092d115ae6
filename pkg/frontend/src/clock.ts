// Playback clock: the single source of truth for event timestamps.
//
// Position advances only while playing; pausing freezes it exactly, so no
// recorded event can carry a time beyond the paused position. Seeking is
// explicit and reported to listeners so the recorder can discard the future.

export type RealTimeSource = () => number; // seconds, monotonic

export class PlaybackClock {
  private playing = false;
  private basePosition = 0; // position when playback last started
  private baseReal = 0; // real time when playback last started
  private readonly realNow: RealTimeSource;

  constructor(realNow: RealTimeSource = () => performance.now() / 1000) {
    this.realNow = realNow;
  }

  get isPlaying(): boolean {
    return this.playing;
  }

  position(): number {
    if (!this.playing) {
      return this.basePosition;
    }
    return this.basePosition + (this.realNow() - this.baseReal);
  }

  play(): void {
    if (this.playing) return;
    this.baseReal = this.realNow();
    this.playing = true;
  }

  pause(): void {
    if (!this.playing) return;
    this.basePosition = this.position();
    this.playing = false;
  }

  seek(positionS: number): void {
    this.basePosition = Math.max(0, positionS);
    this.baseReal = this.realNow();
  }
}

// Adapter over an HTMLAudioElement: the element's own currentTime is the
// clock, so drift between audio and rating timestamps cannot accumulate.
export class AudioElementClock {
  constructor(private readonly audio: HTMLAudioElement) {}

  get isPlaying(): boolean {
    return !this.audio.paused && !this.audio.ended;
  }

  position(): number {
    return this.audio.currentTime;
  }
}

export interface ClockLike {
  readonly isPlaying: boolean;
  position(): number;
}
