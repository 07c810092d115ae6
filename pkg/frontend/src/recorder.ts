// The rating recorder: a saturating three-state chain driven by arrow keys,
// with instantaneous point-of-interest markers on the page keys.
//
// Timestamps come from the playback clock and are bucketed to 1 ms; a second
// change landing in the same bucket overwrites the first (last write wins),
// which keeps every exported stream strictly increasing no matter how fast
// the keys repeat.

import {
  EOI_NEGATIVE_CODE,
  EOI_POSITIVE_CODE,
  ImpactState,
  MarkerEvent,
  OrdinalEvent,
} from "./model.js";
import { ClockLike } from "./clock.js";

export type RatingKey = "ArrowUp" | "ArrowDown" | "PageUp" | "PageDown";

const BUCKET_S = 0.001;

function bucket(t: number): number {
  return Math.round(t / BUCKET_S);
}

export class RatingRecorder {
  private state: ImpactState = ImpactState.Neutral;
  private ordinals: OrdinalEvent[] = [];
  private markers: MarkerEvent[] = [];

  constructor(private readonly clock: ClockLike) {}

  get currentState(): ImpactState {
    return this.state;
  }

  get ordinalEvents(): readonly OrdinalEvent[] {
    return this.ordinals;
  }

  get markerEvents(): readonly MarkerEvent[] {
    return this.markers;
  }

  /** Handle one key press; unknown keys and presses while paused are ignored. */
  handleKey(key: string): boolean {
    if (!this.clock.isPlaying) return false;
    const t = this.clock.position();
    switch (key) {
      case "ArrowUp":
        return this.step(+1, t);
      case "ArrowDown":
        return this.step(-1, t);
      case "PageUp":
        this.mark(EOI_POSITIVE_CODE, t);
        return true;
      case "PageDown":
        this.mark(EOI_NEGATIVE_CODE, t);
        return true;
      default:
        return false;
    }
  }

  private step(direction: 1 | -1, t: number): boolean {
    const next = Math.max(-1, Math.min(1, this.state + direction)) as ImpactState;
    if (next === this.state) return false; // saturated: no event
    this.state = next;
    this.appendOrdinal({ t, state: next });
    return true;
  }

  private appendOrdinal(event: OrdinalEvent): void {
    const last = this.ordinals[this.ordinals.length - 1];
    if (last !== undefined && bucket(event.t) <= bucket(last.t)) {
      // same-millisecond collision: the latest change wins the bucket
      last.state = event.state;
      return;
    }
    this.ordinals.push(event);
  }

  private mark(code: MarkerEvent["code"], t: number): void {
    const last = this.markers[this.markers.length - 1];
    if (last !== undefined && bucket(t) <= bucket(last.t)) {
      last.code = code;
      return;
    }
    this.markers.push({ t, code });
  }

  /** Rewind support: discard everything recorded beyond the new position. */
  discardAfter(positionS: number): void {
    this.ordinals = this.ordinals.filter((e) => e.t <= positionS);
    this.markers = this.markers.filter((e) => e.t <= positionS);
    const last = this.ordinals[this.ordinals.length - 1];
    this.state = last !== undefined ? last.state : ImpactState.Neutral;
  }

  get isEmpty(): boolean {
    return this.ordinals.length === 0 && this.markers.length === 0;
  }
}
