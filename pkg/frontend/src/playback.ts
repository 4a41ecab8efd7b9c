/**
 * Temporal animation over a loaded frame set.
 *
 * Playback always starts at frame 0 (the whole-window aggregate, flagged
 * by the API) and then steps through the chronological frames. Seeking is
 * random access; pausing freezes the current index.
 */

export const BASE_FRAME_DELAY_MS = 800;

export class PlaybackController {
  frameIndex = 0;
  playing = false;
  speed = 1;
  private frameCount: number;
  private lastAdvanceMs: number | null = null;

  constructor(frameCount: number) {
    this.frameCount = Math.max(0, frameCount);
  }

  reset(frameCount: number): void {
    this.frameCount = Math.max(0, frameCount);
    this.frameIndex = 0;
    this.playing = false;
    this.lastAdvanceMs = null;
  }

  play(): void {
    if (this.frameCount === 0) return;
    // Restarting from the end rewinds to the aggregate frame.
    if (this.frameIndex >= this.frameCount - 1) this.frameIndex = 0;
    this.playing = true;
    this.lastAdvanceMs = null;
  }

  pause(): void {
    this.playing = false;
    this.lastAdvanceMs = null;
  }

  seek(index: number): void {
    if (this.frameCount === 0) return;
    this.frameIndex = Math.min(this.frameCount - 1, Math.max(0, index));
  }

  setSpeed(speed: number): void {
    this.speed = Math.max(0.1, speed);
  }

  private frameDelay(): number {
    return BASE_FRAME_DELAY_MS / this.speed;
  }

  /**
   * Advance if enough time passed; returns true when the frame changed.
   * Stops (paused) after presenting the final frame.
   */
  tick(nowMs: number): boolean {
    if (!this.playing || this.frameCount === 0) return false;
    if (this.lastAdvanceMs === null) {
      this.lastAdvanceMs = nowMs;
      return false;
    }
    if (nowMs - this.lastAdvanceMs < this.frameDelay()) return false;
    this.lastAdvanceMs = nowMs;
    if (this.frameIndex + 1 >= this.frameCount) {
      this.playing = false;
      return false;
    }
    this.frameIndex += 1;
    return true;
  }
}
