// Fixed-capacity telemetry history for the strip charts. Capacity is hard:
// pushing the (N+1)th tick evicts the oldest. Timestamps must be monotone
// within the buffer; an out-of-order tick (harness restart / replay wrap)
// clears the history and starts over rather than corrupting the charts.

export class RingBuffer<T extends { time_s: number }> {
  private buf: T[];
  private head = 0;     // next write position
  private count = 0;
  readonly capacity: number;

  constructor(capacity = 1200) {
    if (capacity <= 0) throw new Error("capacity must be positive");
    this.capacity = capacity;
    this.buf = new Array<T>(capacity);
  }

  get length(): number {
    return this.count;
  }

  last(): T | undefined {
    if (this.count === 0) return undefined;
    return this.buf[(this.head - 1 + this.capacity) % this.capacity];
  }

  push(item: T): void {
    const newest = this.last();
    if (newest !== undefined && item.time_s <= newest.time_s) {
      this.clear();  // time went backwards: resync from here
    }
    this.buf[this.head] = item;
    this.head = (this.head + 1) % this.capacity;
    if (this.count < this.capacity) this.count++;
  }

  clear(): void {
    this.head = 0;
    this.count = 0;
    this.buf = new Array<T>(this.capacity);
  }

  /** Oldest-to-newest snapshot. */
  toArray(): T[] {
    const out: T[] = [];
    const start = (this.head - this.count + this.capacity) % this.capacity;
    for (let i = 0; i < this.count; i++) {
      out.push(this.buf[(start + i) % this.capacity]);
    }
    return out;
  }

  /** At most maxPoints samples for drawing; always includes the newest. */
  decimate(maxPoints: number): T[] {
    const all = this.toArray();
    if (all.length <= maxPoints) return all;
    const stride = Math.ceil(all.length / maxPoints);
    const out: T[] = [];
    for (let i = 0; i < all.length; i += stride) out.push(all[i]);
    if (out[out.length - 1] !== all[all.length - 1]) {
      out.push(all[all.length - 1]);
    }
    return out;
  }
}
