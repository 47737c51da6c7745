/** Trailing debounce with single-flight execution: rapid calls collapse to
 * the latest arguments, and at most one request is in flight; a call landing
 * mid-flight queues exactly one follow-up with the newest arguments. */

export interface DebouncedAsync<A> {
  (args: A): void;
  flush(): Promise<void>;
  inFlight(): boolean;
  pendingTimer(): boolean;
}

export function debounceAsync<A>(
  fn: (args: A) => Promise<void>,
  waitMs: number,
  schedule: (cb: () => void, ms: number) => unknown = setTimeout,
  cancel: (handle: unknown) => void = (h) => clearTimeout(h as never),
): DebouncedAsync<A> {
  let timer: unknown = null;
  let latest: A | null = null;
  let running = false;
  let queued = false;
  let settled: (() => void)[] = [];

  async function run(): Promise<void> {
    if (running) {
      queued = true;
      return;
    }
    running = true;
    try {
      while (latest !== null) {
        const args = latest;
        latest = null;
        queued = false;
        await fn(args);
        if (!queued) break;
      }
    } finally {
      running = false;
      const done = settled;
      settled = [];
      done.forEach((r) => r());
    }
  }

  const wrapped = ((args: A) => {
    latest = args;
    if (timer !== null) cancel(timer);
    timer = schedule(() => {
      timer = null;
      void run();
    }, waitMs);
  }) as DebouncedAsync<A>;

  wrapped.flush = () =>
    new Promise<void>((resolve) => {
      if (timer !== null) {
        cancel(timer);
        timer = null;
        settled.push(resolve);
        void run();
      } else if (running) {
        settled.push(resolve);
      } else {
        resolve();
      }
    });
  wrapped.inFlight = () => running;
  wrapped.pendingTimer = () => timer !== null;
  return wrapped;
}
