/** Rate limiter for drag updates: fires immediately when idle, then at most
 * once per `waitMs` during sustained calls, with a trailing fire so the last
 * position always lands. At 100 ms this caps requests at 10 per second. */

export interface Debounced {
  call: () => void;
  cancel: () => void;
  flush: () => void;
}

export function debounce(fn: () => void, waitMs: number): Debounced {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let lastFire = Number.NEGATIVE_INFINITY;
  const fire = () => {
    timer = null;
    lastFire = Date.now();
    fn();
  };
  const clear = () => {
    if (timer !== null) {
      clearTimeout(timer);
      timer = null;
    }
  };
  return {
    call: () => {
      const wait = Math.max(0, waitMs - (Date.now() - lastFire));
      clear();
      timer = setTimeout(fire, wait);
    },
    cancel: clear,
    flush: () => {
      if (timer !== null) {
        clear();
        fire();
      }
    },
  };
}
