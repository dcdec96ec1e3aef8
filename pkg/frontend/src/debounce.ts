export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  cancel(): void;
  flush(): void;
}

/**
 * Trailing-edge debounce. The wrapped function runs once the caller has been
 * quiet for `delayMs`; intermediate calls only reset the timer.
 */
export function debounce<A extends unknown[]>(fn: (...args: A) => void, delayMs = 150): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | undefined;
  let pending: A | undefined;

  const wrapped = (...args: A): void => {
    pending = args;
    if (timer !== undefined) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = undefined;
      const args2 = pending as A;
      pending = undefined;
      fn(...args2);
    }, delayMs);
  };

  wrapped.cancel = (): void => {
    if (timer !== undefined) clearTimeout(timer);
    timer = undefined;
    pending = undefined;
  };

  wrapped.flush = (): void => {
    if (timer === undefined) return;
    clearTimeout(timer);
    timer = undefined;
    const args = pending as A;
    pending = undefined;
    fn(...args);
  };

  return wrapped;
}
