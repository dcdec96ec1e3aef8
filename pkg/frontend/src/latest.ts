/**
 * Ticket counter for last-request-wins rendering.
 *
 * Each fetch takes a ticket before it starts; when the response lands, the
 * result is applied only if no newer ticket has been issued since. A slow
 * response to an old request can therefore never overwrite a newer frame.
 */
export class LatestGate {
  private seq = 0;

  take(): number {
    this.seq += 1;
    return this.seq;
  }

  isCurrent(ticket: number): boolean {
    return ticket === this.seq;
  }
}
