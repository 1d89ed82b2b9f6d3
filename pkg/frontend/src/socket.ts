// WebSocket lifecycle: parse frames, retry with backoff, and let the app
// force a reconnect to fetch a fresh snapshot after a sequence gap.

import type { ClientCommand, ServerFrame } from "./protocol";

const RETRY_MIN_MS = 500;
const RETRY_MAX_MS = 5000;

export class MissionSocket {
  private ws: WebSocket | null = null;
  private closed = false;
  private retryMs = RETRY_MIN_MS;

  constructor(
    private url: string,
    private onFrame: (frame: ServerFrame) => void,
    private onStatus: (connected: boolean) => void,
  ) {}

  open(): void {
    if (this.closed) return;
    const ws = new WebSocket(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.retryMs = RETRY_MIN_MS;
      this.onStatus(true);
    };
    ws.onmessage = (msg) => {
      let frame: ServerFrame;
      try {
        frame = JSON.parse(msg.data as string);
      } catch {
        console.warn("dropping unparseable frame", msg.data);
        return;
      }
      this.onFrame(frame);
    };
    ws.onclose = () => {
      if (this.ws !== ws) return; // superseded by a reconnect
      this.ws = null;
      this.onStatus(false);
      if (!this.closed) {
        setTimeout(() => this.open(), this.retryMs);
        this.retryMs = Math.min(this.retryMs * 2, RETRY_MAX_MS);
      }
    };
    ws.onerror = () => ws.close();
  }

  // drop the connection; the retry path reopens it and the server answers
  // with a fresh snapshot, which resynchronizes the mirror
  reconnect(): void {
    this.ws?.close();
  }

  send(command: ClientCommand): boolean {
    if (this.ws === null || this.ws.readyState !== WebSocket.OPEN) return false;
    this.ws.send(JSON.stringify(command));
    return true;
  }

  close(): void {
    this.closed = true;
    this.ws?.close();
  }
}
