/**
 * WebSocket session wrapper: joins on open, reconnects with backoff after
 * a drop (sending a fresh join), and funnels every frame through the
 * protocol parser. All outgoing traffic goes through the three command
 * builders; there is no other way to write to the socket.
 */

import {
  encodeCommand,
  joinCommand,
  moveToCommand,
  parseServerMessage,
  sayCommand,
  type ServerMessage,
} from "./protocol.js";

export interface SessionCallbacks {
  onMessage(msg: ServerMessage): void;
  onStatus(status: "connecting" | "connected" | "closed"): void;
}

export class SessionSocket {
  private socket: WebSocket | null = null;
  private retryMs = 1000;
  private closed = false;

  constructor(
    private readonly url: string,
    private readonly callbacks: SessionCallbacks,
  ) {}

  connect(): void {
    this.callbacks.onStatus("connecting");
    this.socket = new WebSocket(this.url);
    this.socket.addEventListener("open", () => {
      this.retryMs = 1000;
      this.callbacks.onStatus("connected");
      this.socket?.send(encodeCommand(joinCommand()));
    });
    this.socket.addEventListener("message", (event) => {
      const msg = parseServerMessage(String(event.data));
      if (msg !== null) {
        this.callbacks.onMessage(msg);
      }
    });
    this.socket.addEventListener("close", () => {
      this.callbacks.onStatus("closed");
      if (!this.closed) {
        setTimeout(() => this.connect(), this.retryMs);
        this.retryMs = Math.min(this.retryMs * 2, 30_000);
      }
    });
  }

  sendMoveTo(x: number, y: number): void {
    this.socket?.send(encodeCommand(moveToCommand(x, y)));
  }

  sendSay(text: string): void {
    this.socket?.send(encodeCommand(sayCommand(text)));
  }

  close(): void {
    this.closed = true;
    this.socket?.close();
  }
}
