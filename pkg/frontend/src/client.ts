/**
 * Session client: sequence numbers, reply routing, and the one-in-flight
 * rule. Each action type (grow, tension, pressure, reset) may have at most
 * one unanswered command on the wire; further attempts are dropped until the
 * matching reply lands.
 */
import {
  Command,
  ErrorMessage,
  InboundMessage,
  OutboundMessage,
  Side,
  StateMessage,
  decodeLine,
  encodeLine,
  growCommand,
  pressureCommand,
  tensionCommand,
} from "./protocol.js";

export type ActionKind = "grow" | "tension" | "pressure" | "reset";

export interface LineTransport {
  send(line: string): void;
}

export class SessionClient {
  onState: (message: StateMessage) => void = () => {};
  onError: (message: ErrorMessage) => void = () => {};

  private nextSeq = 1;
  private pending = new Map<ActionKind, number>();
  private kindBySeq = new Map<number, ActionKind>();

  constructor(private transport: LineTransport) {}

  canSend(kind: ActionKind): boolean {
    return !this.pending.has(kind);
  }

  pendingKinds(): ActionKind[] {
    return [...this.pending.keys()];
  }

  grow(deltaLen: number): boolean {
    return this.sendCommand("grow", growCommand(deltaLen));
  }

  setTension(side: Side, tension: number): boolean {
    return this.sendCommand("tension", tensionCommand(side, tension));
  }

  setPressure(gauge: number): boolean {
    return this.sendCommand("pressure", pressureCommand(gauge));
  }

  reset(options: Omit<OutboundMessage, "type" | "seq"> = {}): boolean {
    return this.send("reset", (seq) => ({ type: "reset", seq, ...options }));
  }

  private sendCommand(kind: ActionKind, cmd: Command): boolean {
    return this.send(kind, (seq) => ({ type: "command", seq, cmd }));
  }

  send(kind: ActionKind, build: (seq: number) => OutboundMessage): boolean {
    if (this.pending.has(kind)) {
      return false;
    }
    const seq = this.nextSeq++;
    this.pending.set(kind, seq);
    this.kindBySeq.set(seq, kind);
    this.transport.send(encodeLine(build(seq)));
    return true;
  }

  /** Route one raw reply line; frees the in-flight slot it answers. */
  handleLine(line: string): InboundMessage {
    const message = decodeLine(line);
    if (message.seq !== null) {
      const kind = this.kindBySeq.get(message.seq);
      this.kindBySeq.delete(message.seq);
      if (kind !== undefined && this.pending.get(kind) === message.seq) {
        this.pending.delete(kind);
      }
    }
    if (message.type === "state") {
      this.onState(message);
    } else {
      this.onError(message);
    }
    return message;
  }
}
