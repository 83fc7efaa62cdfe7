/**
 * Message shapes for the newline-delimited JSON session protocol.
 *
 * Every outbound line is a command or a reset; every reply is a state or an
 * error message. The server answers each line with exactly one line.
 */

export type Side = "left" | "right" | "none";

export interface GrowCommand {
  Grow: { delta_len: number };
}

export interface SetTensionCommand {
  SetTension: { side: Side; tension: number };
}

export interface SetPressureCommand {
  SetPressure: { gauge: number };
}

export type Command = GrowCommand | SetTensionCommand | SetPressureCommand;

export interface CommandMessage {
  type: "command";
  seq: number;
  cmd: Command;
}

export interface ResetMessage {
  type: "reset";
  seq: number;
  pressure?: number;
  disturbance?: boolean;
  samples_per_mm?: number;
}

export type OutboundMessage = CommandMessage | ResetMessage;

export interface TensionState {
  side: Side;
  newtons: number;
}

export interface SnapshotPayload {
  centerline: [number, number][];
  lock_boundary_index: number;
  everted_len: number;
  pressure: number;
  tension: TensionState;
}

export interface SessionEvent {
  kind: string;
  at_len: number;
  arc_index?: number;
  p_min?: number;
}

export interface StateMessage {
  type: "state";
  seq: number | null;
  snapshot: SnapshotPayload;
  events: SessionEvent[];
}

export interface ErrorMessage {
  type: "error";
  seq: number | null;
  message: string;
}

export type InboundMessage = StateMessage | ErrorMessage;

export function growCommand(deltaLen: number): Command {
  return { Grow: { delta_len: deltaLen } };
}

export function tensionCommand(side: Side, tension: number): Command {
  return { SetTension: { side, tension } };
}

export function pressureCommand(gauge: number): Command {
  return { SetPressure: { gauge } };
}

export function encodeLine(message: OutboundMessage): string {
  return JSON.stringify(message);
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

function asSeq(value: unknown): number | null {
  if (value === null || value === undefined) {
    return null;
  }
  if (typeof value !== "number") {
    throw new Error(`reply seq is not a number: ${JSON.stringify(value)}`);
  }
  return value;
}

/** Parse one reply line, throwing on anything the server would never send. */
export function decodeLine(line: string): InboundMessage {
  let parsed: unknown;
  try {
    parsed = JSON.parse(line);
  } catch {
    throw new Error(`unparseable reply line: ${line}`);
  }
  if (!isRecord(parsed)) {
    throw new Error("reply is not an object");
  }
  const seq = asSeq(parsed.seq);
  if (parsed.type === "error") {
    if (typeof parsed.message !== "string") {
      throw new Error("error reply without a message");
    }
    return { type: "error", seq, message: parsed.message };
  }
  if (parsed.type === "state") {
    const snapshot = parsed.snapshot;
    if (!isRecord(snapshot) || !Array.isArray(snapshot.centerline)) {
      throw new Error("state reply without a snapshot");
    }
    if (typeof snapshot.lock_boundary_index !== "number") {
      throw new Error("snapshot without a lock boundary");
    }
    return {
      type: "state",
      seq,
      snapshot: snapshot as unknown as SnapshotPayload,
      events: Array.isArray(parsed.events)
        ? (parsed.events as SessionEvent[])
        : [],
    };
  }
  throw new Error(`unknown reply type: ${JSON.stringify(parsed.type)}`);
}
