import { describe, expect, it } from "vitest";

import {
  decodeLine,
  encodeLine,
  growCommand,
  pressureCommand,
  tensionCommand,
} from "../src/protocol.js";

describe("command builders", () => {
  it("shape the tagged payloads the server expects", () => {
    expect(growCommand(10)).toEqual({ Grow: { delta_len: 10 } });
    expect(tensionCommand("left", 7.5)).toEqual({
      SetTension: { side: "left", tension: 7.5 },
    });
    expect(pressureCommand(9)).toEqual({ SetPressure: { gauge: 9 } });
  });

  it("encode to a single JSON line", () => {
    const line = encodeLine({ type: "command", seq: 3, cmd: growCommand(10) });
    expect(JSON.parse(line)).toEqual({
      type: "command",
      seq: 3,
      cmd: { Grow: { delta_len: 10 } },
    });
    expect(line.includes("\n")).toBe(false);
  });
});

describe("decodeLine", () => {
  it("parses a state reply", () => {
    const reply = decodeLine(
      JSON.stringify({
        type: "state",
        seq: 4,
        snapshot: {
          centerline: [
            [0, 0],
            [10, 0],
          ],
          lock_boundary_index: 1,
          everted_len: 10,
          pressure: 7,
          tension: { side: "none", newtons: 0 },
        },
        events: [{ kind: "tension_capped", at_len: 10 }],
      }),
    );
    expect(reply.type).toBe("state");
    if (reply.type === "state") {
      expect(reply.snapshot.everted_len).toBe(10);
      expect(reply.events).toHaveLength(1);
    }
  });

  it("parses an error reply with a null seq", () => {
    const reply = decodeLine(
      JSON.stringify({ type: "error", seq: null, message: "invalid JSON" }),
    );
    expect(reply).toEqual({ type: "error", seq: null, message: "invalid JSON" });
  });

  it("rejects lines the server would never send", () => {
    expect(() => decodeLine("{oops")).toThrow(/unparseable/);
    expect(() => decodeLine("[1,2]")).toThrow(/not an object/);
    expect(() => decodeLine('{"type":"telemetry"}')).toThrow(/unknown reply/);
    expect(() => decodeLine('{"type":"state","seq":1}')).toThrow(/snapshot/);
    expect(() => decodeLine('{"type":"error","seq":1}')).toThrow(/message/);
  });
});
