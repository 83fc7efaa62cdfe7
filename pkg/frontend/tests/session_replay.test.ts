import { describe, expect, it } from "vitest";

import { SessionClient } from "../src/client.js";
import { Side } from "../src/protocol.js";
import { bodySegments, LOCKED_COLOR, UNLOCKED_COLOR } from "../src/render.js";
import { applyError, applyState, initialScene } from "../src/scene.js";
import fixture from "./fixtures/three_bend_session.json";

/**
 * Re-drive the recorded session through the client and check that the UI
 * would have sent byte-equivalent messages and ends on the same picture.
 */
describe("recorded session replay", () => {
  it("client reproduces the transcript and the final scene", () => {
    const sent: string[] = [];
    const client = new SessionClient({ send: (line) => sent.push(line) });
    let scene = initialScene();
    client.onState = (message) => {
      scene = applyState(scene, message);
    };
    client.onError = (message) => {
      scene = applyError(scene, message);
    };

    for (const entry of fixture.transcript) {
      const message = entry.sent as any;
      let ok: boolean;
      if (message.type === "reset") {
        const { type, seq, ...options } = message;
        ok = client.reset(options);
      } else if ("Grow" in message.cmd) {
        ok = client.grow(message.cmd.Grow.delta_len);
      } else if ("SetTension" in message.cmd) {
        ok = client.setTension(
          message.cmd.SetTension.side as Side,
          message.cmd.SetTension.tension,
        );
      } else {
        ok = client.setPressure(message.cmd.SetPressure.gauge);
      }
      expect(ok).toBe(true);
      expect(JSON.parse(sent[sent.length - 1])).toEqual(message);
      client.handleLine(JSON.stringify(entry.received));
    }

    const finalSnapshot =
      fixture.transcript[fixture.transcript.length - 1].received.snapshot!;
    expect(scene.snapshot).toEqual(finalSnapshot);
    expect(scene.lastError).toBeNull();

    const segments = bodySegments(
      scene.snapshot!.centerline as [number, number][],
      scene.snapshot!.lock_boundary_index,
    );
    expect(segments.map((s) => s.color)).toEqual([LOCKED_COLOR, UNLOCKED_COLOR]);
    expect(segments[0].points).toHaveLength(
      finalSnapshot.lock_boundary_index as number,
    );
  });
});
