/**
 * Scene state and its reducers. The draw loop renders whatever is here; all
 * updates are pure so tests can replay a transcript and inspect the result.
 */
import {
  ErrorMessage,
  SessionEvent,
  SnapshotPayload,
  StateMessage,
} from "./protocol.js";

export const EVENT_LOG_LIMIT = 50;

export interface SceneState {
  snapshot: SnapshotPayload | null;
  events: SessionEvent[];
  lastError: string | null;
  connected: boolean;
}

export function initialScene(): SceneState {
  return { snapshot: null, events: [], lastError: null, connected: false };
}

export function applyState(scene: SceneState, message: StateMessage): SceneState {
  const events = [...scene.events, ...message.events].slice(-EVENT_LOG_LIMIT);
  return { ...scene, snapshot: message.snapshot, events, lastError: null };
}

export function applyError(scene: SceneState, message: ErrorMessage): SceneState {
  return { ...scene, lastError: message.message };
}

export function applyConnection(scene: SceneState, connected: boolean): SceneState {
  return { ...scene, connected };
}
