/**
 * DOM wiring for the steering panel: a canvas view of the deployed body, a
 * hold-to-grow button, tension and pressure controls, and an event log, all
 * speaking the line protocol over a WebSocket.
 */
import { SessionClient } from "./client.js";
import { GROW_STEP_MM, GrowLoop } from "./growloop.js";
import { Side } from "./protocol.js";
import { TARGET_COLOR, bodySegments, fitViewport, toCanvas } from "./render.js";
import {
  SceneState,
  applyConnection,
  applyError,
  applyState,
  initialScene,
} from "./scene.js";

function must<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

const canvas = must<HTMLCanvasElement>("view");
const growButton = must<HTMLButtonElement>("grow");
const leftButton = must<HTMLButtonElement>("pull-left");
const rightButton = must<HTMLButtonElement>("pull-right");
const releaseButton = must<HTMLButtonElement>("release");
const tensionSlider = must<HTMLInputElement>("tension");
const tensionLabel = must<HTMLSpanElement>("tension-label");
const pressureInput = must<HTMLInputElement>("pressure");
const pressureButton = must<HTMLButtonElement>("apply-pressure");
const resetButton = must<HTMLButtonElement>("reset");
const statusLine = must<HTMLDivElement>("status");
const errorLine = must<HTMLDivElement>("error");
const eventList = must<HTMLUListElement>("events");

let scene: SceneState = initialScene();
let socket: WebSocket | null = null;

const client = new SessionClient({
  send(line: string) {
    if (socket !== null && socket.readyState === WebSocket.OPEN) {
      socket.send(line);
    }
  },
});

client.onState = (message) => {
  scene = applyState(scene, message);
  refresh();
};
client.onError = (message) => {
  scene = applyError(scene, message);
  refresh();
};

function serverUrl(): string {
  const params = new URLSearchParams(window.location.search);
  const host = params.get("host") ?? (window.location.hostname || "127.0.0.1");
  const port = params.get("port") ?? "8765";
  return `ws://${host}:${port}`;
}

function connect(): void {
  const ws = new WebSocket(serverUrl());
  socket = ws;
  ws.onopen = () => {
    scene = applyConnection(scene, true);
    client.reset({});
    refresh();
  };
  ws.onmessage = (event) => {
    client.handleLine(String(event.data));
  };
  ws.onclose = () => {
    scene = applyConnection(scene, false);
    refresh();
    window.setTimeout(connect, 2000);
  };
}

const growLoop = new GrowLoop(() => {
  client.grow(GROW_STEP_MM);
});

growButton.addEventListener("pointerdown", () => growLoop.start());
for (const kind of ["pointerup", "pointerleave", "pointercancel"] as const) {
  growButton.addEventListener(kind, () => growLoop.stop());
}

function selectedTension(): number {
  return Number(tensionSlider.value);
}

leftButton.addEventListener("click", () => {
  sendTension("left");
});
rightButton.addEventListener("click", () => {
  sendTension("right");
});
releaseButton.addEventListener("click", () => {
  sendTension("none");
});
tensionSlider.addEventListener("input", () => {
  tensionLabel.textContent = `${selectedTension().toFixed(1)} N`;
});

function sendTension(side: Side): void {
  client.setTension(side, side === "none" ? 0 : selectedTension());
  refresh();
}

pressureButton.addEventListener("click", () => {
  const gauge = Number(pressureInput.value);
  if (Number.isFinite(gauge) && gauge > 0) {
    client.setPressure(gauge);
    refresh();
  }
});

resetButton.addEventListener("click", () => {
  client.reset({});
  refresh();
});

function describeStatus(): string {
  if (!scene.connected) {
    return "connecting…";
  }
  if (scene.snapshot === null) {
    return "connected";
  }
  const snap = scene.snapshot;
  const tension = snap.tension;
  const pull =
    tension.side === "none"
      ? "slack"
      : `${tension.newtons.toFixed(1)} N ${tension.side}`;
  return (
    `deployed ${snap.everted_len.toFixed(1)} mm | ` +
    `${snap.pressure.toFixed(1)} kPa | cable ${pull}`
  );
}

function refresh(): void {
  statusLine.textContent = describeStatus();
  errorLine.textContent = scene.lastError ?? "";
  growButton.disabled = !scene.connected;

  eventList.replaceChildren(
    ...scene.events.slice(-8).map((event) => {
      const item = document.createElement("li");
      let text = `${event.kind} at ${event.at_len.toFixed(1)} mm`;
      if (event.p_min !== undefined) {
        text += ` (holds to ${event.p_min.toFixed(2)} kPa)`;
      }
      item.textContent = text;
      return item;
    }),
  );
  draw();
}

function draw(): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) {
    return;
  }
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  if (scene.snapshot === null) {
    return;
  }
  const centerline = scene.snapshot.centerline;
  const viewport = fitViewport(centerline, canvas.width, canvas.height);

  ctx.lineCap = "round";
  ctx.lineJoin = "round";
  for (const segment of bodySegments(
    centerline,
    scene.snapshot.lock_boundary_index,
  )) {
    ctx.strokeStyle = segment.color;
    ctx.lineWidth = 8;
    ctx.beginPath();
    segment.points.forEach((point, i) => {
      const [x, y] = toCanvas(point, viewport);
      if (i === 0) {
        ctx.moveTo(x, y);
      } else {
        ctx.lineTo(x, y);
      }
    });
    ctx.stroke();
  }

  const [bx, by] = toCanvas(centerline[0], viewport);
  ctx.fillStyle = TARGET_COLOR;
  ctx.beginPath();
  ctx.arc(bx, by, 5, 0, 2 * Math.PI);
  ctx.fill();
}

connect();
refresh();
