/**
 * DOM wiring: canvas map on the left, chat panel on the right. Click the
 * map to walk there; type in the box to speak. Agent questions addressed
 * to your avatar are highlighted so you can answer them.
 */

import { SessionSocket } from "./client.js";
import { computeScene, fitViewport, paint, toWorld, type Viewport } from "./render.js";
import {
  applyMessage,
  applySaid,
  initialState,
  setStatus,
  type ClientState,
} from "./state.js";

const params = new URLSearchParams(location.search);
const url = params.get("server") ?? "ws://127.0.0.1:8765";

const canvas = document.getElementById("map") as HTMLCanvasElement;
const ctx = canvas.getContext("2d")!;
const chatLog = document.getElementById("chat-log")!;
const chatForm = document.getElementById("chat-form") as HTMLFormElement;
const chatInput = document.getElementById("chat-input") as HTMLInputElement;
const statusLine = document.getElementById("status")!;

let state: ClientState = initialState();
let view: Viewport | null = null;

function update(next: ClientState): void {
  const chatChanged = next.chat !== state.chat;
  state = next;
  statusLine.textContent =
    state.status === "connected"
      ? `${state.avatarName ?? "avatar"} @ ${url}`
      : `${state.status} (${url})`;
  statusLine.className = state.status;
  if (state.geometry && !view) {
    view = fitViewport(state.geometry.bounds, canvas.width, canvas.height);
  }
  if (view) {
    paint(ctx, view, computeScene(state, view));
  }
  if (chatChanged) {
    renderChat();
  }
}

function renderChat(): void {
  chatLog.replaceChildren(
    ...state.chat.slice(-80).map((entry) => {
      const row = document.createElement("div");
      row.className = `chat-row ${entry.kind}${entry.highlighted ? " question" : ""}`;
      const who = document.createElement("span");
      who.className = "who";
      who.textContent = entry.kind === "said" ? "you" : entry.speakerName;
      const text = document.createElement("span");
      text.textContent = entry.text;
      row.append(who, text);
      return row;
    }),
  );
  chatLog.scrollTop = chatLog.scrollHeight;
}

const socket = new SessionSocket(url, {
  onMessage: (msg) => update(applyMessage(state, msg)),
  onStatus: (status) => update(setStatus(state, status)),
});

canvas.addEventListener("click", (event) => {
  if (!view) {
    return;
  }
  const rect = canvas.getBoundingClientRect();
  const [wx, wy] = toWorld(view, event.clientX - rect.left, event.clientY - rect.top);
  socket.sendMoveTo(Math.round(wx * 100) / 100, Math.round(wy * 100) / 100);
});

chatForm.addEventListener("submit", (event) => {
  event.preventDefault();
  const text = chatInput.value.trim();
  if (!text) {
    return;
  }
  socket.sendSay(text);
  update(applySaid(state, text));
  chatInput.value = "";
});

socket.connect();
