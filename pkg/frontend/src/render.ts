/**
 * Top-down scene construction. `computeScene` is a pure function from
 * client state to a draw-op list, so rendering can be tested without a
 * canvas; `paint` replays the ops onto a 2D context.
 */

import type { ClientState } from "./state.js";

export type DrawOp =
  | { op: "clear"; color: string }
  | { op: "poly"; points: [number, number][]; fill: string; stroke?: string }
  | { op: "disc"; x: number; y: number; r: number; fill: string; stroke?: string }
  | { op: "label"; x: number; y: number; text: string; color: string; size: number }
  | { op: "bubble"; x: number; y: number; text: string };

export interface Viewport {
  width: number;
  height: number;
  scale: number;
  offsetX: number;
  offsetY: number;
}

export function fitViewport(
  bounds: [number, number, number, number],
  width: number,
  height: number,
): Viewport {
  const [minx, miny, maxx, maxy] = bounds;
  const scale = Math.min(width / (maxx - minx), height / (maxy - miny));
  return {
    width,
    height,
    scale,
    offsetX: -minx * scale,
    offsetY: -miny * scale,
  };
}

export function toWorld(view: Viewport, px: number, py: number): [number, number] {
  // canvas y grows downward; the world is drawn y-up
  return [(px - view.offsetX) / view.scale, (view.height - py - view.offsetY) / view.scale];
}

function toCanvas(view: Viewport, x: number, y: number): [number, number] {
  return [x * view.scale + view.offsetX, view.height - (y * view.scale + view.offsetY)];
}

const RECENT_SECONDS = 5;

export function computeScene(state: ClientState, view: Viewport): DrawOp[] {
  const ops: DrawOp[] = [{ op: "clear", color: "#16181d" }];
  const geo = state.geometry;
  if (!geo) {
    ops.push({
      op: "label",
      x: view.width / 2,
      y: view.height / 2,
      text: "connecting...",
      color: "#8b93a7",
      size: 16,
    });
    return ops;
  }
  const project = (p: [number, number]) => toCanvas(view, p[0], p[1]);
  for (const loc of geo.locations) {
    ops.push({
      op: "poly",
      points: loc.region.map(project),
      fill: "#1f2733",
      stroke: "#2e3a4d",
    });
    const [lx, ly] = project(loc.position);
    ops.push({ op: "label", x: lx, y: ly, text: loc.id, color: "#49566e", size: 11 });
  }
  for (const poly of geo.obstacles) {
    ops.push({ op: "poly", points: poly.map(project), fill: "#3a3f4a" });
  }
  for (const item of geo.items) {
    const [ix, iy] = project(item.position);
    ops.push({ op: "disc", x: ix, y: iy, r: 4, fill: "#b9a44c" });
  }
  const snap = state.snapshot;
  if (!snap) {
    return ops;
  }
  const recentSpeech = new Map<string, { text: string; tick: number }>();
  const horizon = snap.tick - RECENT_SECONDS / state.dt;
  for (const u of snap.utterances) {
    if (u.tick < horizon) {
      continue;
    }
    const prev = recentSpeech.get(u.speaker);
    if (!prev || prev.tick <= u.tick) {
      recentSpeech.set(u.speaker, { text: u.text, tick: u.tick });
    }
  }
  for (const agent of snap.agents) {
    const [ax, ay] = project(agent.position);
    const r = Math.max(4, agent.radius * view.scale);
    ops.push({ op: "disc", x: ax, y: ay, r, fill: "#5a8dd6", stroke: "#9cc0f0" });
    ops.push({ op: "label", x: ax, y: ay - r - 6, text: agent.name, color: "#c6d4ef", size: 12 });
    const said = recentSpeech.get(agent.id);
    if (said) {
      ops.push({ op: "bubble", x: ax, y: ay - r - 20, text: said.text });
    }
  }
  for (const avatar of snap.avatars) {
    const [ax, ay] = project(avatar.position);
    const r = Math.max(4, avatar.radius * view.scale);
    const you = avatar.id === state.avatarId;
    ops.push({
      op: "disc",
      x: ax,
      y: ay,
      r,
      fill: you ? "#62c46c" : "#4a9e55",
      stroke: "#b6e8bb",
    });
    ops.push({
      op: "label",
      x: ax,
      y: ay - r - 6,
      text: you ? `${avatar.name} (you)` : avatar.name,
      color: "#cdeccf",
      size: 12,
    });
    const said = recentSpeech.get(avatar.id);
    if (said) {
      ops.push({ op: "bubble", x: ax, y: ay - r - 20, text: said.text });
    }
  }
  return ops;
}

export function paint(ctx: CanvasRenderingContext2D, view: Viewport, ops: DrawOp[]): void {
  for (const op of ops) {
    switch (op.op) {
      case "clear":
        ctx.fillStyle = op.color;
        ctx.fillRect(0, 0, view.width, view.height);
        break;
      case "poly": {
        ctx.beginPath();
        op.points.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
        ctx.closePath();
        ctx.fillStyle = op.fill;
        ctx.fill();
        if (op.stroke) {
          ctx.strokeStyle = op.stroke;
          ctx.stroke();
        }
        break;
      }
      case "disc":
        ctx.beginPath();
        ctx.arc(op.x, op.y, op.r, 0, Math.PI * 2);
        ctx.fillStyle = op.fill;
        ctx.fill();
        if (op.stroke) {
          ctx.strokeStyle = op.stroke;
          ctx.stroke();
        }
        break;
      case "label":
        ctx.font = `${op.size}px system-ui, sans-serif`;
        ctx.textAlign = "center";
        ctx.fillStyle = op.color;
        ctx.fillText(op.text, op.x, op.y);
        break;
      case "bubble": {
        ctx.font = "12px system-ui, sans-serif";
        const text = op.text.length > 48 ? `${op.text.slice(0, 45)}...` : op.text;
        const w = ctx.measureText(text).width + 12;
        ctx.fillStyle = "rgba(240, 243, 250, 0.92)";
        ctx.fillRect(op.x - w / 2, op.y - 16, w, 20);
        ctx.fillStyle = "#1d2330";
        ctx.textAlign = "center";
        ctx.fillText(text, op.x, op.y - 2);
        break;
      }
    }
  }
}
