/**
 * Wire protocol for a live session (see docs/protocol.md).
 *
 * The client emits exactly three command shapes — join, move_to, say —
 * through the builders below; nothing else ever goes on the wire.
 */

export const PROTOCOL_VERSION = 1;

// --- commands (client -> server) ---

export interface JoinCommand {
  v: 1;
  type: "join";
}

export interface MoveToCommand {
  v: 1;
  type: "move_to";
  x: number;
  y: number;
}

export interface SayCommand {
  v: 1;
  type: "say";
  text: string;
}

export type Command = JoinCommand | MoveToCommand | SayCommand;

export function joinCommand(): JoinCommand {
  return { v: 1, type: "join" };
}

export function moveToCommand(x: number, y: number): MoveToCommand {
  return { v: 1, type: "move_to", x, y };
}

export function sayCommand(text: string): SayCommand {
  return { v: 1, type: "say", text };
}

export function encodeCommand(command: Command): string {
  return JSON.stringify(command);
}

// --- server messages ---

export interface Disc {
  id: string;
  name: string;
  position: [number, number];
  radius: number;
  action: string;
}

export interface StaticGeometry {
  bounds: [number, number, number, number];
  obstacles: [number, number][][];
  locations: { id: string; region: [number, number][]; position: [number, number] }[];
  items: { id: string; position: [number, number] }[];
}

export interface WelcomeMessage {
  v: number;
  type: "welcome";
  avatar_id: string;
  avatar_name: string;
  dt: number;
  tick: number;
  static_geometry: StaticGeometry;
}

export interface SnapshotMessage {
  v: number;
  type: "snapshot";
  tick: number;
  time: number;
  agents: Disc[];
  avatars: Disc[];
  utterances: SnapshotUtterance[];
}

export interface SnapshotUtterance {
  speaker: string;
  speaker_name: string;
  text: string;
  tick: number;
  addressee: string | null;
}

export interface UtteranceMessage {
  v: number;
  type: "utterance";
  speaker: string;
  speaker_name: string;
  text: string;
  tick: number;
  addressed_to_you: boolean;
}

export interface ErrorMessage {
  v: number;
  type: "error";
  code: string;
  detail: string;
}

export type ServerMessage =
  | WelcomeMessage
  | SnapshotMessage
  | UtteranceMessage
  | ErrorMessage;

/** Parse one frame; null for anything that is not a known server message. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let data: unknown;
  try {
    data = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof data !== "object" || data === null) {
    return null;
  }
  const msg = data as { [key: string]: unknown };
  if (msg.v !== PROTOCOL_VERSION || typeof msg.type !== "string") {
    return null;
  }
  switch (msg.type) {
    case "welcome":
      return typeof msg.avatar_id === "string" && typeof msg.static_geometry === "object"
        ? (msg as unknown as WelcomeMessage)
        : null;
    case "snapshot":
      return Array.isArray(msg.agents) && typeof msg.tick === "number"
        ? (msg as unknown as SnapshotMessage)
        : null;
    case "utterance":
      return typeof msg.text === "string" && typeof msg.speaker === "string"
        ? (msg as unknown as UtteranceMessage)
        : null;
    case "error":
      return typeof msg.code === "string" ? (msg as unknown as ErrorMessage) : null;
    default:
      return null;
  }
}
