/**
 * Client state as a pure reducer over server messages and local events.
 *
 * The UI renders only what the server said; replaying a recorded message
 * log through `applyMessage` reproduces the exact same state sequence.
 */

import type {
  ServerMessage,
  SnapshotMessage,
  StaticGeometry,
} from "./protocol.js";

export type ConnectionStatus = "connecting" | "connected" | "closed";

export interface ChatEntry {
  speaker: string;
  speakerName: string;
  text: string;
  tick: number;
  kind: "heard" | "said" | "error";
  highlighted: boolean; // an agent question addressed to the avatar
}

export interface ClientState {
  status: ConnectionStatus;
  avatarId: string | null;
  avatarName: string | null;
  dt: number;
  geometry: StaticGeometry | null;
  snapshot: SnapshotMessage | null;
  chat: ChatEntry[];
  lastError: string | null;
}

export function initialState(): ClientState {
  return {
    status: "connecting",
    avatarId: null,
    avatarName: null,
    dt: 0.1,
    geometry: null,
    snapshot: null,
    chat: [],
    lastError: null,
  };
}

const CHAT_LIMIT = 200;

function pushChat(state: ClientState, entry: ChatEntry): ClientState {
  const chat = [...state.chat, entry].slice(-CHAT_LIMIT);
  return { ...state, chat };
}

export function applyMessage(state: ClientState, msg: ServerMessage): ClientState {
  switch (msg.type) {
    case "welcome":
      return {
        ...state,
        status: "connected",
        avatarId: msg.avatar_id,
        avatarName: msg.avatar_name,
        dt: msg.dt,
        geometry: msg.static_geometry,
      };
    case "snapshot":
      return { ...state, snapshot: msg };
    case "utterance": {
      const question = /\?\s*$/.test(msg.text);
      return pushChat(state, {
        speaker: msg.speaker,
        speakerName: msg.speaker_name,
        text: msg.text,
        tick: msg.tick,
        kind: "heard",
        highlighted: msg.addressed_to_you && question,
      });
    }
    case "error":
      return pushChat(
        { ...state, lastError: `${msg.code}: ${msg.detail}` },
        {
          speaker: "server",
          speakerName: "server",
          text: `${msg.code}: ${msg.detail}`,
          tick: state.snapshot?.tick ?? 0,
          kind: "error",
          highlighted: false,
        },
      );
    default:
      return state;
  }
}

/** Local echo of something the player typed. */
export function applySaid(state: ClientState, text: string): ClientState {
  return pushChat(state, {
    speaker: state.avatarId ?? "you",
    speakerName: state.avatarName ?? "you",
    text,
    tick: state.snapshot?.tick ?? 0,
    kind: "said",
    highlighted: false,
  });
}

export function setStatus(state: ClientState, status: ConnectionStatus): ClientState {
  return { ...state, status };
}
