import type { ServerMessage } from "../src/protocol.js";

export const RECORDED_LOG: ServerMessage[] = [
  {
    v: 1,
    type: "welcome",
    avatar_id: "avatar_1",
    avatar_name: "Echo",
    dt: 0.1,
    tick: 0,
    static_geometry: {
      bounds: [0, 0, 46, 38],
      obstacles: [[[10, 10], [12, 10], [12, 20], [10, 20]]],
      locations: [
        { id: "Area_1", region: [[4, 16], [14, 16], [14, 24], [4, 24]], position: [9, 20] },
      ],
      items: [{ id: "RegistrationDesk", position: [9, 20] }],
    },
  },
  {
    v: 1,
    type: "snapshot",
    tick: 10,
    time: 1,
    agents: [
      { id: "visitor_2", name: "Bravo", position: [16, 7], radius: 0.3, action: "idle" },
    ],
    avatars: [
      { id: "avatar_1", name: "Echo", position: [23, 2], radius: 0.3, action: "idle" },
    ],
    utterances: [],
  },
  {
    v: 1,
    type: "utterance",
    speaker: "visitor_2",
    speaker_name: "Bravo",
    text: "Echo, where is the apiary booth?",
    tick: 14,
    addressed_to_you: true,
  },
  {
    v: 1,
    type: "utterance",
    speaker: "visitor_3",
    speaker_name: "Charlie",
    text: "The registration desk is located in area one.",
    tick: 18,
    addressed_to_you: false,
  },
  {
    v: 1,
    type: "snapshot",
    tick: 20,
    time: 2,
    agents: [
      { id: "visitor_2", name: "Bravo", position: [16.4, 7.2], radius: 0.3, action: "move_to" },
    ],
    avatars: [
      { id: "avatar_1", name: "Echo", position: [23, 2], radius: 0.3, action: "idle" },
    ],
    utterances: [
      { speaker: "visitor_2", speaker_name: "Bravo", text: "Echo, where is the apiary booth?", tick: 14, addressee: "avatar_1" },
    ],
  },
  { v: 1, type: "error", code: "empty_utterance", detail: "empty utterance" },
];
