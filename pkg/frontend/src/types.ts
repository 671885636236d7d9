/** Shapes of the screening service's HTTP API payloads. */

export type MessageRole = "assistant" | "system-note";

export interface ExplanationRow {
  group: string;
  title: string;
  old: string;
  new: string | null;
  relevant: boolean;
}

export interface Assessment {
  prediction: boolean;
  probability: number;
  explanation: string | null;
  rows: ExplanationRow[];
  recommendations: string[];
  flags: string[];
}

export interface ApiMessage {
  role: MessageRole;
  text: string;
  assessment?: Assessment;
}

export interface SessionCreated {
  session_id: string;
  messages: ApiMessage[];
}

export interface MessagesOut {
  messages: ApiMessage[];
}
