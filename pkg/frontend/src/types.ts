// Wire types for the session service. Field names mirror the JSON exactly.

export type Answer = "left" | "same" | "right";

export type Mode = "trained-feedback" | "untrained" | "expert";

export type SessionStatus =
  | "in-training"
  | "in-main"
  | "questionnaire"
  | "failed-gate"
  | "complete";

export interface TrialPayload {
  v: 1;
  kind: "trial";
  trial_index: number;
  trial_kind: "training" | "main";
  number: number;
  total: number;
  size: number;
  left_svg: string;
  right_svg: string;
  options: Answer[];
}

export interface GatePayload {
  v: 1;
  kind: "gate";
  passed: boolean;
  correct: number;
  total: number;
}

export interface QuestionnaireField {
  name: string;
  prompt: string;
  type: "text" | "choice";
  options?: string[];
}

export interface QuestionnairePayload {
  v: 1;
  kind: "questionnaire";
  fields: QuestionnaireField[];
}

export interface CompletionPayload {
  v: 1;
  kind: "complete";
  session_id: string;
  trials_answered: number;
}

export interface FeedbackBlock {
  correct: boolean;
  correct_answer: Answer;
}

export interface SessionSnapshot {
  v: 1;
  session_id: string;
  status: SessionStatus;
  trial?: TrialPayload;
  questionnaire?: QuestionnairePayload;
  gate?: GatePayload;
  summary?: CompletionPayload;
}

export interface SubmitReply {
  v: 1;
  accepted: number;
  status: SessionStatus;
  feedback?: FeedbackBlock;
  gate?: GatePayload;
  next?: TrialPayload | QuestionnairePayload;
}

export interface ResponseBody {
  v: 1;
  trial_index: number;
  answer: Answer;
  confident: boolean;
  response_time: number;
}

export interface QuestionnaireAnswers {
  [name: string]: string;
}

export interface SessionRequest {
  mode: Mode;
  participantId: string;
  size?: number;
  seed?: number;
}
