// Shared types and wire formats matching the session-bundle schema.

export enum ImpactState {
  Negative = -1,
  Neutral = 0,
  Positive = 1,
}

export type OrdinalCode = "positive" | "neutral" | "negative";

export const ORDINAL_CODE: Record<ImpactState, OrdinalCode> = {
  [ImpactState.Positive]: "positive",
  [ImpactState.Neutral]: "neutral",
  [ImpactState.Negative]: "negative",
};

export const EOI_POSITIVE_CODE = 4;
export const EOI_NEGATIVE_CODE = 5;

export interface OrdinalEvent {
  t: number; // seconds on the playback clock
  state: ImpactState;
}

export interface MarkerEvent {
  t: number;
  code: typeof EOI_POSITIVE_CODE | typeof EOI_NEGATIVE_CODE;
}

export interface SurveyAnswers {
  surveyItem1?: number; // operator goal-attainment item, 1-10
  surveyItem2?: number; // operator views-considered item, 1-10
  participantItem?: number; // participant's single item, 1-10
  selfEstimate?: number; // participant's own success estimate, 1-10
}

export interface BundleManifest {
  session_id: string;
  participant_id: string;
  scenario_id: number;
  duration_s: number;
  files: Record<string, string>;
  sample_rates?: Record<string, number>;
}
