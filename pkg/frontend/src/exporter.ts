// Serialization of recorded streams into the bundle wire formats, with the
// same validation the ingestion side applies, run locally before download.

import {
  MarkerEvent,
  OrdinalEvent,
  ORDINAL_CODE,
  SurveyAnswers,
} from "./model.js";

export interface ExportIssue {
  severity: "fatal" | "warning";
  message: string;
}

export interface ExportResult {
  selfJsonl: string | null;
  eoiJsonl: string | null;
  surveyJson: string | null;
  issues: ExportIssue[];
}

function checkMonotonic(times: number[], label: string, issues: ExportIssue[]): void {
  for (let i = 1; i < times.length; i++) {
    if (times[i] <= times[i - 1]) {
      issues.push({
        severity: "fatal",
        message: `${label}: timestamp ${times[i]} does not increase past ${times[i - 1]}`,
      });
      return;
    }
  }
}

function checkRange(times: number[], durationS: number, label: string,
                    issues: ExportIssue[]): void {
  for (const t of times) {
    if (t < 0 || t > durationS) {
      issues.push({
        severity: "fatal",
        message: `${label}: timestamp ${t} outside [0, ${durationS}]`,
      });
      return;
    }
  }
}

function checkLikert(value: number | undefined, label: string,
                     issues: ExportIssue[]): boolean {
  if (value === undefined) return false;
  if (!(value >= 1 && value <= 10)) {
    issues.push({ severity: "fatal", message: `${label} must be in [1, 10], got ${value}` });
    return false;
  }
  return true;
}

export function serializeOrdinals(events: readonly OrdinalEvent[]): string {
  return events
    .map((e) => JSON.stringify({ t: e.t, v: ORDINAL_CODE[e.state] }))
    .join("\n") + (events.length ? "\n" : "");
}

export function serializeMarkers(events: readonly MarkerEvent[]): string {
  return events
    .map((e) => JSON.stringify({ t: e.t, v: e.code }))
    .join("\n") + (events.length ? "\n" : "");
}

export function serializeSurvey(answers: SurveyAnswers): string | null {
  const payload: Record<string, number> = {};
  if (answers.surveyItem1 !== undefined) payload.survey_i_item1 = answers.surveyItem1;
  if (answers.surveyItem2 !== undefined) payload.survey_i_item2 = answers.surveyItem2;
  if (answers.participantItem !== undefined) payload.survey_p = answers.participantItem;
  if (answers.selfEstimate !== undefined) payload.self_estimate = answers.selfEstimate;
  if (Object.keys(payload).length === 0) return null;
  return JSON.stringify(payload, Object.keys(payload).sort(), 2) + "\n";
}

/** Assemble and validate the export; fatal issues null the affected file. */
export function exportAnnotation(
  ordinals: readonly OrdinalEvent[],
  markers: readonly MarkerEvent[],
  survey: SurveyAnswers,
  durationS: number,
): ExportResult {
  const issues: ExportIssue[] = [];
  const ordinalTimes = ordinals.map((e) => e.t);
  const markerTimes = markers.map((e) => e.t);
  checkMonotonic(ordinalTimes, "self stream", issues);
  checkRange(ordinalTimes, durationS, "self stream", issues);
  checkMonotonic(markerTimes, "eoi stream", issues);
  checkRange(markerTimes, durationS, "eoi stream", issues);
  checkLikert(survey.surveyItem1, "survey_i_item1", issues);
  checkLikert(survey.surveyItem2, "survey_i_item2", issues);
  checkLikert(survey.participantItem, "survey_p", issues);
  checkLikert(survey.selfEstimate, "self_estimate", issues);

  const surveyJson = serializeSurvey(survey);
  if (ordinals.length === 0 && markers.length === 0) {
    issues.push({
      severity: "warning",
      message: surveyJson === null
        ? "nothing recorded and no survey answers: nothing to export"
        : "no rating events recorded: exporting the survey alone",
    });
  }
  const fatal = issues.some((i) => i.severity === "fatal");
  return {
    selfJsonl: !fatal && ordinals.length ? serializeOrdinals(ordinals) : null,
    eoiJsonl: !fatal && markers.length ? serializeMarkers(markers) : null,
    surveyJson: fatal ? null : surveyJson,
    issues,
  };
}
