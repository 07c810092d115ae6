import { describe, expect, it } from "vitest";

import { exportAnnotation, serializeSurvey } from "../src/exporter.js";
import { ImpactState } from "../src/model.js";

const ordinal = (t: number, state: ImpactState) => ({ t, state });

describe("export serialization", () => {
  it("writes one JSON object per line in wire format", () => {
    const result = exportAnnotation(
      [ordinal(0.5, ImpactState.Positive), ordinal(2.25, ImpactState.Negative)],
      [{ t: 1.0, code: 4 }],
      {},
      10,
    );
    expect(result.selfJsonl).toBe(
      '{"t":0.5,"v":"positive"}\n{"t":2.25,"v":"negative"}\n');
    expect(result.eoiJsonl).toBe('{"t":1,"v":4}\n');
    expect(result.issues.filter((i) => i.severity === "fatal")).toHaveLength(0);
  });

  it("survey alone exports survey.json only, with a warning", () => {
    const result = exportAnnotation([], [], { participantItem: 8 }, 10);
    expect(result.selfJsonl).toBeNull();
    expect(result.eoiJsonl).toBeNull();
    expect(JSON.parse(result.surveyJson as string)).toEqual({ survey_p: 8 });
    expect(result.issues.some((i) => i.severity === "warning")).toBe(true);
  });

  it("nothing at all warns and produces no files", () => {
    const result = exportAnnotation([], [], {}, 10);
    expect(result.selfJsonl).toBeNull();
    expect(result.surveyJson).toBeNull();
    expect(result.issues.some((i) => i.severity === "warning")).toBe(true);
  });

  it("rejects out-of-range timestamps", () => {
    const result = exportAnnotation([ordinal(99, ImpactState.Positive)], [], {}, 10);
    expect(result.selfJsonl).toBeNull();
    expect(result.issues.some((i) => i.severity === "fatal")).toBe(true);
  });

  it("rejects non-monotonic streams", () => {
    const result = exportAnnotation(
      [ordinal(2, ImpactState.Positive), ordinal(1, ImpactState.Neutral)],
      [], {}, 10);
    expect(result.issues.some((i) => i.severity === "fatal")).toBe(true);
  });

  it("rejects out-of-range survey values", () => {
    const result = exportAnnotation([], [], { selfEstimate: 11 }, 10);
    expect(result.issues.some((i) => i.severity === "fatal")).toBe(true);
  });

  it("serializes the full survey with sorted keys", () => {
    const text = serializeSurvey({
      surveyItem1: 8, surveyItem2: 6, participantItem: 7, selfEstimate: 5,
    }) as string;
    expect(JSON.parse(text)).toEqual({
      survey_i_item1: 8, survey_i_item2: 6, survey_p: 7, self_estimate: 5,
    });
    const keys = [...text.matchAll(/"(\w+)":/g)].map((m) => m[1]);
    expect(keys).toEqual([...keys].sort());
  });
});
