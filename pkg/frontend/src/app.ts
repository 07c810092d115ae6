// DOM shell: wires file pickers, the audio element, the trajectory canvas,
// the keyboard handlers, and the export buttons together.

import { AudioElementClock } from "./clock.js";
import { RatingRecorder } from "./recorder.js";
import { exportAnnotation } from "./exporter.js";
import {
  BundleFormatError,
  parseManifest,
  trajectoryFromCsv,
  trajectoryFromEmotionsCsv,
  TrajectoryPoint,
  wavDuration,
} from "./bundleReader.js";
import { BundleManifest, ImpactState } from "./model.js";

interface LoadedSession {
  manifest: BundleManifest | null;
  audioUrl: string;
  audioDurationS: number;
  trajectory: TrajectoryPoint[];
}

const STATE_LABEL: Record<ImpactState, string> = {
  [ImpactState.Positive]: "positive",
  [ImpactState.Neutral]: "neutral",
  [ImpactState.Negative]: "negative",
};

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) throw new Error(`missing element #${id}`);
  return el as T;
}

async function loadSession(files: FileList): Promise<LoadedSession> {
  let manifest: BundleManifest | null = null;
  let audioFile: File | null = null;
  let emotionsFile: File | null = null;
  let trajectoryFile: File | null = null;
  for (const file of Array.from(files)) {
    if (file.name === "manifest.json") manifest = parseManifest(await file.text());
    else if (file.name.endsWith(".wav") && audioFile === null) audioFile = file;
    else if (file.name === "emotions.csv") emotionsFile = file;
    else if (file.name.endsWith(".csv")) trajectoryFile = file;
  }
  if (audioFile === null) {
    throw new BundleFormatError("select at least the participant audio (.wav)");
  }
  const bytes = await audioFile.arrayBuffer();
  const audioDurationS = wavDuration(bytes); // rejects corrupt audio up front
  let trajectory: TrajectoryPoint[] = [];
  if (emotionsFile !== null) {
    trajectory = trajectoryFromEmotionsCsv(await emotionsFile.text());
  } else if (trajectoryFile !== null) {
    trajectory = trajectoryFromCsv(await trajectoryFile.text());
  }
  return {
    manifest,
    audioUrl: URL.createObjectURL(new Blob([bytes], { type: "audio/wav" })),
    audioDurationS,
    trajectory,
  };
}

function drawTrajectory(canvas: HTMLCanvasElement, points: TrajectoryPoint[],
                        playheadNorm: number): void {
  const ctx = canvas.getContext("2d");
  if (ctx === null) return;
  const { width, height } = canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.strokeStyle = "#555";
  ctx.beginPath();
  ctx.moveTo(width / 2, 0); ctx.lineTo(width / 2, height);
  ctx.moveTo(0, height / 2); ctx.lineTo(width, height / 2);
  ctx.stroke();
  const toPx = (p: TrajectoryPoint): [number, number] => [
    (p.x + 1) / 2 * width,
    (1 - (p.y + 1) / 2) * height,
  ];
  for (const point of points) {
    const [px, py] = toPx(point);
    const played = point.tNorm <= playheadNorm;
    ctx.fillStyle = played
      ? `hsl(${240 - point.tNorm * 180}, 80%, 55%)`
      : "rgba(128,128,128,0.25)";
    ctx.beginPath();
    ctx.arc(px, py, 2.5, 0, Math.PI * 2);
    ctx.fill();
  }
}

function download(name: string, text: string): void {
  const anchor = document.createElement("a");
  anchor.href = URL.createObjectURL(new Blob([text], { type: "application/octet-stream" }));
  anchor.download = name;
  anchor.click();
  URL.revokeObjectURL(anchor.href);
}

function likertValue(input: HTMLInputElement): number | undefined {
  return input.value === "" ? undefined : Number(input.value);
}

export function main(): void {
  const audio = byId<HTMLAudioElement>("player");
  const canvas = byId<HTMLCanvasElement>("trajectory");
  const statusLine = byId<HTMLElement>("status");
  const stateLine = byId<HTMLElement>("state");
  const issuesBox = byId<HTMLElement>("issues");
  const clock = new AudioElementClock(audio);
  const recorder = new RatingRecorder(clock);
  let session: LoadedSession | null = null;
  let lastPosition = 0;

  byId<HTMLInputElement>("picker").addEventListener("change", async (event) => {
    const input = event.target as HTMLInputElement;
    if (input.files === null || input.files.length === 0) return;
    try {
      session = await loadSession(input.files);
    } catch (err) {
      statusLine.textContent = `load failed: ${(err as Error).message}`;
      session = null;
      return;
    }
    audio.src = session.audioUrl;
    const declared = session.manifest?.duration_s;
    statusLine.textContent =
      `loaded ${session.manifest?.session_id ?? "(no manifest)"} - ` +
      `audio ${session.audioDurationS.toFixed(1)} s` +
      (declared !== undefined ? ` / manifest ${declared.toFixed(1)} s` : "");
    byId<HTMLElement>("trajectory-panel").style.display =
      session.trajectory.length > 0 ? "block" : "none";
    drawTrajectory(canvas, session.trajectory, 0);
  });

  document.addEventListener("keydown", (event) => {
    if (["ArrowUp", "ArrowDown", "PageUp", "PageDown"].includes(event.key)) {
      event.preventDefault();
      recorder.handleKey(event.key);
      stateLine.textContent = STATE_LABEL[recorder.currentState];
    }
  });

  audio.addEventListener("seeked", () => {
    // rewinding discards later events; seeking forward keeps everything
    if (audio.currentTime < lastPosition) {
      recorder.discardAfter(audio.currentTime);
      stateLine.textContent = STATE_LABEL[recorder.currentState];
    }
    lastPosition = audio.currentTime;
  });
  audio.addEventListener("timeupdate", () => {
    lastPosition = Math.max(lastPosition, audio.currentTime);
    if (session !== null && session.trajectory.length > 0 && audio.duration > 0) {
      drawTrajectory(canvas, session.trajectory, audio.currentTime / audio.duration);
    }
  });

  byId<HTMLButtonElement>("export").addEventListener("click", () => {
    const duration = session?.manifest?.duration_s ?? session?.audioDurationS
      ?? audio.duration;
    const result = exportAnnotation(
      recorder.ordinalEvents,
      recorder.markerEvents,
      {
        surveyItem1: likertValue(byId<HTMLInputElement>("survey-i1")),
        surveyItem2: likertValue(byId<HTMLInputElement>("survey-i2")),
        participantItem: likertValue(byId<HTMLInputElement>("survey-p")),
        selfEstimate: likertValue(byId<HTMLInputElement>("self-estimate")),
      },
      duration,
    );
    issuesBox.textContent = result.issues
      .map((issue) => `${issue.severity}: ${issue.message}`)
      .join("\n");
    if (result.selfJsonl !== null) download("self.jsonl", result.selfJsonl);
    if (result.eoiJsonl !== null) download("eoi.jsonl", result.eoiJsonl);
    if (result.surveyJson !== null) download("survey.json", result.surveyJson);
  });
}

if (typeof document !== "undefined" && document.getElementById("player") !== null) {
  main();
}
