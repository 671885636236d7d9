/** Pure transcript view model and HTML rendering (no DOM required). */

import type { ApiMessage, Assessment } from "./types.js";

export type TranscriptEntry =
  | { kind: "user"; text: string }
  | { kind: "assistant"; text: string }
  | { kind: "note"; text: string }
  | { kind: "assessment"; text: string; assessment: Assessment };

export function entriesFromUserTurn(text: string): TranscriptEntry[] {
  return [{ kind: "user", text }];
}

export function entriesFromReply(messages: ApiMessage[]): TranscriptEntry[] {
  return messages.map((message) => {
    if (message.assessment) {
      return { kind: "assessment", text: message.text, assessment: message.assessment };
    }
    if (message.role === "system-note") {
      return { kind: "note", text: message.text };
    }
    return { kind: "assistant", text: message.text };
  });
}

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/**
 * System notes carry the explanation block, where changed answers arrive as
 * whole lines wrapped in `**`. Render those as emphasized lines; everything
 * else stays plain text.
 */
export function renderNoteBody(text: string): string {
  return text
    .split("\n")
    .map((line) => {
      const match = /^\*\*(.*)\*\*$/.exec(line);
      if (match) {
        return `<span class="changed">${escapeHtml(match[1] ?? "")}</span>`;
      }
      return escapeHtml(line);
    })
    .join("\n");
}

export function renderAssessmentPanel(assessment: Assessment): string {
  const verdict = assessment.prediction ? "detected" : "not-detected";
  const confidence = (assessment.probability * 100).toFixed(2);
  const parts: string[] = [];
  parts.push(`<section class="assessment ${verdict}" data-testid="assessment-panel">`);
  parts.push(
    `  <h2>Screening result: ${assessment.prediction ? "signs detected" : "no signs detected"}` +
      ` <span class="confidence">${confidence}% confidence</span></h2>`,
  );
  if (assessment.rows.length > 0) {
    parts.push(`  <table class="explanation" data-testid="explanation-rows">`);
    parts.push(`    <thead><tr><th>Factor</th><th>Your answer</th><th>Would change the result</th></tr></thead>`);
    parts.push(`    <tbody>`);
    for (const row of assessment.rows) {
      const cls = row.relevant ? ` class="relevant"` : "";
      const change = row.new === null ? "&mdash;" : escapeHtml(row.new);
      parts.push(
        `      <tr${cls} data-group="${escapeHtml(row.group)}">` +
          `<td>${escapeHtml(row.title)}</td>` +
          `<td>${escapeHtml(row.old)}</td>` +
          `<td>${change}</td></tr>`,
      );
    }
    parts.push(`    </tbody>`);
    parts.push(`  </table>`);
  }
  if (assessment.recommendations.length > 0) {
    parts.push(`  <ol class="recommendations" data-testid="recommendations">`);
    for (const recommendation of assessment.recommendations) {
      parts.push(`    <li>${escapeHtml(recommendation)}</li>`);
    }
    parts.push(`  </ol>`);
  }
  if (assessment.flags.length > 0) {
    parts.push(
      `  <p class="flags">Notes: ${assessment.flags.map(escapeHtml).join(", ")}</p>`,
    );
  }
  parts.push(`</section>`);
  return parts.join("\n");
}

export function renderEntry(entry: TranscriptEntry): string {
  switch (entry.kind) {
    case "user":
      return `<div class="msg user">${escapeHtml(entry.text)}</div>`;
    case "assistant":
      return `<div class="msg assistant">${escapeHtml(entry.text)}</div>`;
    case "note":
      return `<pre class="msg note">${renderNoteBody(entry.text)}</pre>`;
    case "assessment":
      return (
        `<div class="msg assistant">${escapeHtml(entry.text)}</div>\n` +
        renderAssessmentPanel(entry.assessment)
      );
  }
}

export function renderTranscript(entries: TranscriptEntry[]): string {
  return entries.map(renderEntry).join("\n");
}
