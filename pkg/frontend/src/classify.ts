/** Live classify view: one sentence in, label + probability + highlighted
 * cue spans out. */

import { ApiClient } from "./api.js";
import type { ClassifyResult } from "./types.js";

/** Split a sentence into plain/highlighted segments from cue spans.
 * Spans are non-overlapping and ordered by the service contract. */
export function segments(
  text: string,
  cues: { start: number; end: number }[],
): { text: string; highlighted: boolean }[] {
  const ordered = [...cues].sort((a, b) => a.start - b.start);
  const out: { text: string; highlighted: boolean }[] = [];
  let cursor = 0;
  for (const span of ordered) {
    if (span.start > cursor) {
      out.push({ text: text.slice(cursor, span.start), highlighted: false });
    }
    out.push({ text: text.slice(span.start, span.end), highlighted: true });
    cursor = span.end;
  }
  if (cursor < text.length) {
    out.push({ text: text.slice(cursor), highlighted: false });
  }
  return out;
}

export function formatProbability(p: number): string {
  return p.toFixed(2);
}

export class ClassifyScreen {
  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
  ) {}

  render(): void {
    this.root.textContent = "";
    const input = document.createElement("textarea");
    input.className = "classify-input";
    input.placeholder = "Enter a requirement sentence";
    const button = document.createElement("button");
    button.className = "classify-button";
    button.textContent = "Classify";
    button.disabled = true;
    const result = document.createElement("div");
    result.className = "classify-result";

    input.oninput = () => {
      button.disabled = input.value.trim().length === 0;
    };
    button.onclick = async () => {
      try {
        const [classification] = await this.api.classify([input.value]);
        this.renderResult(result, input.value, classification);
      } catch (error) {
        result.textContent = String(
          error instanceof Error ? error.message : error);
      }
    };

    this.root.appendChild(input);
    this.root.appendChild(button);
    this.root.appendChild(result);
  }

  renderResult(
    target: HTMLElement,
    text: string,
    classification: ClassifyResult,
  ): void {
    target.textContent = "";
    const verdict = document.createElement("p");
    verdict.className = `verdict ${classification.label}`;
    verdict.textContent =
      `${classification.label === "causal" ? "Causal" : "Not causal"} ` +
      `(p_causal = ${formatProbability(classification.p_causal)})`;
    target.appendChild(verdict);

    const annotated = document.createElement("p");
    annotated.className = "annotated";
    for (const segment of segments(text, classification.cues)) {
      if (segment.highlighted) {
        const mark = document.createElement("mark");
        mark.textContent = segment.text;
        annotated.appendChild(mark);
      } else {
        annotated.appendChild(document.createTextNode(segment.text));
      }
    }
    target.appendChild(annotated);
  }
}
