/** Annotation screen: context display, nine category widgets, cue
 * selection, keyboard-driven labeling, submit-and-advance. */

import { ApiClient, ApiError } from "./api.js";
import {
  AnnotationViewState,
  CAUSALITY,
  addFreeCue,
  buildRecord,
  canSubmit,
  dependentsEnabled,
  freshState,
  setBinary,
  setTernary,
  toggleCue,
  validationIssues,
} from "./state.js";
import type { AnnotationTask, LexiconEntry } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Lexicon phrases whose surface forms occur in the sentence. */
export function cueCandidates(
  text: string,
  lexicon: LexiconEntry[],
): string[] {
  const lowered = text.toLowerCase();
  const hits: string[] = [];
  for (const entry of lexicon) {
    const found = entry.surface_forms.some((form) => {
      const pattern = new RegExp(
        `(^|[^a-z0-9])${form.replace(/[.*+?^${}()|[\]\\]/g, "\\$&")}($|[^a-z0-9])`,
      );
      return pattern.test(lowered);
    });
    if (found) hits.push(entry.phrase);
  }
  return hits;
}

export class AnnotateScreen {
  private state: AnnotationViewState = freshState(null);
  private lexicon: LexiconEntry[] = [];
  private focusIndex = 0;

  constructor(
    private readonly root: HTMLElement,
    private readonly api: ApiClient,
    private readonly annotator: string,
  ) {}

  async start(): Promise<void> {
    try {
      this.lexicon = await this.api.getLexicon();
      await this.advance();
    } catch (error) {
      this.renderError(error, () => this.start());
    }
  }

  private async advance(): Promise<void> {
    const task = await this.api.nextTask(this.annotator);
    this.state = freshState(task);
    this.focusIndex = 0;
    this.render();
  }

  handleKey(event: KeyboardEvent): void {
    const task = this.state.task;
    if (!task) return;
    const rows = this.categoryRows();
    if (event.key === "ArrowDown") {
      this.focusIndex = Math.min(this.focusIndex + 1, rows.length - 1);
    } else if (event.key === "ArrowUp") {
      this.focusIndex = Math.max(this.focusIndex - 1, 0);
    } else if (event.key === "0" || event.key === "1") {
      const category = rows[this.focusIndex];
      if (category && this.rowEnabled(category) &&
          task.schema.binary_categories.includes(category)) {
        this.state = setBinary(this.state, category,
          event.key === "1" ? 1 : 0);
      }
    } else if (event.key === "Enter") {
      if (canSubmit(this.state)) void this.submit();
      return;
    } else {
      return;
    }
    event.preventDefault();
    this.render();
  }

  private categoryRows(): string[] {
    const schema = this.state.task?.schema;
    if (!schema) return [];
    return [
      ...schema.binary_categories,
      ...Object.keys(schema.ternary_categories),
    ];
  }

  private rowEnabled(category: string): boolean {
    return category === CAUSALITY || dependentsEnabled(this.state);
  }

  private async submit(): Promise<void> {
    try {
      await this.api.submitAnnotation(buildRecord(this.state));
      await this.advance();
    } catch (error) {
      this.renderError(error, () => this.render());
    }
  }

  private renderError(error: unknown, retry: () => void): void {
    this.root.textContent = "";
    const box = el("div", "error-box");
    const rule = error instanceof ApiError ? error.rule : undefined;
    box.appendChild(el("p", "error-message",
      rule ? `rejected: ${rule}` : String(
        error instanceof Error ? error.message : error)));
    const button = el("button", "retry", "Retry");
    button.onclick = retry;
    box.appendChild(button);
    this.root.appendChild(box);
  }

  render(): void {
    this.root.textContent = "";
    const task = this.state.task;
    if (!task) {
      this.root.appendChild(el("p", "done", "No open tasks. All done!"));
      return;
    }

    const progress = el("p", "progress",
      `${task.progress.submitted} of ${task.progress.total} submitted`);
    this.root.appendChild(progress);

    const context = el("div", "context-block");
    if (task.predecessor !== null) {
      context.appendChild(el("p", "context", task.predecessor));
    }
    context.appendChild(el("p", "target", task.text));
    if (task.successor !== null) {
      context.appendChild(el("p", "context", task.successor));
    }
    this.root.appendChild(context);

    const rows = this.categoryRows();
    const list = el("div", "categories");
    rows.forEach((category, index) => {
      const row = el("div",
        "category-row" + (index === this.focusIndex ? " focused" : "") +
        (this.rowEnabled(category) ? "" : " disabled"));
      row.dataset.category = category;
      row.appendChild(el("span", "category-name", category));
      if (task.schema.binary_categories.includes(category)) {
        for (const value of [0, 1] as const) {
          const button = el("button", "label-button" +
            (this.state.labels[category] === value ? " selected" : ""),
            String(value));
          button.disabled = !this.rowEnabled(category);
          button.onclick = () => {
            this.state = setBinary(this.state, category, value);
            this.render();
          };
          row.appendChild(button);
        }
      } else {
        for (const value of task.schema.ternary_categories[category]) {
          const button = el("button", "label-button" +
            (this.state.labels[category] === value ? " selected" : ""),
            value);
          button.disabled = !this.rowEnabled(category);
          button.onclick = () => {
            this.state = setTernary(this.state, category, value);
            this.render();
          };
          row.appendChild(button);
        }
      }
      list.appendChild(row);
    });
    this.root.appendChild(list);

    const cueBox = el("div", "cues");
    cueBox.appendChild(el("span", "cue-title", "Cue phrases:"));
    for (const phrase of cueCandidates(task.text, this.lexicon)) {
      const label = el("label", "cue-option");
      const checkbox = el("input") as HTMLInputElement;
      checkbox.type = "checkbox";
      checkbox.value = phrase;
      checkbox.checked = this.state.selectedCues.includes(phrase);
      checkbox.onchange = () => {
        this.state = toggleCue(this.state, phrase);
        this.render();
      };
      label.appendChild(checkbox);
      label.appendChild(document.createTextNode(phrase));
      cueBox.appendChild(label);
    }
    const freeInput = el("input", "free-cue") as HTMLInputElement;
    freeInput.placeholder = "add a new cue phrase";
    const addButton = el("button", "add-cue", "Add");
    addButton.onclick = () => {
      this.state = addFreeCue(this.state, freeInput.value);
      this.render();
    };
    cueBox.appendChild(freeInput);
    cueBox.appendChild(addButton);
    for (const phrase of this.state.freeCues) {
      cueBox.appendChild(el("span", "free-cue-chip", phrase));
    }
    this.root.appendChild(cueBox);

    const issues = validationIssues(this.state);
    const submit = el("button", "submit", "Submit");
    submit.disabled = !canSubmit(this.state);
    submit.title = issues.join("; ");
    submit.onclick = () => void this.submit();
    this.root.appendChild(submit);
  }

  /* test hooks */
  get viewState(): AnnotationViewState {
    return this.state;
  }

  setLexicon(lexicon: LexiconEntry[]): void {
    this.lexicon = lexicon;
  }

  loadTask(task: AnnotationTask): void {
    this.state = freshState(task);
    this.render();
  }
}
