/** Thin typed client over the service's JSON API. All label state round
 * trips through these endpoints; nothing is persisted client-side. */

import type {
  AnnotationPayload,
  AnnotationTask,
  ClassifyResult,
  LexiconEntry,
  SubmitAck,
} from "./types.js";

export interface RejectionDetail {
  rule?: string;
  message?: string;
}

export class ApiError extends Error {
  readonly status: number;
  readonly detail: RejectionDetail | string;

  constructor(status: number, detail: RejectionDetail | string) {
    const message =
      typeof detail === "string" ? detail : detail.message ?? "request failed";
    super(message);
    this.status = status;
    this.detail = detail;
  }

  /** The violated rule name, verbatim from the server, if any. */
  get rule(): string | undefined {
    return typeof this.detail === "string" ? undefined : this.detail.rule;
  }
}

async function parseError(response: Response): Promise<never> {
  let detail: RejectionDetail | string = response.statusText;
  try {
    const body = (await response.json()) as { detail?: RejectionDetail | string };
    if (body.detail !== undefined) detail = body.detail;
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly annotatorToken: string = "",
  ) {}

  private async get<T>(path: string, withToken = false): Promise<T> {
    const headers: Record<string, string> = {};
    if (withToken) headers["X-Annotator-Token"] = this.annotatorToken;
    const response = await fetch(this.base + path, { headers });
    if (!response.ok) await parseError(response);
    return (await response.json()) as T;
  }

  async getLexicon(): Promise<LexiconEntry[]> {
    return this.get<LexiconEntry[]>("/lexicon");
  }

  async nextTask(annotator: string): Promise<AnnotationTask | null> {
    const body = await this.get<{ task: AnnotationTask | null }>(
      `/tasks/next?annotator=${encodeURIComponent(annotator)}`,
      true,
    );
    return body.task;
  }

  async submitAnnotation(payload: AnnotationPayload): Promise<SubmitAck> {
    const response = await fetch(this.base + "/annotations", {
      method: "POST",
      headers: {
        "Content-Type": "application/json",
        "X-Annotator-Token": this.annotatorToken,
      },
      body: JSON.stringify(payload),
    });
    if (!response.ok) await parseError(response);
    return (await response.json()) as SubmitAck;
  }

  async classify(texts: string[]): Promise<ClassifyResult[]> {
    const response = await fetch(this.base + "/classify", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ texts }),
    });
    if (!response.ok) await parseError(response);
    return (await response.json()) as ClassifyResult[];
  }
}
