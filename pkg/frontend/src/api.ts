/** Thin typed client over the annotation service HTTP API.
 *
 * This module is the UI's only channel to the backend; it never touches the
 * event store directly.
 */

import type {
  AnnotatorProfile,
  ExportResponse,
  NextResponse,
  Verdict,
} from "./types.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

/** Machine-readable service error ({code, message} body with a 4xx status). */
export class ApiError extends Error {
  constructor(
    public readonly code: string,
    message: string,
    public readonly status: number,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function unwrap<T>(
  response: { status: number; json(): Promise<unknown> },
): Promise<T> {
  const body = (await response.json()) as Record<string, unknown>;
  if (response.status >= 400) {
    throw new ApiError(
      String(body.code ?? "unknown"),
      String(body.message ?? "request failed"),
      response.status,
    );
  }
  return body as T;
}

export class AnnotationApi {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = fetch as unknown as FetchLike,
  ) {}

  async register(annotatorId: string): Promise<AnnotatorProfile> {
    const r = await this.fetchFn(
      `${this.baseUrl}/v1/annotators/${encodeURIComponent(annotatorId)}/register`,
      { method: "POST" },
    );
    return unwrap<AnnotatorProfile>(r);
  }

  async next(annotatorId: string): Promise<NextResponse> {
    const r = await this.fetchFn(
      `${this.baseUrl}/v1/annotators/${encodeURIComponent(annotatorId)}/next`,
    );
    return unwrap<NextResponse>(r);
  }

  async submitVerdict(
    taskId: string,
    annotatorId: string,
    verdict: Verdict,
  ): Promise<AnnotatorProfile> {
    const r = await this.fetchFn(
      `${this.baseUrl}/v1/tasks/${encodeURIComponent(taskId)}/verdict`,
      {
        method: "POST",
        headers: { "Content-Type": "application/json" },
        body: JSON.stringify({ annotator_id: annotatorId, verdict }),
      },
    );
    const body = await unwrap<{ accepted: boolean; annotator: AnnotatorProfile }>(r);
    return body.annotator;
  }

  async exportPrm(): Promise<ExportResponse> {
    const r = await this.fetchFn(`${this.baseUrl}/v1/export/prm`);
    return unwrap<ExportResponse>(r);
  }
}
