import type {
  ApplyRequest,
  ApplyResponse,
  SynthesizeRequest,
  SynthesizeResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(typeof detail === "string" ? detail : JSON.stringify(detail));
  }

  get isTimeout(): boolean {
    return this.status === 408;
  }
}

async function post<T>(url: string, body: unknown): Promise<T> {
  const response = await fetch(url, {
    method: "POST",
    headers: { "Content-Type": "application/json" },
    body: JSON.stringify(body),
  });
  const payload = await response.json().catch(() => ({}));
  if (!response.ok) {
    throw new ApiError(response.status, (payload as { detail?: unknown }).detail ?? payload);
  }
  return payload as T;
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  synthesize(request: SynthesizeRequest): Promise<SynthesizeResponse> {
    return post(`${this.baseUrl}/api/synthesize`, request);
  }

  apply(request: ApplyRequest): Promise<ApplyResponse> {
    return post(`${this.baseUrl}/api/apply`, request);
  }

  async health(): Promise<{ status: string; version: string }> {
    const response = await fetch(`${this.baseUrl}/health`);
    return (await response.json()) as { status: string; version: string };
  }
}
