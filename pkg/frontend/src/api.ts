import type {
  BudgetMutation,
  CreateSessionRequest,
  ErrorBody,
  ReleaseDocument,
  ReleaseResponse,
  RiskCurvePayload,
  SessionPayload,
  WhatifPayload,
  WhatifRequest,
} from "./types";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ErrorBody,
  ) {
    super(`${body.code}: ${body.message}`);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base: string,
    private readonly fetchFn: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchFn(this.base + path, init);
    const parsed = (await resp.json()) as unknown;
    if (!resp.ok) {
      throw new ApiError(resp.status, parsed as ErrorBody);
    }
    return parsed as T;
  }

  createSession(req: CreateSessionRequest): Promise<SessionPayload> {
    return this.request("POST", "/sessions", req);
  }

  getSession(id: string): Promise<SessionPayload> {
    return this.request("GET", `/sessions/${id}`);
  }

  whatif(id: string, req: WhatifRequest): Promise<WhatifPayload> {
    return this.request("POST", `/sessions/${id}/whatif`, req);
  }

  updateBudget(id: string, mutation: BudgetMutation): Promise<SessionPayload> {
    return this.request("PATCH", `/sessions/${id}/budget`, mutation);
  }

  release(id: string): Promise<ReleaseResponse> {
    return this.request("POST", `/sessions/${id}/release`);
  }

  getRelease(id: string): Promise<ReleaseDocument> {
    return this.request("GET", `/sessions/${id}/release`);
  }

  riskCurve(id: string): Promise<RiskCurvePayload> {
    return this.request("GET", `/sessions/${id}/risk-curve`);
  }
}
